// Acceptance harness: twelve end-to-end criteria, each at a pinned tolerance
// and a pinned per-criterion time budget. Every criterion prints exactly one
// PASS/FAIL line (failures list the violated conditions underneath), and the
// process exits nonzero if any criterion fails. All checks go through the
// public library API; where a criterion demands an independent route, that
// route is computed here from scratch.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "khinchin/dist.hpp"
#include "khinchin/perturbed.hpp"
#include "khinchin/specialfn.hpp"
#include "khinchin/verify.hpp"

namespace {

using khinchin::dist::Family1D;
using khinchin::dist::RadialKind;
using khinchin::dist::UnitVector;
using khinchin::report::Verdict;
using khinchin::specialfn::kPi;

std::string fmt(const char* pattern, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, pattern);
  std::vsnprintf(buf, sizeof buf, pattern, ap);
  va_end(ap);
  return buf;
}

// Collects the violated conditions of one criterion.
struct Ctx {
  bool ok = true;
  std::vector<std::string> notes;
  void expect(bool cond, std::string what) {
    if (cond) return;
    ok = false;
    if (notes.size() < 12) notes.push_back(std::move(what));
  }
};

std::vector<double> log_grid(double lo, double hi, int points) {
  std::vector<double> g(points);
  const double la = std::log(lo), lb = std::log(hi);
  for (int i = 0; i < points; ++i)
    g[i] = std::exp(la + (lb - la) * i / (points - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

// 1. The reference mean functional by three routes -- the infinite product,
//    direct quadrature, and a gamma-ratio closed form computed here -- must
//    agree pairwise to 1e-9 on 50 log-spaced points of [1, 1e3], and the
//    rational anchors at s = 2, 3 must hold to 1e-10.
void c01_psi0_routes(Ctx& c) {
  const double agree = 1e-9;
  for (double s : log_grid(1.0, 1e3, 50)) {
    const auto prod = khinchin::specialfn::psi0(s);
    const auto quad = khinchin::specialfn::psi0_quadrature(s, 1e-10);
    const double closed =
        2.0 / std::sqrt(kPi * s) *
        std::exp(std::lgamma(0.5 * (s + 1.0)) - std::lgamma(0.5 * s));
    c.expect(std::abs(prod.value - closed) <= agree,
             fmt("product vs closed form at s=%.6g: |diff|=%.3e", s,
                 std::abs(prod.value - closed)));
    c.expect(std::abs(quad.value - closed) <= agree,
             fmt("quadrature vs closed form at s=%.6g: |diff|=%.3e", s,
                 std::abs(quad.value - closed)));
    c.expect(std::abs(prod.value - quad.value) <= agree,
             fmt("product vs quadrature at s=%.6g: |diff|=%.3e", s,
                 std::abs(prod.value - quad.value)));
    c.expect(quad.ok, fmt("quadrature tolerance not met at s=%.6g", s));
  }
  const auto p2 = khinchin::specialfn::psi0(2.0);
  const auto p3 = khinchin::specialfn::psi0(3.0);
  const double d2 = std::abs(p2.value - 1.0 / std::sqrt(2.0));
  const double d3 = std::abs(p3.value - 4.0 / (kPi * std::sqrt(3.0)));
  c.expect(d2 <= 1e-10, fmt("anchor s=2 off by %.3e", d2));
  c.expect(d3 <= 1e-10, fmt("anchor s=3 off by %.3e", d3));
}

// 2. The minimum of the reference derivative over [2, 3], scanned on a
//    1001-point grid and widened by a curvature slack, stays at or above
//    0.01785 - 1e-5.
void c02_deriv_floor(Ctx& c) {
  const int n = 1001;
  const double h = 1.0 / (n - 1);
  double vmin = std::numeric_limits<double>::infinity();
  double at = 2.0;
  bool certified = true;
  for (int i = 0; i < n; ++i) {
    const double s = 2.0 + i * h;
    const auto e = khinchin::specialfn::psi0_prime(s);
    certified = certified && e.ok;
    if (e.value - e.unc < vmin) {
      vmin = e.value - e.unc;
      at = s;
    }
  }
  const double slack = 0.5 * h * h / 8.0;  // |f''| <= 0.5 on [2, 3]
  const double floor = 0.01785 - 1e-5;
  c.expect(certified, "derivative evaluations not certified");
  c.expect(vmin - slack >= floor,
           fmt("min derivative %.8f at s=%.4f (slack %.1e) below %.8f", vmin,
               at, slack, floor));
}

// 3. The reference min functional: value sqrt(2) at s = 2 to 1e-9, the
//    underlying integral pi/2 at s = 2 to 1e-10, and the s -> infinity
//    limit sqrt(6/pi) reproduced within 1e-2 at s = 1e6 through the
//    large-s Gaussian-window route.
void c03_phi0_anchors(Ctx& c) {
  const auto ph2 = khinchin::specialfn::phi0(2.0);
  c.expect(std::abs(ph2.value - std::sqrt(2.0)) <= 1e-9,
           fmt("phi0(2) off sqrt(2) by %.3e",
               std::abs(ph2.value - std::sqrt(2.0))));
  const auto i2 = khinchin::specialfn::ball_I(2.0, 0, 1e-11);
  c.expect(std::abs(i2.value - kPi / 2.0) <= 1e-10,
           fmt("I(2) off pi/2 by %.3e", std::abs(i2.value - kPi / 2.0)));

  const auto sph = khinchin::dist::make_radial(RadialKind::sphere, 0.0);
  const auto big = khinchin::perturbed::phi3(1e6, sph);
  const double lim = std::sqrt(6.0 / kPi);
  c.expect(std::abs(big.value - lim) <= 1e-2,
           fmt("phi(1e6) = %.9f off the limit %.9f by more than 1e-2",
               big.value, lim));
  c.expect(big.certified, "large-s evaluation not certified");
  const auto direct = khinchin::specialfn::phi0(1e6, 1e-6);
  c.expect(std::abs(direct.value - big.value) <=
               direct.unc + big.uncertainty + 1e-9,
           fmt("large-s route %.12f disagrees with direct quadrature %.12f",
               big.value, direct.value));
}

// 4. The log-weighted sinc^2 integral is at or below -0.48, and the engine
//    value agrees with an independent lobe-by-lobe summation to 1e-4.
void c04_log_integral(Ctx& c) {
  const auto r = khinchin::verify::sec_der2_check();
  c.expect(r.passed(), "checker verdict is not pass: " + r.notes);
  c.expect(r.margin >= 0.0,
           fmt("value + uncertainty exceeds -0.48 (margin %.3e)", r.margin));
  const double diff = r.quantity("difference");
  c.expect(diff <= 1e-4,
           fmt("engine vs lobe-by-lobe difference %.3e > 1e-4", diff));
}

// 5. The reference min functional decreases at the left edge (derivative at
//    or below -0.02 on 20 points of [2, 2.01]) and stays at or below
//    sqrt(2) - 2e-4 on 200 log-spaced points of [2.01, 1e4].
void c05_phi0_decrease(Ctx& c) {
  for (int i = 0; i < 20; ++i) {
    const double s = 2.0 + 0.01 * i / 19.0;
    const auto d = khinchin::specialfn::phi0_prime(s);
    c.expect(d.value + d.unc <= -0.02,
             fmt("derivative %.6f at s=%.6f above -0.02", d.value, s));
  }
  const double cap = std::sqrt(2.0) - 2e-4;
  for (double s : log_grid(2.01, 1e4, 200)) {
    const auto v = khinchin::specialfn::phi0(s);
    c.expect(v.value + v.unc <= cap,
             fmt("value %.9f at s=%.6g above sqrt(2) - 2e-4", v.value, s));
  }
}

// 6. Exact sign-sum enumeration: 100 seeded random unit vectors with
//    max|a_j| <= 1/sqrt(2), n in {3..12}, all means >= 1/sqrt(2) - 1e-12.
void c06_sign_sum_sweep(Ctx& c) {
  const double floor = 1.0 / std::sqrt(2.0) - 1e-12;
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = 3 + static_cast<std::size_t>(i % 10);
    const auto a = khinchin::verify::random_unit_vector(n, 1000 + i);
    const auto m = khinchin::verify::exact_rademacher_mean(a);
    c.expect(m.value >= floor,
             fmt("mean %.15f below 1/sqrt(2) - 1e-12 (n=%zu seed=%d)",
                 m.value, n, 1000 + i));
  }
}

// 7. Sphere negative moment by the Fourier-integral route: the same vector
//    sweep stays at or below sqrt(2) + 1e-8, and the two-coordinate
//    benchmark returns sqrt(2) to 1e-8.
void c07_sphere_sweep(Ctx& c) {
  const auto sph = khinchin::dist::make_radial(RadialKind::sphere, 0.0);
  const double cap = std::sqrt(2.0) + 1e-8;
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = 3 + static_cast<std::size_t>(i % 10);
    const auto a = khinchin::verify::random_unit_vector(n, 1000 + i);
    const auto g = khinchin::verify::gf_neg_moment(a, sph);
    c.expect(g.value <= cap,
             fmt("moment %.12f above sqrt(2) + 1e-8 (n=%zu seed=%d)", g.value,
                 n, 1000 + i));
  }
  const double r = 1.0 / std::sqrt(2.0);
  const auto bench =
      khinchin::verify::gf_neg_moment(UnitVector::exact({r, r}), sph);
  c.expect(std::abs(bench.value - std::sqrt(2.0)) <= 1e-8,
           fmt("benchmark %.12f off sqrt(2) by %.3e", bench.value,
               std::abs(bench.value - std::sqrt(2.0))));
}

// 8. Perturbed mean functional for the two-point and four-point families at
//    c in {1e-5, 1e-4}: the value at every s of a 300-point log grid of
//    [2, 1e3] stays above the value at 2 minus the combined uncertainty,
//    and the uniform value/derivative deviation bounds hold with positive
//    margin on a 32-point sub-grid.
void c08_psi_stability(Ctx& c) {
  const auto grid300 = log_grid(2.0, 1e3, 300);
  const auto grid32 = log_grid(2.0, 1e3, 32);
  for (Family1D fam : {Family1D::two_point, Family1D::four_point}) {
    for (double cv : {1e-5, 1e-4}) {
      const auto d = khinchin::dist::make_perturbed_rademacher(fam, cv);
      const auto base = khinchin::perturbed::psi(2.0, d);
      for (double s : grid300) {
        const auto p = khinchin::perturbed::psi(s, d);
        c.expect(
            p.value >= base.value - (base.uncertainty + p.uncertainty),
            fmt("%s c=%.0e: psi(%.6g)=%.12f dips below psi(2)=%.12f",
                d.name.c_str(), cv, s, p.value, base.value));
      }
      const auto lv = khinchin::perturbed::lemma_psi_value_bound(d, grid32);
      c.expect(lv.passed() && lv.margin > 0.0,
               fmt("%s c=%.0e: Psi-unif margin %.3e not positive",
                   d.name.c_str(), cv, lv.margin));
      const auto ld = khinchin::perturbed::lemma_psi_deriv_bound(d, grid32);
      c.expect(ld.passed() && ld.margin > 0.0,
               fmt("%s c=%.0e: DerPsi-unif margin %.3e not positive",
                   d.name.c_str(), cv, ld.margin));
    }
  }
}

// 9. Perturbed min functional for the radius-perturbed families at c = 1e-5:
//    the bulk value and derivative deviation bounds hold on {2, 2.5, 3, 10},
//    and the closed-form Gaussian majorant at (delta=0, C0=1, m3=1,
//    theta=0.01, s=1e6) sits below sqrt(2) while dominating the evaluated
//    functional there.
void c09_phi_stability(Ctx& c) {
  const std::vector<double> grid{2.0, 2.5, 3.0, 10.0};
  for (RadialKind kind : {RadialKind::scaled, RadialKind::two_point}) {
    const auto d = khinchin::dist::make_radial(kind, 1e-5);
    const auto v = khinchin::perturbed::lemma_phi_value_bound(d, grid);
    c.expect(v.passed(),
             fmt("%s: Phi-bulk margin %.3e, verdict not pass", d.name.c_str(),
                 v.margin));
    const auto dr = khinchin::perturbed::lemma_phi_deriv_bound(d, grid);
    c.expect(dr.passed(),
             fmt("%s: Phi-der margin %.3e, verdict not pass", d.name.c_str(),
                 dr.margin));
  }
  const khinchin::perturbed::GaussBoundInput in{0.0, 1.0, 1.0, 0.01, 1e6};
  const double bound = khinchin::perturbed::gauss_tail_bound(in);
  c.expect(bound < std::sqrt(2.0),
           fmt("majorant %.9f not below sqrt(2)", bound));
  const auto sph = khinchin::dist::make_radial(RadialKind::sphere, 0.0);
  const auto ph = khinchin::perturbed::phi3(1e6, sph);
  c.expect(ph.value + ph.uncertainty <= bound,
           fmt("majorant %.9f does not dominate phi(1e6)=%.9f", bound,
               ph.value));
}

// 10. Sign-change machinery: exactly one crossing for a in {1, 1.01, 1.03};
//     the first-moment identity residual at a = 1 is at most 1e-6; every
//     lobe maximum y_m for m <= 20 lies strictly inside
//     (1/(pi (m + 1/2)), 1/(pi m)).
void c10_sign_change(Ctx& c) {
  for (double a : {1.0, 1.01, 1.03}) {
    const auto an = khinchin::verify::np_sign_change(a);
    c.expect(an.crossings == 1,
             fmt("a=%.2f: %d crossings instead of 1", a, an.crossings));
    if (a != 1.0) continue;
    c.expect(std::abs(an.moment_identity_residual) <= 1e-6,
             fmt("moment identity residual %.3e > 1e-6",
                 an.moment_identity_residual));
    c.expect(an.lobe_maxima.size() >= 20,
             fmt("only %zu lobe maxima reported", an.lobe_maxima.size()));
    for (std::size_t m = 1; m <= 20 && m <= an.lobe_maxima.size(); ++m) {
      const double y = an.lobe_maxima[m - 1];
      const double lo = 1.0 / (kPi * (m + 0.5));
      const double hi = 1.0 / (kPi * m);
      c.expect(y > lo && y < hi,
               fmt("lobe %zu maximum %.12f outside (%.12f, %.12f)", m, y, lo,
                   hi));
    }
  }
}

// 11. Method triangle: the deterministic routes (cosine-expansion mean,
//     Fourier-integral negative moment) agree with seeded Monte Carlo at
//     1e6 samples within five standard errors for 20 random vector/law
//     pairs spanning all families.
void c11_method_triangle(Ctx& c) {
  for (int i = 0; i < 10; ++i) {
    khinchin::dist::Distribution1D d;
    switch (i % 4) {
      case 0: d = khinchin::dist::rademacher(); break;
      case 1:
        d = khinchin::dist::make_perturbed_rademacher(Family1D::two_point,
                                                      1e-3);
        break;
      case 2:
        d = khinchin::dist::make_perturbed_rademacher(Family1D::noise, 1e-2);
        break;
      default:
        d = khinchin::dist::make_perturbed_rademacher(Family1D::four_point,
                                                      1e-3);
        break;
    }
    std::size_t n = 3 + static_cast<std::size_t>(i % 6);
    if (i % 4 == 3) n = std::min<std::size_t>(n, 5);  // expansion budget
    const auto a = khinchin::verify::random_unit_vector(n, 5000 + i);
    const auto det = khinchin::verify::fourier_mean(a, d);
    const auto mc = khinchin::verify::mc_mean(a, d, 1'000'000, 7000 + i);
    const double gap = std::abs(det.value - mc.value);
    const double allow = 5.0 * mc.stderr_or_bound + det.stderr_or_bound;
    c.expect(gap <= allow,
             fmt("line pair %d (%s, n=%zu): |det-mc|=%.3e > %.3e", i,
                 d.name.c_str(), n, gap, allow));
  }
  for (int i = 0; i < 10; ++i) {
    khinchin::dist::RadialDist3D d;
    switch (i % 3) {
      case 0: d = khinchin::dist::make_radial(RadialKind::sphere, 0.0); break;
      case 1: d = khinchin::dist::make_radial(RadialKind::scaled, 1e-3); break;
      default:
        d = khinchin::dist::make_radial(RadialKind::two_point, 1e-3);
        break;
    }
    const std::size_t n = 2 + static_cast<std::size_t>(i % 5);
    const auto a = khinchin::verify::random_unit_vector(n, 6000 + i);
    const auto det = khinchin::verify::gf_neg_moment(a, d);
    const auto mc = khinchin::verify::mc_neg_moment(a, d, 1'000'000, 8000 + i);
    const double gap = std::abs(det.value - mc.value);
    const double allow = 5.0 * mc.stderr_or_bound + det.stderr_or_bound;
    c.expect(gap <= allow,
             fmt("radial pair %d (%s, n=%zu): |det-mc|=%.3e > %.3e", i,
                 d.name.c_str(), n, gap, allow));
  }
}

// 12. Regime pipeline: passes for the exact sphere (distance 0) and for the
//     symbolic distance override 1e-38 (pure arithmetic on the bound
//     expressions), and fails transparently -- a fail verdict with finite
//     negative margin and the per-regime terms reported -- at 1e-3.
void c12_regime_pipeline(Ctx& c) {
  const auto sph = khinchin::dist::make_radial(RadialKind::sphere, 0.0);
  const auto base = khinchin::perturbed::regime_pipeline(sph);
  c.expect(base.passed() && base.margin >= 0.0,
           fmt("distance 0: verdict not pass (margin %.3e)", base.margin));
  const auto tiny = khinchin::perturbed::regime_pipeline(sph, 1e-38);
  c.expect(tiny.passed() && tiny.margin >= 0.0,
           fmt("override 1e-38: verdict not pass (margin %.3e)", tiny.margin));
  const auto big = khinchin::perturbed::regime_pipeline(sph, 1e-3);
  c.expect(big.verdict == Verdict::fail,
           "override 1e-3: expected a fail verdict, not pass/rejected");
  c.expect(std::isfinite(big.margin) && big.margin < 0.0,
           fmt("override 1e-3: margin %.3e not finite-negative", big.margin));
  c.expect(!big.computed.empty() && !big.notes.empty(),
           "override 1e-3: failure lacks the per-regime breakdown");
  c.expect(big.quantity("margin_moderate") < 0.0,
           "override 1e-3: the moderate-s regime should be the one violated");
}

struct Criterion {
  const char* name;
  double budget_s;
  void (*run)(Ctx&);
};

}  // namespace

int main() {
  const Criterion criteria[] = {
      {"reference mean functional: three routes agree on [1, 1e3]", 10.0,
       c01_psi0_routes},
      {"reference derivative floor 0.01785 on [2, 3]", 5.0, c02_deriv_floor},
      {"reference min functional: anchors and the large-s limit", 30.0,
       c03_phi0_anchors},
      {"log-weighted sinc^2 integral vs independent lobe sum", 10.0,
       c04_log_integral},
      {"reference min functional decreasing, capped below sqrt(2)", 60.0,
       c05_phi0_decrease},
      {"exact sign-sum enumeration sweep, 100 unit vectors", 60.0,
       c06_sign_sum_sweep},
      {"sphere negative-moment sweep, 100 unit vectors", 120.0,
       c07_sphere_sweep},
      {"perturbed mean functional: monotone + uniform bounds", 300.0,
       c08_psi_stability},
      {"perturbed min functional: deviation bounds + majorant", 300.0,
       c09_phi_stability},
      {"single sign change, moment identity, lobe brackets", 60.0,
       c10_sign_change},
      {"method triangle: deterministic vs Monte Carlo at 5 sigma", 300.0,
       c11_method_triangle},
      {"regime pipeline: 0 and 1e-38 pass, 1e-3 fails transparently", 5.0,
       c12_regime_pipeline},
  };
  const int total = static_cast<int>(std::size(criteria));
  std::printf("khinchin-lab acceptance: %d criteria\n", total);

  int failures = 0;
  for (int i = 0; i < total; ++i) {
    const auto& cr = criteria[i];
    Ctx ctx;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      cr.run(ctx);
    } catch (const std::exception& e) {
      ctx.expect(false, std::string("unexpected exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    if (secs > cr.budget_s)
      ctx.expect(false, fmt("runtime %.1f s exceeds the %.0f s budget", secs,
                            cr.budget_s));
    std::printf("[%2d/%d] %s  %6.1f s / %3.0f s  %s\n", i + 1, total,
                ctx.ok ? "PASS" : "FAIL", secs, cr.budget_s, cr.name);
    for (const auto& note : ctx.notes)
      std::printf("        - %s\n", note.c_str());
    if (!ctx.ok) ++failures;
  }

  if (failures == 0)
    std::printf("acceptance: all %d criteria passed\n", total);
  else
    std::printf("acceptance: %d of %d criteria FAILED\n", failures, total);
  return failures == 0 ? 0 : 1;
}
