#pragma once

// End-to-end verification of the two sharp inequalities.
//
// Four independent evaluation routes for the first absolute moment of a
// weighted sum (exact enumeration, Fourier representation, Monte Carlo) and
// for the negative first moment of a weighted sum of random 3-vectors
// (sine-integral product representation, Monte Carlo), plus the AM-GM and
// Hölder interpolation bounds that sit between the two sides of each
// inequality.  On top of those sit:
//
//   * verify_szarek / verify_ball — compare one coefficient vector against
//     the sharp two-coordinate benchmark, with hypothesis checks, the
//     interpolation bound, and stochastic corroboration in one report;
//   * the sign-change analysis of the distribution-function pair (F_a, G)
//     behind the improved three-dimensional bound, with per-lobe root
//     isolation and a moment-identity residual as a global consistency check;
//   * checks for the scalar inequalities the sharp constants rest on
//     (derivative floors, Lipschitz bounds, monotone envelopes);
//   * certify_all — one driver that runs every lemma-level check over a set
//     of perturbed laws and returns the full list of reports.
//
// Margin conventions follow report.hpp: every margin is widened by the
// rigorous uncertainty envelopes before the verdict is taken, and the
// direction of widening is chosen so that a mathematically sharp case (the
// benchmark vector itself, or the majorant at its point of tangency) passes
// rather than fails on roundoff.  Such widenings are called out in the notes.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "khinchin/dist.hpp"
#include "khinchin/perturbed.hpp"
#include "khinchin/quad.hpp"
#include "khinchin/report.hpp"
#include "khinchin/rng.hpp"
#include "khinchin/specialfn.hpp"

namespace khinchin::verify {

using dist::Distribution1D;
using dist::RadialDist3D;
using dist::UnitVector;
using report::LemmaReport;
using report::Quantity;
using report::Verdict;
using specialfn::kPi;

// ---------------------------------------------------------------------------
// Estimates.

enum class Method { exact_enumeration, monte_carlo, fourier_rep, gorin_favorov };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::exact_enumeration: return "exact_enumeration";
    case Method::monte_carlo: return "monte_carlo";
    case Method::fourier_rep: return "fourier_rep";
    default: return "gorin_favorov";
  }
}

struct MomentEstimate {
  double value = 0.0;
  // Rigorous envelope for deterministic routes; one standard error for MC.
  double stderr_or_bound = 0.0;
  Method method = Method::monte_carlo;
  // Patterns enumerated / samples drawn / quadrature cutoff, by method.
  double n_samples_or_cutoff = 0.0;
  std::uint64_t seed = 0;     // Monte Carlo only
  std::size_t resampled = 0;  // zero-norm redraws (negative moments only)
  bool tolerance_met = true;  // false if a quadrature capped its budget
};

// Result of the sign-change analysis of y -> F_a(y) - G(y).
struct NPAnalysis {
  double a_param = 1.0;
  double y0 = std::numeric_limits<double>::quiet_NaN();  // sign-change height
  int crossings = 0;            // sign flips seen along the y-grid
  std::vector<double> lobe_maxima;  // heights y_m of lobes m = 1..20
  double moment_identity_residual = 0.0;  // int 2y(F_1 - G) dy, exact 0
};

struct CertifySummary {
  double tol = perturbed::kDefaultTol;
  std::vector<LemmaReport> reports;
  std::size_t n_pass = 0, n_fail = 0, n_rejected = 0;
  bool all_pass = false;
};

// ---------------------------------------------------------------------------
// Shared helpers.

namespace detail {

inline std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

// Nonzero coefficients, as absolute values.  All supported laws are
// symmetric, so a sign flip on a coordinate does not change the law of the
// sum; dropping exact zeros first keeps every route's cost honest.
inline std::vector<double> retained(const UnitVector& a) {
  std::vector<double> out;
  out.reserve(a.n());
  for (double x : a.coords)
    if (x != 0.0) out.push_back(std::abs(x));
  if (out.empty())
    throw std::invalid_argument("coefficient vector has no nonzero entries");
  return out;
}

// cf(x) - 1 without cancellation, using the declared product structure.
inline double cf_m1(const Distribution1D& d, double x) {
  if (!d.value_atoms.empty()) {
    double m1 = 0.0;
    for (const auto& [v, p] : d.value_atoms) {
      const double s = std::sin(0.5 * v * x);
      m1 -= 2.0 * p * s * s;
    }
    return m1;
  }
  if (d.uniform_smear > 0.0) {
    // cf = cos(x) sinc(cx) = (1 - 2 sin^2(x/2))(1 + sinc_m1(cx)).
    const double c = d.uniform_smear;
    const double s = std::sin(0.5 * x);
    const double sm1 = dist::detail::sinc_m1(c * x);
    return -2.0 * s * s * (1.0 + sm1) + sm1;
  }
  return d.cf(x) - 1.0;
}

struct FreqTerm {
  double omega = 0.0;
  double coeff = 0.0;
};

// Sort by frequency and merge terms whose frequencies are bitwise equal.
// Structured vectors (repeated coordinates) collapse exactly; generic ones
// keep all their beat frequencies.
inline void merge_terms(std::vector<FreqTerm>& ts) {
  std::sort(ts.begin(), ts.end(),
            [](const FreqTerm& x, const FreqTerm& y) { return x.omega < y.omega; });
  std::size_t w = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (w > 0 && ts[w - 1].omega == ts[i].omega)
      ts[w - 1].coeff += ts[i].coeff;
    else
      ts[w++] = ts[i];
  }
  ts.resize(w);
}

// Expand prod_j sum_i p_i cos(v_i a_j t) as sum_k c_k cos(w_k t), w_k >= 0.
// Exact product-to-sum trigonometry; throws when the term count would pass
// `budget` (the expansion is exponential in the number of distinct-magnitude
// coordinates for multi-atom laws).
inline std::vector<FreqTerm> cosine_expansion(
    const std::vector<double>& coeffs,
    const std::vector<std::pair<double, double>>& atoms, std::size_t budget) {
  std::vector<FreqTerm> cur{{0.0, 1.0}};
  for (double a : coeffs) {
    if (cur.size() > budget / (2 * atoms.size()))
      throw std::domain_error(
          "fourier_mean: cosine-expansion budget exceeded (" +
          std::to_string(cur.size() * 2 * atoms.size()) +
          " terms would be needed); use Monte Carlo for this vector");
    std::vector<FreqTerm> next;
    next.reserve(cur.size() * 2 * atoms.size());
    for (const FreqTerm& ft : cur)
      for (const auto& [v, p] : atoms) {
        const double w = v * a;
        next.push_back({std::abs(ft.omega - w), 0.5 * p * ft.coeff});
        next.push_back({ft.omega + w, 0.5 * p * ft.coeff});
      }
    merge_terms(next);
    cur = std::move(next);
  }
  return cur;
}

struct Kahan {
  double sum = 0.0, comp = 0.0;
  void add(double x) {
    const double y = x - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Route 1: exact enumeration over sign patterns (two-point law at c = 0).

// E |sum_j a_j e_j| over all 2^n sign patterns, exactly.  A Gray-code walk
// updates the running sum by one flip per pattern and enumerates only half
// the cube (global sign symmetry).  Rejects n > 26 — beyond that the walk
// costs minutes and the Fourier route is both faster and certified.
inline MomentEstimate exact_rademacher_mean(const UnitVector& a) {
  const auto coeffs = detail::retained(a);
  const std::size_t n = coeffs.size();
  if (n > 26)
    throw std::domain_error(
        "exact_rademacher_mean: enumeration budget is n <= 26 nonzero "
        "coordinates (got " +
        std::to_string(n) + "); use fourier_mean or mc_mean instead");
  const std::uint64_t half = 1ull << (n - 1);
  double running = 0.0;
  for (double c : coeffs) running += c;
  detail::Kahan acc;
  acc.add(std::abs(running));
  std::uint64_t gray = 0;
  for (std::uint64_t i = 1; i < half; ++i) {
    const std::uint64_t g = i ^ (i >> 1);
    const std::uint64_t bit = g ^ gray;
    gray = g;
    const std::size_t j = static_cast<std::size_t>(std::countr_zero(bit)) + 1;
    running += (g & bit) ? -2.0 * coeffs[j] : 2.0 * coeffs[j];
    if ((i & 0xFFF) == 0) {
      // Periodic exact resync kills the O(i * eps) drift of the update walk.
      running = coeffs[0];
      for (std::size_t k = 1; k < n; ++k)
        running += (gray >> (k - 1)) & 1 ? -coeffs[k] : coeffs[k];
    }
    acc.add(std::abs(running));
  }
  MomentEstimate e;
  e.value = acc.sum / static_cast<double>(half);
  e.stderr_or_bound = 0.0;
  e.method = Method::exact_enumeration;
  e.n_samples_or_cutoff = std::ldexp(1.0, static_cast<int>(n));
  return e;
}

// ---------------------------------------------------------------------------
// Route 2: Fourier representation of the first absolute moment.

// E |sum_j a_j X_j| = (2/pi) int_0^inf (1 - prod_j cf(a_j t)) t^-2 dt.
// The oscillatory tail is priced exactly: for discrete |X| the product is
// expanded into cosines (known mean and running-integral bound), and for the
// uniform-smear family the product obeys a global power-law envelope.
inline MomentEstimate fourier_mean(const UnitVector& a, const Distribution1D& d,
                                   double tol = perturbed::kDefaultTol) {
  const auto coeffs = detail::retained(a);
  const double pref = 2.0 / kPi;

  quad::Integrand f;
  f.eval = [&d, &coeffs](double t) {
    // Stable near 0: 1 - prod(1 + m_j) = -expm1(sum log1p(m_j)).
    double sum_log = 0.0;
    bool small = true;
    for (double aj : coeffs) {
      const double m1 = detail::cf_m1(d, aj * t);
      if (!(std::abs(m1) < 0.5)) {
        small = false;
        break;
      }
      sum_log += std::log1p(m1);
    }
    if (small) return -std::expm1(sum_log) / (t * t);
    double prod = 1.0;
    for (double aj : coeffs) prod *= 1.0 + detail::cf_m1(d, aj * t);
    return (1.0 - prod) / (t * t);
  };

  quad::PeriodicStructure ps;
  ps.power = 2.0;
  double omega_max = 0.0;
  if (!d.value_atoms.empty()) {
    const auto terms =
        detail::cosine_expansion(coeffs, d.value_atoms, std::size_t{1} << 22);
    double mean_prod = 0.0;
    double runint = 0.0;
    for (const auto& ft : terms) {
      if (ft.omega == 0.0)
        mean_prod += ft.coeff;
      else
        runint += std::abs(ft.coeff) / ft.omega;
      omega_max = std::max(omega_max, ft.omega);
    }
    if (omega_max == 0.0) omega_max = 1.0;  // fully resonant: constant product
    ps.known_mean = 1.0 - mean_prod;
    // |int_A^B (w - mean)| <= 2 sum |c_k| / w_k; the factor 1 + 1e-9 absorbs
    // the rounding drift of the accumulated beat frequencies.
    ps.known_runint = 2.0 * runint * (1.0 + 1e-9);
    ps.period = 2.0 * kPi / omega_max;  // cutoff anchor only (known route)
  } else if (d.uniform_smear > 0.0) {
    // |prod cf(a_j t)| <= prod (c a_j t)^-1 globally.
    double amp = 1.0;
    for (double aj : coeffs) amp *= 1.0 / (d.uniform_smear * aj);
    ps.known_mean = 1.0;
    ps.envelope_decay =
        quad::TailModel{amp, static_cast<double>(coeffs.size())};
    double scale = 0.0;
    for (double aj : coeffs) scale += aj;
    omega_max = (1.0 + d.uniform_smear) * scale;
    ps.period = 2.0 * kPi / omega_max;
  } else {
    throw std::invalid_argument(
        "fourier_mean: law '" + d.name +
        "' declares no product structure for the oscillatory tail");
  }
  f.period_hint = kPi / (2.0 * omega_max);
  f.periodic = ps;

  const auto q = quad::integrate_semi_infinite(f, tol / pref);
  MomentEstimate e;
  e.value = pref * q.value;
  e.stderr_or_bound = pref * q.total_uncertainty();
  e.method = Method::fourier_rep;
  e.n_samples_or_cutoff = q.cutoff;
  e.tolerance_met = q.status == quad::QuadStatus::ok;
  return e;
}

// ---------------------------------------------------------------------------
// Route 3: sine-integral product representation of the negative moment.

// E |sum_j a_j Xi_j|^{-1} = (2/pi) int_0^inf prod_j cf_radial(a_j u) du for
// independent rotation-invariant 3-vectors Xi_j.  For one coordinate the
// moment is the exact atom sum E R^{-1} / |a_1|; for two, the product of two
// sine integrals is expanded into cosines (the plain |product| <= C0^2/(a1 a2
// u^2) envelope certifies 1e-8 only past cutoffs ~1e8, far outside the panel
// budget); for three or more the product envelope prod_j C0/(a_j u) decays
// fast enough to price the tail directly.
inline MomentEstimate gf_neg_moment(const UnitVector& a, const RadialDist3D& d,
                                    double tol = perturbed::kDefaultTol) {
  const auto coeffs = detail::retained(a);
  const std::size_t n = coeffs.size();
  const double pref = 2.0 / kPi;
  if (!(d.decay_C0 > 0.0) || !std::isfinite(d.decay_C0))
    throw std::invalid_argument(
        "gf_neg_moment: radial law must declare a finite decay constant");

  if (n == 1) {
    if (d.radius_atoms.empty())
      throw std::domain_error(
          "gf_neg_moment: a single coordinate with only the decay bound is "
          "not integrable; an exact atomic radius law is required");
    // int_0^inf sinc(alpha u) du = pi / (2 alpha) termwise, so the moment is
    // the exact atom sum E R^{-1} / |a_1|.
    MomentEstimate e;
    for (const auto& [r, p] : d.radius_atoms) e.value += p / (r * coeffs[0]);
    e.stderr_or_bound = 4.0 * std::numeric_limits<double>::epsilon() * e.value;
    e.method = Method::gorin_favorov;
    e.n_samples_or_cutoff = 0.0;
    return e;
  }

  quad::Integrand f;
  f.eval = [&d, &coeffs](double u) {
    double prod = 1.0;
    for (double aj : coeffs) prod *= d.cf_radial(aj * u);
    return prod;
  };

  double r_max = 1.0;
  if (!d.radius_atoms.empty()) {
    r_max = 0.0;
    for (const auto& [r, p] : d.radius_atoms) r_max = std::max(r_max, r);
  }
  double scale = 0.0;
  for (double aj : coeffs) scale += aj;
  f.period_hint = kPi / (2.0 * r_max * scale);

  // Global product envelope |f(u)| <= prod_j (C0 / a_j) u^-n, all u > 0.
  double amp = 1.0;
  for (double aj : coeffs) amp *= d.decay_C0 / aj;
  f.tail_model = quad::TailModel{amp, static_cast<double>(n)};

  if (n == 2 && !d.radius_atoms.empty()) {
    // u^2 f(u) = [sum_i p_i sin(r_i a_1 u)/(r_i a_1)]
    //          * [sum_k p_k sin(r_k a_2 u)/(r_k a_2)]
    // expands via sin A sin B = (cos(A-B) - cos(A+B))/2.
    std::vector<detail::FreqTerm> terms;
    terms.reserve(2 * d.radius_atoms.size() * d.radius_atoms.size());
    for (const auto& [r1, p1] : d.radius_atoms)
      for (const auto& [r2, p2] : d.radius_atoms) {
        const double al = r1 * coeffs[0], be = r2 * coeffs[1];
        const double c = p1 * p2 / (2.0 * al * be);
        terms.push_back({std::abs(al - be), c});
        terms.push_back({al + be, -c});
      }
    detail::merge_terms(terms);
    double mean = 0.0, runint = 0.0, omega_max = 1.0;
    for (const auto& ft : terms) {
      if (ft.omega == 0.0)
        mean += ft.coeff;
      else
        runint += std::abs(ft.coeff) / ft.omega;
      omega_max = std::max(omega_max, ft.omega);
    }
    quad::PeriodicStructure ps;
    ps.power = 2.0;
    ps.known_mean = mean;
    ps.known_runint = 2.0 * runint * (1.0 + 1e-9);
    ps.period = 2.0 * kPi / omega_max;
    f.periodic = ps;
  }

  const auto q = quad::integrate_semi_infinite(f, tol / pref);
  MomentEstimate e;
  e.value = pref * q.value;
  e.stderr_or_bound = pref * q.total_uncertainty();
  e.method = Method::gorin_favorov;
  e.n_samples_or_cutoff = q.cutoff;
  e.tolerance_met = q.status == quad::QuadStatus::ok;
  return e;
}

// ---------------------------------------------------------------------------
// Route 4: Monte Carlo.

namespace detail {

inline void require_mc_size(std::size_t n_samples) {
  if (n_samples < 1000)
    throw std::invalid_argument(
        "Monte Carlo needs at least 1e3 samples (got " +
        std::to_string(n_samples) + ")");
}

}  // namespace detail

// Plain Monte Carlo for E |sum_j a_j X_j|.  Deterministic for a given seed:
// samples are drawn in fixed chunks whose sub-seeds come from one splitmix
// stream.
inline MomentEstimate mc_mean(const UnitVector& a, const Distribution1D& d,
                              std::size_t n_samples = 1'000'000,
                              std::uint64_t seed = 0x9e3779b97f4a7c15ull) {
  detail::require_mc_size(n_samples);
  std::vector<double> coeffs;
  for (double x : a.coords)
    if (x != 0.0) coeffs.push_back(x);
  const std::size_t n = coeffs.size();
  Rng seeder(seed);
  const std::size_t chunk = std::max<std::size_t>(1024, 262144 / std::max(n, std::size_t{1}));
  detail::Kahan sum, sumsq;
  std::size_t done = 0;
  while (done < n_samples) {
    const std::size_t k = std::min(chunk, n_samples - done);
    const auto xs = d.sample(k * n, seeder.next_u64());
    for (std::size_t i = 0; i < k; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += coeffs[j] * xs[i * n + j];
      const double v = std::abs(s);
      sum.add(v);
      sumsq.add(v * v);
    }
    done += k;
  }
  const double N = static_cast<double>(n_samples);
  const double mean = sum.sum / N;
  const double var =
      std::max(0.0, (sumsq.sum / N - mean * mean)) * N / (N - 1.0);
  MomentEstimate e;
  e.value = mean;
  e.stderr_or_bound = std::sqrt(var / N);
  e.method = Method::monte_carlo;
  e.n_samples_or_cutoff = N;
  e.seed = seed;
  return e;
}

// Monte Carlo for E |sum_j a_j Xi_j|^{-1} over random 3-vectors.  A sample
// whose vector sum is exactly zero (possible for atomic radius laws on
// antipodal draws, probability 0) is redrawn from a reserve stream and
// counted in `resampled`.
inline MomentEstimate mc_neg_moment(const UnitVector& a, const RadialDist3D& d,
                                    std::size_t n_samples = 1'000'000,
                                    std::uint64_t seed = 0x9e3779b97f4a7c15ull) {
  detail::require_mc_size(n_samples);
  std::vector<double> coeffs;
  for (double x : a.coords)
    if (x != 0.0) coeffs.push_back(x);
  const std::size_t n = coeffs.size();
  Rng seeder(seed);
  Rng reserve(seed ^ 0xd1b54a32d192ed03ull);
  const std::size_t chunk = std::max<std::size_t>(1024, 262144 / std::max(n, std::size_t{1}));
  detail::Kahan sum, sumsq;
  std::size_t done = 0, resampled = 0;
  while (done < n_samples) {
    const std::size_t k = std::min(chunk, n_samples - done);
    const auto pts = d.sample3d(k * n, seeder.next_u64());
    for (std::size_t i = 0; i < k; ++i) {
      double sx = 0.0, sy = 0.0, sz = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const auto& p = pts[i * n + j];
        sx += coeffs[j] * p[0];
        sy += coeffs[j] * p[1];
        sz += coeffs[j] * p[2];
      }
      double norm = std::sqrt(sx * sx + sy * sy + sz * sz);
      while (norm == 0.0) {
        ++resampled;
        double rx = 0.0, ry = 0.0, rz = 0.0;
        const auto redraw = d.sample3d(n, reserve.next_u64());
        for (std::size_t j = 0; j < n; ++j) {
          rx += coeffs[j] * redraw[j][0];
          ry += coeffs[j] * redraw[j][1];
          rz += coeffs[j] * redraw[j][2];
        }
        norm = std::sqrt(rx * rx + ry * ry + rz * rz);
      }
      const double v = 1.0 / norm;
      sum.add(v);
      sumsq.add(v * v);
    }
    done += k;
  }
  const double N = static_cast<double>(n_samples);
  const double mean = sum.sum / N;
  const double var =
      std::max(0.0, (sumsq.sum / N - mean * mean)) * N / (N - 1.0);
  MomentEstimate e;
  e.value = mean;
  e.stderr_or_bound = std::sqrt(var / N);
  e.method = Method::monte_carlo;
  e.n_samples_or_cutoff = N;
  e.seed = seed;
  e.resampled = resampled;
  return e;
}

// ---------------------------------------------------------------------------
// Interpolation bounds between the two sides of each inequality.

// AM-GM lower bound: E |sum a_j X_j| >= sum_j a_j^2 Psi(a_j^{-2}).
inline MomentEstimate amgm_lower_bound(const UnitVector& a,
                                       const Distribution1D& d,
                                       double tol = perturbed::kDefaultTol) {
  const auto coeffs = detail::retained(a);
  MomentEstimate e;
  e.method = Method::fourier_rep;
  for (double aj : coeffs) {
    const auto p = perturbed::psi(1.0 / (aj * aj), d, tol);
    e.value += aj * aj * p.value;
    e.stderr_or_bound += aj * aj * p.uncertainty;
    e.tolerance_met = e.tolerance_met && p.certified;
  }
  e.n_samples_or_cutoff = static_cast<double>(coeffs.size());
  return e;
}

// Hölder upper bound: E |sum a_j Xi_j|^{-1} <= prod_j Phi(a_j^{-2})^{a_j^2}.
// Requires every a_j^{-2} >= 2, i.e. the small-coefficient regime.
inline MomentEstimate holder_upper_bound(const UnitVector& a,
                                         const RadialDist3D& d,
                                         double tol = perturbed::kDefaultTol) {
  const auto coeffs = detail::retained(a);
  for (double aj : coeffs)
    if (!(aj <= 1.0 / std::sqrt(2.0) + 1e-12))
      throw std::domain_error(
          "holder_upper_bound: coefficient " + detail::fmt(aj) +
          " is outside the small-coefficient regime (needs a_j^{-2} >= 2)");
  double log_sum = 0.0, rel_unc = 0.0;
  bool certified = true;
  for (double aj : coeffs) {
    const double s = std::max(2.0, 1.0 / (aj * aj));
    const auto p = perturbed::phi3(s, d, tol);
    log_sum += aj * aj * std::log(p.value);
    rel_unc += aj * aj * p.uncertainty / p.value;
    certified = certified && p.certified;
  }
  MomentEstimate e;
  e.value = std::exp(log_sum);
  e.stderr_or_bound = e.value * rel_unc * 1.0000001 + 1e-300;
  e.method = Method::gorin_favorov;
  e.n_samples_or_cutoff = static_cast<double>(coeffs.size());
  e.tolerance_met = certified;
  return e;
}

// ---------------------------------------------------------------------------
// Random coefficient vectors (for sweeps and cross-method tests).

// Gaussian direction, normalized; with small_coeff, rejection-sampled until
// max |a_j| <= 1/sqrt(2).  For n = 2 the small-coefficient set is the single
// balanced vector, which is returned directly.
inline UnitVector random_unit_vector(std::size_t n, std::uint64_t seed,
                                     bool small_coeff = true) {
  if (n < 2)
    throw std::invalid_argument("random_unit_vector: need n >= 2");
  if (n == 2 && small_coeff) {
    const double r = 1.0 / std::sqrt(2.0);
    return UnitVector::normalized({r, r});
  }
  Rng rng(seed);
  std::vector<double> c(n);
  for (;;) {
    for (double& x : c) x = rng.gaussian();
    double n2 = 0.0;
    for (double x : c) n2 += x * x;
    if (!(n2 > 0.0)) continue;
    const double inv = 1.0 / std::sqrt(n2);
    double mx = 0.0;
    for (double& x : c) {
      x *= inv;
      mx = std::max(mx, std::abs(x));
    }
    if (!small_coeff || mx <= 1.0 / std::sqrt(2.0)) break;
  }
  return UnitVector::normalized(std::move(c));
}

// ---------------------------------------------------------------------------
// Single-vector verdicts for the two sharp inequalities.

// E |sum a_j X_j| >= Psi(2) = E |(X_1 + X_2)/sqrt(2)| in the
// small-coefficient regime.  The report carries the hypothesis check, the
// AM-GM intermediate bound, and Monte Carlo corroboration.  Outside the
// small-coefficient regime the two-point law still satisfies the convexity
// bound E |sum| >= max |a_j|, which is checked instead; other laws are
// rejected there.
inline LemmaReport verify_szarek(const UnitVector& a, const Distribution1D& d,
                                 double tol = perturbed::kDefaultTol,
                                 std::size_t mc_samples = 1'000'000,
                                 std::uint64_t seed = 0x9e3779b97f4a7c15ull) {
  LemmaReport r;
  r.lemma_id = "mainS";
  r.inputs = "dist=" + d.name + " n=" + std::to_string(a.n()) +
             " max|a|=" + detail::fmt(a.max_abs());
  const auto hyp = dist::check_thm1_hypothesis(d);
  r.notes = std::string("hypothesis assump-S ") + report::to_string(hyp.verdict);
  if (!hyp.passed())
    r.notes += "; hypothesis not satisfied, inequality checked empirically";

  if (!a.small_coeff()) {
    if (!d.w2_exactly_zero) {
      r.verdict = Verdict::rejected;
      r.notes +=
          "; rejected: outside the small-coefficient regime the sharp "
          "benchmark comparison applies only to the unperturbed two-point law";
      return r;
    }
    // Trivial regime: convexity in each coordinate gives E|sum| >= max|a_j|.
    const std::size_t nz = detail::retained(a).size();
    const MomentEstimate est = nz <= 26
                                   ? exact_rademacher_mean(a)
                                   : fourier_mean(a, d, tol);
    r.paper_bound = a.max_abs();
    r.margin = est.value - r.paper_bound + est.stderr_or_bound;
    r.verdict = r.margin >= 0.0 ? Verdict::pass : Verdict::fail;
    r.computed = {{"value", est.value, est.stderr_or_bound},
                  {"bound", r.paper_bound, 0.0}};
    r.notes += "; large-coefficient regime: convexity bound E|sum| >= max|a_j|";
    return r;
  }

  const std::size_t nz = detail::retained(a).size();
  const MomentEstimate est = (d.w2_exactly_zero && nz <= 26)
                                 ? exact_rademacher_mean(a)
                                 : fourier_mean(a, d, tol);
  const auto bench = perturbed::psi(2.0, d, tol);
  const MomentEstimate amgm = amgm_lower_bound(a, d, tol);
  const MomentEstimate mc = mc_mean(a, d, mc_samples, seed);

  r.paper_bound = bench.value;
  // Widened toward pass: equality is attained at the benchmark vector, so
  // the uncertainty envelopes are added to the margin rather than removed.
  r.margin = est.value - bench.value + est.stderr_or_bound + bench.uncertainty;
  r.notes += "; margin widened toward pass (equality holds at the benchmark "
             "vector); primary route " + std::string(to_string(est.method));
  bool ok = r.margin >= 0.0;
  if (std::abs(est.value - mc.value) >
      5.0 * mc.stderr_or_bound + est.stderr_or_bound) {
    ok = false;
    r.notes += "; stochastic corroboration FAILED (|value - mc| > 5 sigma)";
  }
  if (amgm.value - amgm.stderr_or_bound >
      est.value + est.stderr_or_bound + 1e-12) {
    ok = false;
    r.notes += "; AM-GM intermediate bound exceeds the value (inconsistent)";
  }
  if (!est.tolerance_met || !bench.certified) r.notes += "; tolerance not met";
  r.verdict = ok ? Verdict::pass : Verdict::fail;
  r.computed = {{"value", est.value, est.stderr_or_bound},
                {"benchmark", bench.value, bench.uncertainty},
                {"amgm", amgm.value, amgm.stderr_or_bound},
                {"mc", mc.value, mc.stderr_or_bound},
                {"w2", hyp.quantity("w2_rademacher"), 0.0}};
  return r;
}

// E |sum a_j Xi_j|^{-1} <= Phi(2) = E |(Xi_1 + Xi_2)/sqrt(2)|^{-1} in the
// small-coefficient regime, with the Hölder intermediate bound and Monte
// Carlo corroboration.  Vectors outside the regime are rejected.
inline LemmaReport verify_ball(const UnitVector& a, const RadialDist3D& d,
                               double tol = perturbed::kDefaultTol,
                               std::size_t mc_samples = 1'000'000,
                               std::uint64_t seed = 0x9e3779b97f4a7c15ull) {
  LemmaReport r;
  r.lemma_id = "mainB";
  r.inputs = "dist=" + d.name + " n=" + std::to_string(a.n()) +
             " max|a|=" + detail::fmt(a.max_abs());
  const auto hyp = dist::check_thm2_hypothesis(d);
  r.notes = std::string("hypothesis assump-B ") + report::to_string(hyp.verdict);
  if (!hyp.passed())
    r.notes += "; hypothesis not satisfied, inequality checked empirically";

  if (!a.small_coeff()) {
    r.verdict = Verdict::rejected;
    r.notes += "; rejected: outside the small-coefficient regime (needs "
               "max|a| <= 1/sqrt(2))";
    return r;
  }

  const MomentEstimate est = gf_neg_moment(a, d, tol);
  const auto bench = perturbed::phi3(2.0, d, tol);
  const MomentEstimate holder = holder_upper_bound(a, d, tol);
  const MomentEstimate mc = mc_neg_moment(a, d, mc_samples, seed);

  r.paper_bound = bench.value;
  r.margin = bench.value - est.value + est.stderr_or_bound + bench.uncertainty;
  r.notes += "; margin widened toward pass (equality holds at the benchmark "
             "vector)";
  bool ok = r.margin >= 0.0;
  if (std::abs(est.value - mc.value) >
      5.0 * mc.stderr_or_bound + est.stderr_or_bound) {
    ok = false;
    r.notes += "; stochastic corroboration FAILED (|value - mc| > 5 sigma)";
  }
  if (est.value - est.stderr_or_bound >
      holder.value + holder.stderr_or_bound + 1e-12) {
    ok = false;
    r.notes += "; value exceeds the Holder intermediate bound (inconsistent)";
  }
  if (!est.tolerance_met || !bench.certified) r.notes += "; tolerance not met";
  r.verdict = ok ? Verdict::pass : Verdict::fail;
  r.computed = {{"value", est.value, est.stderr_or_bound},
                {"benchmark", bench.value, bench.uncertainty},
                {"holder", holder.value, holder.stderr_or_bound},
                {"mc", mc.value, mc.stderr_or_bound},
                {"w2", hyp.quantity("w2_sphere"), 0.0},
                {"resampled", static_cast<double>(mc.resampled), 0.0}};
  return r;
}

// ---------------------------------------------------------------------------
// Sign-change analysis of the distribution-function pair (F_a, G).
//
// G(y) is the Lebesgue measure of {x > 0 : |sin(pi x)|/(pi x) > y}; it is the
// width of the main arch plus one interval per side lobe.  F_a(y) =
// sqrt((2/(pi a)) ln(1/y)) is the Gaussian comparison level set.  For
// a in [1, pi/3] the difference F_a - G changes sign exactly once on (0, 1);
// the analysis isolates every lobe root by bisection and certifies the sign
// at the left end of the grid analytically.

namespace detail {

struct Lobe {
  double x_star = 0.0;  // peak location in [m, m+1]
  double y_m = 0.0;     // peak height
};

// Peak of sin(pi(x - m))/(pi x) on [m, m+1]: stationarity is
// tan(theta) = theta + pi m with x = m + theta/pi, theta in (0, pi/2).
inline Lobe lobe_peak(int m) {
  double lo = 0.0, hi = kPi / 2.0;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    (std::tan(mid) - mid - kPi * m < 0.0 ? lo : hi) = mid;
  }
  const double theta = 0.5 * (lo + hi);
  Lobe L;
  L.x_star = m + theta / kPi;
  L.y_m = std::sin(theta) / (kPi * L.x_star);
  return L;
}

// Root of |sin(pi x)|/(pi x) = y on the main arch (0, 1), where the function
// decreases strictly from 1 to 0.
inline double arch_root(double y) {
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    (dist::detail::sinc(kPi * mid) > y ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Root of sin(pi(x - m))/(pi x) = y on the rising ([m, x*]) or falling
// ([x*, m+1]) flank of lobe m; requires y < y_m.
inline double lobe_root(int m, const Lobe& L, double y, bool rising) {
  double lo = rising ? static_cast<double>(m) : L.x_star;
  double hi = rising ? L.x_star : static_cast<double>(m + 1);
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double h = std::sin(kPi * (mid - m)) / (kPi * mid);
    if (rising)
      (h < y ? lo : hi) = mid;
    else
      (h < y ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

// G(y) assembled from the precomputed lobe peaks (heights decrease in m, so
// the scan stops at the first lobe below y).
inline double G_value(double y, const std::vector<Lobe>& lobes) {
  double total = arch_root(y);
  for (std::size_t m = 0; m < lobes.size(); ++m) {
    const Lobe& L = lobes[m];
    if (L.y_m <= y) break;
    const int mm = static_cast<int>(m) + 1;
    total += lobe_root(mm, L, y, false) - lobe_root(mm, L, y, true);
  }
  return total;
}

inline double F_value(double a, double y) {
  if (y >= 1.0) return 0.0;
  return std::sqrt(2.0 / (kPi * a) * std::log(1.0 / y));
}

// Analytic lower bound for G(y): within lobe m the hump dominates
// sin(pi(x-m))/(pi(m+1)), whose super-level set at height y has width
// 1 - (2/pi) asin(min(1, pi(m+1)y)).  Summing the first 100 lobes certifies
// G(e^-20) >= 99.9 while F_a(e^-20) <= sqrt(40/pi) < 4 for a >= 1, fixing
// the sign of F - G at the left anchor without evaluating ~1e8 lobes.
inline double G_lower_certificate(double y) {
  double s = 0.0;
  for (int m = 1; m <= 100; ++m) {
    const double u = std::min(1.0, kPi * (m + 1) * y);
    s += std::max(0.0, 1.0 - (2.0 / kPi) * std::asin(u));
  }
  return s;
}

// Both sides of the second-moment identity int_0^1 2y F_1 dy = int_0^inf g^2
// dx (each equals 1/2 exactly): the layer-cake residual is a global
// consistency check on the (F, G) construction.
inline double moment_identity_residual() {
  quad::Integrand fF;
  fF.eval = [](double y) {
    if (y <= 0.0 || y >= 1.0) return 0.0;
    return 2.0 * y * std::sqrt((2.0 / kPi) * std::log(1.0 / y));
  };
  const auto qF = quad::integrate_finite(fF, 0.0, 1.0, 1e-10);

  quad::Integrand fG;
  fG.eval = [](double x) {
    const double s = dist::detail::sinc(kPi * x);
    return s * s;
  };
  fG.period_hint = 0.5;
  quad::PeriodicStructure ps;
  ps.period = 1.0;
  ps.power = 2.0;
  ps.known_mean = 1.0 / (2.0 * kPi * kPi);
  // w - mean = -cos(2 pi x)/(2 pi^2); |int_A^B| <= 2/(2 pi) * 1/(2 pi^2).
  ps.known_runint = 1.0 / (2.0 * kPi * kPi * kPi);
  fG.periodic = ps;
  const auto qG = quad::integrate_semi_infinite(fG, 1e-10);
  return qF.value - qG.value;
}

}  // namespace detail

// Scan y in (e^-20, 1) on a 10^4-point grid, count the sign changes of
// F_a - G, and refine the (-, +) bracket by bisection.  The sign at the left
// anchor is certified analytically (see G_lower_certificate).  Requires
// a in [1, pi/3], the range where the comparison is meaningful.
inline NPAnalysis np_sign_change(double a_param) {
  if (!(a_param >= 1.0 && a_param <= kPi / 3.0 + 1e-12))
    throw std::domain_error("np_sign_change: a_param " + detail::fmt(a_param) +
                            " outside [1, pi/3]");
  NPAnalysis out;
  out.a_param = a_param;

  constexpr int kGrid = 10000;
  const double y_left = std::exp(-20.0);
  const double step = (1.0 - y_left) / kGrid;
  // Lobes live while y < y_m <= 1/(pi m), so the smallest grid height fixes
  // how many peaks can matter.
  const double y_min = y_left + 0.5 * step;
  const int m_max = static_cast<int>(1.0 / (kPi * y_min)) + 2;
  std::vector<detail::Lobe> lobes;
  lobes.reserve(m_max);
  for (int m = 1; m <= m_max; ++m) lobes.push_back(detail::lobe_peak(m));
  out.lobe_maxima.reserve(20);
  for (int m = 0; m < 20 && m < m_max; ++m)
    out.lobe_maxima.push_back(lobes[m].y_m);

  // Left anchor: F - G < 0, certified without evaluating G.
  const double f_left = detail::F_value(a_param, y_left);
  if (!(f_left < detail::G_lower_certificate(y_left)))
    throw std::logic_error(
        "np_sign_change: left-anchor certificate failed (unreachable for "
        "a_param in [1, pi/3])");
  int sign_prev = -1;
  double y_prev = y_left;
  double blo = 0.0, bhi = 0.0;
  bool have_bracket = false;

  for (int k = 0; k < kGrid; ++k) {
    const double y = y_left + (k + 0.5) * step;
    const double diff =
        detail::F_value(a_param, y) - detail::G_value(y, lobes);
    const int s = diff > 0.0 ? 1 : (diff < 0.0 ? -1 : 0);
    if (s == 0) continue;
    if (s != sign_prev) {
      ++out.crossings;
      if (sign_prev < 0 && s > 0 && !have_bracket) {
        blo = y_prev;
        bhi = y;
        have_bracket = true;
      }
      sign_prev = s;
    }
    y_prev = y;
  }

  if (have_bracket) {
    double lo = blo, hi = bhi;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double diff =
          detail::F_value(a_param, mid) - detail::G_value(mid, lobes);
      (diff < 0.0 ? lo : hi) = mid;
    }
    out.y0 = 0.5 * (lo + hi);
  }

  out.moment_identity_residual = detail::moment_identity_residual();
  return out;
}

// Majorization step: sqrt(2/a) >= Phi0(s) for all s >= s0, where the pair
// (a_param, s0) must satisfy Phi0(s0) = sqrt(2/a) (tangency).  The margin is
// the worst value of sqrt(2/a) - Phi0(s) over the grid, widened toward pass
// because equality is attained at s0.
inline LemmaReport np_majorization_check(double a_param, double s0,
                                         const std::vector<double>& s_grid,
                                         double tol = 1e-9) {
  LemmaReport r;
  r.lemma_id = "sec-impr-ball";
  r.inputs = "a=" + detail::fmt(a_param) + " s0=" + detail::fmt(s0) +
             " grid_n=" + std::to_string(s_grid.size());
  if (!(a_param >= 1.0 && a_param <= kPi / 3.0 + 1e-12)) {
    r.verdict = Verdict::rejected;
    r.notes = "rejected: a_param outside [1, pi/3]";
    return r;
  }
  if (s_grid.empty())
    throw std::invalid_argument("np_majorization_check: empty s-grid");
  for (double s : s_grid)
    if (s < s0 - 1e-12)
      throw std::invalid_argument(
          "np_majorization_check: grid point " + detail::fmt(s) +
          " lies below s0 = " + detail::fmt(s0));

  const double bound = std::sqrt(2.0 / a_param);
  const auto at0 = specialfn::phi0(s0, tol);
  if (std::abs(at0.value - bound) > 1e-8 + at0.unc) {
    r.verdict = Verdict::rejected;
    r.notes = "rejected: inconsistent pair, Phi0(s0) = " +
              detail::fmt(at0.value) + " but sqrt(2/a) = " + detail::fmt(bound);
    r.computed = {{"phi0_s0", at0.value, at0.unc},
                  {"sqrt_2_over_a", bound, 0.0}};
    return r;
  }

  double min_margin = std::numeric_limits<double>::infinity();
  double worst_s = s_grid.front(), worst_v = 0.0, worst_u = 0.0;
  bool certified = true;
  for (double s : s_grid) {
    const auto v = specialfn::phi0(s, tol);
    certified = certified && v.ok;
    const double m = bound - v.value + v.unc;
    if (m < min_margin) {
      min_margin = m;
      worst_s = s;
      worst_v = v.value;
      worst_u = v.unc;
    }
  }
  r.paper_bound = bound;
  r.margin = min_margin;
  r.verdict = min_margin >= 0.0 ? Verdict::pass : Verdict::fail;
  r.notes = "margin widened toward pass (tangency at s0)";
  if (!certified) r.notes += "; tolerance not met";
  r.computed = {{"sqrt_2_over_a", bound, 0.0},
                {"phi0_s0", at0.value, at0.unc},
                {"worst_s", worst_s, 0.0},
                {"worst_phi0", worst_v, worst_u}};
  return r;
}

// ---------------------------------------------------------------------------
// Unimodal-mixture limit: (1+q) E |sum_j a_j R_j U_j|^q for q in (-1, 0),
// where R_j are the radii of the 3-vector law and U_j are independent uniform
// mixing variables.  The uniform of the largest coefficient is integrated out
// in closed form, conditionally on everything else:
//
//   (1+q) E[ |W + b U|^q | W, b ]
//       = (sgn(B) |B|^{1+q} - sgn(A) |A|^{1+q}) / (2b),  A = W - b, B = W + b,
//
// which is bounded uniformly in q.  The naive |V|^q sample mean has a
// log-divergent sampling tail as q -> -1 (the mass of E|V|^q below the
// smallest |V| an affordable run can see stays order-one), so this smoothing
// is what makes the q -> -1 limit observable at all.  The sequence trends
// toward the negative first moment; the trend is reported, not asserted.
inline std::vector<double> unimodal_limit(const UnitVector& a,
                                          const RadialDist3D& d,
                                          const std::vector<double>& q_seq,
                                          std::size_t n_samples = 1'000'000,
                                          std::uint64_t seed = 0x9e3779b97f4a7c15ull) {
  for (double q : q_seq)
    if (!(q > -1.0 && q < 0.0))
      throw std::domain_error("unimodal_limit: q = " + detail::fmt(q) +
                              " outside (-1, 0)");
  detail::require_mc_size(n_samples);
  const auto coeffs = detail::retained(a);
  const std::size_t n = coeffs.size();
  std::size_t smooth_j = 0;
  for (std::size_t j = 1; j < n; ++j)
    if (coeffs[j] > coeffs[smooth_j]) smooth_j = j;
  std::vector<double> out;
  out.reserve(q_seq.size());
  Rng master(seed);
  for (double q : q_seq) {
    const std::uint64_t sub = master.next_u64();
    Rng radius_seeder(sub);
    Rng mixer(sub ^ 0xa0761d6478bd642full);
    const std::size_t chunk = std::max<std::size_t>(1024, 262144 / n);
    const auto sgn_pow = [q](double x) {
      const double ax = std::abs(x);
      const double p = ax > 0.0 ? std::pow(ax, 1.0 + q) : 0.0;
      return x < 0.0 ? -p : p;
    };
    detail::Kahan sum;
    std::size_t done = 0;
    while (done < n_samples) {
      const std::size_t k = std::min(chunk, n_samples - done);
      const auto pts = d.sample3d(k * n, radius_seeder.next_u64());
      for (std::size_t i = 0; i < k; ++i) {
        double w = 0.0, b = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          const auto& p = pts[i * n + j];
          const double rj =
              std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
          if (j == smooth_j)
            b = coeffs[j] * rj;
          else
            w += coeffs[j] * rj * mixer.symmetric_uniform();
        }
        if (b > 0.0)
          sum.add((sgn_pow(w + b) - sgn_pow(w - b)) / (2.0 * b));
        else if (w != 0.0)
          sum.add((1.0 + q) * std::pow(std::abs(w), q));
      }
      done += k;
    }
    out.push_back(sum.sum / static_cast<double>(n_samples));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Scalar lemma checks (unperturbed special functions).

// Derivative floor on [2, 3]: Psi0'(s) >= (zeta(3) - 1)/(8 sqrt(2)).  The
// grid minimum is widened by a curvature term M h^2 / 8 with the rigorous cap
// M = 1/2 >= sup |Psi0''| on [2, 3] (the second derivative kernel
// (2/pi) |cos t|^s ln^2|cos t| / t^2 integrates below 0.52: the integrand is
// at most 0.38 on (0, 1] and at most 0.135 / t^2 beyond, since
// u ln^2 u <= 4 e^-2 on (0, 1]).  Closed-form anchors at s = 1, 2, 3 are
// folded into the verdict.
inline LemmaReport psi1_bounds_check(int grid_points = 129) {
  LemmaReport r;
  r.lemma_id = "Psi1-bounds";
  r.inputs = "s in [2,3], " + std::to_string(grid_points) + " points";
  if (grid_points < 2)
    throw std::invalid_argument("psi1_bounds_check: need >= 2 grid points");
  const double h = 1.0 / (grid_points - 1);
  double vmin = std::numeric_limits<double>::infinity();
  double argmin = 2.0, unc_at_min = 0.0;
  bool certified = true;
  for (int i = 0; i < grid_points; ++i) {
    const double s = 2.0 + i * h;
    const auto e = specialfn::psi0_prime(s);
    certified = certified && e.ok;
    if (e.value - e.unc < vmin) {
      vmin = e.value - e.unc;
      argmin = s;
      unc_at_min = e.unc;
    }
  }
  const double slack = 0.5 * h * h / 8.0;
  r.paper_bound = specialfn::kPsi0PrimeFloor;
  r.margin = vmin - r.paper_bound - slack;

  const auto p1 = specialfn::psi0(1.0);
  const auto p2 = specialfn::psi0(2.0);
  const auto p3 = specialfn::psi0(3.0);
  const double d1 = std::abs(p1.value - 2.0 / kPi);
  const double d2 = std::abs(p2.value - 1.0 / std::sqrt(2.0));
  const double d3 = std::abs(p3.value - 4.0 / (kPi * std::sqrt(3.0)));
  const bool anchors_ok = d1 <= 1e-10 + p1.unc && d2 <= 1e-10 + p2.unc &&
                          d3 <= 1e-10 + p3.unc;
  r.verdict = (r.margin >= 0.0 && anchors_ok) ? Verdict::pass : Verdict::fail;
  r.notes = "grid minimum widened by curvature slack " + detail::fmt(slack);
  if (!anchors_ok) r.notes += "; closed-form anchor mismatch";
  if (!certified) r.notes += "; tolerance not met";
  r.computed = {{"min_deriv", vmin + unc_at_min, unc_at_min},
                {"argmin_s", argmin, 0.0},
                {"curvature_slack", slack, 0.0},
                {"anchor_err_s2", d2, p2.unc},
                {"anchor_err_s3", d3, p3.unc}};
  return r;
}

// Lipschitz bound |u^s ln u - v^s ln v| <= |u - v| on (0, 1] for s >= 2,
// tested on a deterministic grid, seeded random pairs, and the derivative
// max |u^{s-1}(s ln u + 1)|.  The constant 1 is approached only as u, v -> 1,
// so the margin stays positive but small.
inline LemmaReport sulogu_check(std::uint64_t seed = 20260817ull) {
  LemmaReport r;
  r.lemma_id = "sulogu";
  const std::vector<double> s_list = {2.0, 2.01, 2.5, 3.0, 5.0, 10.0, 100.0};
  r.inputs = "s in {2,2.01,2.5,3,5,10,100}, 256-point grid + 2000 random "
             "pairs per s";
  const auto f = [](double u, double s) {
    return u >= 1.0 ? 0.0 : std::pow(u, s) * std::log(u);
  };
  double max_ratio = 0.0, max_deriv = 0.0;
  std::size_t pairs = 0;
  Rng rng(seed);
  for (double s : s_list) {
    std::vector<double> grid(256), fg(256);
    for (int i = 0; i < 256; ++i) {
      grid[i] = (i + 1) / 256.0;
      fg[i] = f(grid[i], s);
    }
    for (int i = 0; i < 256; ++i)
      for (int j = i + 1; j < 256; ++j) {
        const double ratio = std::abs(fg[j] - fg[i]) / (grid[j] - grid[i]);
        max_ratio = std::max(max_ratio, ratio);
        ++pairs;
      }
    for (int k = 0; k < 2000; ++k) {
      double u = rng.uniform(), v = rng.uniform();
      if (u == 0.0 || v == 0.0 || std::abs(u - v) < 1e-9) continue;
      const double ratio = std::abs(f(u, s) - f(v, s)) / std::abs(u - v);
      max_ratio = std::max(max_ratio, ratio);
      ++pairs;
    }
    for (int k = 1; k < 4096; ++k) {
      const double u = k / 4096.0;
      const double der =
          std::abs(std::pow(u, s - 1.0) * (s * std::log(u) + 1.0));
      max_deriv = std::max(max_deriv, der);
    }
  }
  const double max_all = std::max(max_ratio, max_deriv);
  r.paper_bound = 1.0;
  r.margin = 1.0 - max_all - 1e-12;
  r.verdict = r.margin >= 0.0 ? Verdict::pass : Verdict::fail;
  r.notes = "Lipschitz constant approaches 1 only in the u -> 1 limit, so "
            "the margin is small by nature";
  r.computed = {{"max_ratio", max_ratio, 0.0},
                {"max_deriv", max_deriv, 0.0},
                {"pairs", static_cast<double>(pairs), 0.0}};
  return r;
}

// First derivative of the radial integral at s = 2: I'(2) <= -0.48, checked
// by the certified engine and corroborated by an independent lobe-by-lobe
// fixed-rule accumulation with an explicit tail bound.
inline LemmaReport sec_der2_check(double tol = 1e-8) {
  LemmaReport r;
  r.lemma_id = "sec-der-2";
  r.inputs = "s=2, tol=" + detail::fmt(tol);
  const auto engine = specialfn::ball_I(2.0, 1, tol);

  // Independent route: sum int_{m pi}^{(m+1) pi} sinc^2(u) ln|sinc(u)| du
  // with four fixed GK panels per lobe; tail bound ln(T)+1 over T from
  // sinc^2 |ln sinc| <= ln(u)/u^2 for u >= e^{1/2}.
  constexpr int kLobes = 200000;
  const auto integrand = [](double u) {
    const double s = dist::detail::sinc(u);
    if (s == 0.0) return 0.0;
    return s * s * specialfn::log_sinc(u);
  };
  detail::Kahan sum;
  double err_est = 0.0;
  for (int m = 0; m < kLobes; ++m) {
    const double a = m * kPi;
    for (int p = 0; p < 4; ++p) {
      const auto panel = quad::detail::gk15(integrand, a + p * kPi / 4.0,
                                            a + (p + 1) * kPi / 4.0);
      sum.add(panel.value);
      err_est += panel.err;
    }
  }
  const double T = kLobes * kPi;
  const double tail = (std::log(T) + 1.0) / T;
  const double independent = sum.sum;
  const double ind_unc = err_est + tail;
  const double diff = std::abs(engine.value - independent);

  r.paper_bound = -0.48;
  r.margin = r.paper_bound - (engine.value + engine.unc);
  const bool routes_agree = diff <= 1e-4;
  r.verdict =
      (r.margin >= 0.0 && routes_agree && engine.ok) ? Verdict::pass : Verdict::fail;
  r.notes = routes_agree ? "independent lobe sum agrees within 1e-4"
                         : "independent lobe sum DISAGREES beyond 1e-4";
  if (!engine.ok) r.notes += "; tolerance not met";
  r.computed = {{"value", engine.value, engine.unc},
                {"independent", independent, ind_unc},
                {"difference", diff, 0.0},
                {"lobes", static_cast<double>(kLobes), 0.0}};
  return r;
}

// Phi0'(s) <= -0.02 on [2, 2.01].
inline LemmaReport phi0_der_check(int points = 20, double tol = 1e-9) {
  LemmaReport r;
  r.lemma_id = "Phi0-der";
  r.inputs = "s in [2,2.01], " + std::to_string(points) + " points";
  if (points < 2)
    throw std::invalid_argument("phi0_der_check: need >= 2 points");
  double min_margin = std::numeric_limits<double>::infinity();
  double worst_s = 2.0, worst_v = 0.0, worst_u = 0.0;
  bool certified = true;
  for (int i = 0; i < points; ++i) {
    const double s = 2.0 + 0.01 * i / (points - 1);
    const auto e = specialfn::phi0_prime(s, tol);
    certified = certified && e.ok;
    const double m = -0.02 - (e.value + e.unc);
    if (m < min_margin) {
      min_margin = m;
      worst_s = s;
      worst_v = e.value;
      worst_u = e.unc;
    }
  }
  r.paper_bound = -0.02;
  r.margin = min_margin;
  r.verdict = min_margin >= 0.0 ? Verdict::pass : Verdict::fail;
  if (!certified) r.notes = "tolerance not met";
  r.computed = {{"worst_s", worst_s, 0.0}, {"worst_deriv", worst_v, worst_u}};
  return r;
}

// Phi0'(s) >= -12 sqrt(s) / (pi e) on [2, 1e4] (derivative magnitude cap).
inline LemmaReport phi0_der_lb_check(
    std::vector<double> s_grid = {2.0, 2.005, 2.01, 3.0, 10.0, 100.0, 1000.0,
                                  1e4},
    double tol = 1e-9) {
  LemmaReport r;
  r.lemma_id = "Phi0-der-lb";
  if (s_grid.empty())
    throw std::invalid_argument("phi0_der_lb_check: empty grid");
  r.inputs = "s grid of " + std::to_string(s_grid.size()) +
             " points in [2, 1e4]";
  double min_margin = std::numeric_limits<double>::infinity();
  double worst_s = s_grid.front(), worst_v = 0.0, worst_u = 0.0;
  bool certified = true;
  for (double s : s_grid) {
    const auto e = specialfn::phi0_prime(s, tol);
    certified = certified && e.ok;
    const double floor = -12.0 * std::sqrt(s) / (kPi * std::exp(1.0));
    const double m = e.value - e.unc - floor;
    if (m < min_margin) {
      min_margin = m;
      worst_s = s;
      worst_v = e.value;
      worst_u = e.unc;
    }
  }
  r.paper_bound = -12.0 * std::sqrt(worst_s) / (kPi * std::exp(1.0));
  r.margin = min_margin;
  r.verdict = min_margin >= 0.0 ? Verdict::pass : Verdict::fail;
  if (!certified) r.notes = "tolerance not met";
  r.computed = {{"worst_s", worst_s, 0.0}, {"worst_deriv", worst_v, worst_u}};
  return r;
}

// Phi0(s) <= sqrt(2) - 2e-4 for s >= 2.01 (strict drop below the s = 2
// maximum), on a logarithmic grid up to 1e4.
inline LemmaReport phi0_bound_check(int points = 48, double tol = 1e-9) {
  LemmaReport r;
  r.lemma_id = "Phi0";
  r.inputs = "s log-grid [2.01, 1e4], " + std::to_string(points) + " points";
  if (points < 2)
    throw std::invalid_argument("phi0_bound_check: need >= 2 points");
  const double bound = std::sqrt(2.0) - 2e-4;
  const double l0 = std::log(2.01), l1 = std::log(1e4);
  double min_margin = std::numeric_limits<double>::infinity();
  double worst_s = 2.01, worst_v = 0.0, worst_u = 0.0;
  bool certified = true;
  for (int i = 0; i < points; ++i) {
    const double s = std::exp(l0 + (l1 - l0) * i / (points - 1));
    const auto e = specialfn::phi0(s, tol);
    certified = certified && e.ok;
    const double m = bound - e.value - e.unc;
    if (m < min_margin) {
      min_margin = m;
      worst_s = s;
      worst_v = e.value;
      worst_u = e.unc;
    }
  }
  r.paper_bound = bound;
  r.margin = min_margin;
  r.verdict = min_margin >= 0.0 ? Verdict::pass : Verdict::fail;
  r.notes = "worst point sits at the left edge, where the drop below "
            "sqrt(2) is smallest";
  if (!certified) r.notes += "; tolerance not met";
  r.computed = {{"worst_s", worst_s, 0.0}, {"worst_phi0", worst_v, worst_u}};
  return r;
}

// Sign-change certificate: F_a - G crosses zero exactly once for a in
// {1, 1.01, 1.03, pi/3}, the lobe maxima obey their analytic brackets
// 1/(pi(m + 1/2)) < y_m < 1/(pi m), and the layer-cake moment identity holds
// to 1e-6.
inline LemmaReport sec_sign_change_check() {
  LemmaReport r;
  r.lemma_id = "sec-sign-change";
  const std::vector<double> a_list = {1.0, 1.01, 1.03, kPi / 3.0};
  r.inputs = "a in {1, 1.01, 1.03, pi/3}, 1e4-point y-grid";
  bool all_single = true;
  double y0_at_1 = std::numeric_limits<double>::quiet_NaN();
  double residual = 0.0;
  double min_slack = std::numeric_limits<double>::infinity();
  std::string crossing_note;
  for (double a : a_list) {
    const auto an = np_sign_change(a);
    if (an.crossings != 1) {
      all_single = false;
      crossing_note += "; a=" + detail::fmt(a) + " has " +
                       std::to_string(an.crossings) + " crossings";
    }
    if (a == 1.0) {
      y0_at_1 = an.y0;
      residual = an.moment_identity_residual;
      for (std::size_t m = 1; m <= an.lobe_maxima.size(); ++m) {
        const double ym = an.lobe_maxima[m - 1];
        const double lo = 1.0 / (kPi * (m + 0.5));
        const double hi = 1.0 / (kPi * m);
        min_slack = std::min({min_slack, ym - lo, hi - ym});
        if (m >= 2 && !(ym < an.lobe_maxima[m - 2])) all_single = false;
      }
    }
  }
  r.paper_bound = 1e-6;
  r.margin = 1e-6 - std::abs(residual);
  r.verdict = (r.margin >= 0.0 && all_single && min_slack > 0.0)
                  ? Verdict::pass
                  : Verdict::fail;
  r.notes = "one sign change per a; lobe maxima bracketed and decreasing";
  r.notes += crossing_note;
  if (!(min_slack > 0.0)) r.notes += "; lobe bracket violated";
  r.computed = {{"residual", residual, 0.0},
                {"y0_a1", y0_at_1, 0.0},
                {"min_bracket_slack", min_slack, 0.0},
                {"a_values", static_cast<double>(a_list.size()), 0.0}};
  return r;
}

// Majorization improvement: sqrt(2/a) stays above Phi0 beyond the tangency
// point, for the tangent pair at s0 = 2.01 and for the classical pair
// (a, s0) = (1, 2).
inline LemmaReport sec_impr_ball_check(double tol = 1e-9) {
  const auto p0 = specialfn::phi0(2.01, tol);
  const double a1 = 2.0 / (p0.value * p0.value);
  std::vector<double> grid1;
  const double l0 = std::log(2.01), l1 = std::log(1e4);
  for (int i = 0; i < 40; ++i)
    grid1.push_back(std::exp(l0 + (l1 - l0) * i / 39.0));
  LemmaReport first = np_majorization_check(a1, 2.01, grid1, tol);
  const LemmaReport second =
      np_majorization_check(1.0, 2.0, {2.0, 2.5, 3.0, 10.0, 100.0}, tol);
  // Keep the worse of the two instances.
  if (second.verdict == Verdict::rejected ||
      (first.verdict != Verdict::rejected && second.margin < first.margin)) {
    LemmaReport merged = second;
    merged.notes += "; worst of 2 instances (tangent pair at s0=2.01 and "
                    "classical pair at s0=2)";
    return merged;
  }
  first.notes += "; worst of 2 instances (tangent pair at s0=2.01 and "
                 "classical pair at s0=2)";
  return first;
}

// ---------------------------------------------------------------------------
// The certify-everything driver.

namespace detail {

// Merge several instances of the same lemma over different laws: keep the
// worst margin (any rejection surfaces as-is — it signals a configuration
// problem, not a numerical verdict).
inline LemmaReport worst_of(std::vector<LemmaReport> rs) {
  for (const auto& r : rs)
    if (r.verdict == Verdict::rejected) return r;
  std::size_t pick = 0;
  for (std::size_t i = 1; i < rs.size(); ++i)
    if (rs[i].margin < rs[pick].margin) pick = i;
  LemmaReport r = std::move(rs[pick]);
  if (rs.size() > 1)
    r.notes += (r.notes.empty() ? "" : "; ") + std::string("worst of ") +
               std::to_string(rs.size()) + " instances: " + r.inputs;
  return r;
}

inline std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g;
  g.reserve(n);
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < n; ++i) g.push_back(std::exp(a + (b - a) * i / (n - 1)));
  return g;
}

}  // namespace detail

inline std::vector<Distribution1D> default_line_dists() {
  return {dist::rademacher(),
          dist::make_perturbed_rademacher(dist::Family1D::two_point, 1e-4),
          dist::make_perturbed_rademacher(dist::Family1D::four_point, 1e-3),
          dist::make_perturbed_rademacher(dist::Family1D::noise, 1e-3)};
}

inline std::vector<RadialDist3D> default_radial_dists() {
  return {dist::make_radial(dist::RadialKind::sphere),
          dist::make_radial(dist::RadialKind::scaled, 1e-5),
          dist::make_radial(dist::RadialKind::two_point, 1e-5)};
}

// Run every lemma-level check.  The scalar lemmas always run; the perturbed
// ones run over the supplied laws, with instances of the same lemma merged
// worst-of.  The regime pipelines run only on laws that satisfy their
// hypothesis (plus one synthetic deep-perturbation instance for the radial
// pipeline), since their conclusions are conditional on it.
inline CertifySummary certify_all(double tol,
                                  const std::vector<Distribution1D>& line,
                                  const std::vector<RadialDist3D>& radial) {
  CertifySummary s;
  s.tol = tol;
  auto add = [&s](LemmaReport r) { s.reports.push_back(std::move(r)); };

  add(psi1_bounds_check());
  add(sulogu_check());
  add(sec_der2_check(std::max(tol, 1e-10)));
  const double ptol = std::max(tol * 0.1, 1e-12);
  add(phi0_der_check(20, ptol));
  add(phi0_der_lb_check({2.0, 2.005, 2.01, 3.0, 10.0, 100.0, 1000.0, 1e4},
                        ptol));
  add(phi0_bound_check(48, ptol));
  add(sec_sign_change_check());
  add(sec_impr_ball_check(ptol));

  const std::vector<double> s_grid_line = {2.0, 2.5, 3.0, 5.0, 10.0};
  const std::vector<double> s_grid_radial = {2.0, 2.5, 3.0, 10.0};
  const auto t_grid = detail::log_grid(0.5, 20.0, 33);

  if (!line.empty()) {
    std::vector<LemmaReport> unif, value_b, deriv_b, psi2;
    for (const auto& d : line) {
      unif.push_back(dist::cf_deviation_check(d, t_grid));
      value_b.push_back(perturbed::lemma_psi_value_bound(d, s_grid_line, tol));
      deriv_b.push_back(perturbed::lemma_psi_deriv_bound(d, s_grid_line, tol));
      if (dist::check_thm1_hypothesis(d).passed())
        psi2.push_back(perturbed::psi2_pipeline(d));
    }
    add(detail::worst_of(std::move(unif)));
    add(detail::worst_of(std::move(value_b)));
    add(detail::worst_of(std::move(deriv_b)));
    if (!psi2.empty()) {
      add(detail::worst_of(std::move(psi2)));
    } else {
      LemmaReport r;
      r.lemma_id = "Psi2-regimes";
      r.verdict = Verdict::rejected;
      r.notes = "rejected: no supplied law satisfies the perturbation "
                "hypothesis the pipeline is conditional on";
      add(std::move(r));
    }
  }

  if (!radial.empty()) {
    std::vector<LemmaReport> unif, bulk, der, bigs, phi2;
    for (const auto& d : radial) {
      unif.push_back(dist::cf_deviation_check(d, t_grid));
      bulk.push_back(perturbed::lemma_phi_value_bound(d, s_grid_radial, tol));
      der.push_back(perturbed::lemma_phi_deriv_bound(d, s_grid_radial, tol));
      bigs.push_back(perturbed::lemma_phi_big_s(d));
      if (d.w2_exactly_zero) {
        phi2.push_back(perturbed::regime_pipeline(d));
        phi2.push_back(perturbed::regime_pipeline(d, 1e-38));
      }
    }
    add(detail::worst_of(std::move(unif)));
    add(detail::worst_of(std::move(bulk)));
    add(detail::worst_of(std::move(der)));
    add(detail::worst_of(std::move(bigs)));
    if (!phi2.empty()) {
      add(detail::worst_of(std::move(phi2)));
    } else {
      LemmaReport r;
      r.lemma_id = "Phi2-regimes";
      r.verdict = Verdict::rejected;
      r.notes = "rejected: no supplied radial law has an exactly-unit radius, "
                "so the conditional pipeline has no valid instance";
      add(std::move(r));
    }
  }

  for (const auto& r : s.reports) {
    switch (r.verdict) {
      case Verdict::pass: ++s.n_pass; break;
      case Verdict::fail: ++s.n_fail; break;
      default: ++s.n_rejected; break;
    }
  }
  s.all_pass = s.n_fail == 0 && s.n_rejected == 0 && !s.reports.empty();
  return s;
}

inline CertifySummary certify_all(double tol = perturbed::kDefaultTol) {
  return certify_all(tol, default_line_dists(), default_radial_dists());
}

}  // namespace khinchin::verify
