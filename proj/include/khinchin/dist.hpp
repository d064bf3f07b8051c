#pragma once

// Distribution model: symmetric perturbations of the Rademacher law on the
// line, rotationally invariant perturbations of the unit sphere in R^3, and
// the hypothesis checkers that gate the two main inequalities.
//
// Every family wires its characteristic function, absolute moments, and
// Wasserstein-2 distance to the reference law analytically (the optimal
// coupling is monotone in one dimension, so W2 distances are exact closed
// forms, never sampled). Samplers are pure functions of a 64-bit seed.
//
// Tail metadata: certified truncation of oscillatory integrals against
// |cf(t)|^s needs either an exact period for |cf| or a pointwise decay
// envelope. Each family records what it honestly has:
//   - cf_abs_period/cf_period_drift: there is a function with exact period
//     cf_abs_period within pointwise distance cf_period_drift * |t| of |cf|
//     (drift 0 means |cf| itself is exactly periodic);
//   - cf_envelope: |cf(t)| <= c * t^-q for all t > 0.
//
// Stable logarithms: |cf(t)|^s for s up to ~1e4 must be computed as
// exp(s * log|cf(t)|) with log|cf| free of cancellation near |cf| = 1,
// otherwise 1 - |cf|^s loses several digits at small t. Each family wires
// log_abs_cf from the log1p-based helpers; log_abs_cf_snapped is the log of
// the exactly periodic comparison function behind cf_abs_period (identical
// to log_abs_cf whenever cf_period_drift is zero). Zeros of cf floor the log
// at -745 so that exp(s * log) underflows cleanly instead of producing NaN.

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "khinchin/report.hpp"
#include "khinchin/rng.hpp"
#include "khinchin/specialfn.hpp"

namespace khinchin::dist {

using specialfn::kPi;

struct Envelope {
  double c = 0.0;  // |cf(t)| <= c * t^-q, valid for all t > 0
  double q = 0.0;
};

struct Distribution1D {
  std::string name;
  std::function<double(double)> cf;          // t -> E cos(tX)
  std::function<double(double)> abs_moment;  // p -> E |X|^p
  std::function<std::vector<double>(std::size_t, std::uint64_t)> sample;
  double w2_rademacher = 0.0;  // || |X| - 1 ||_2, exact
  bool w2_exactly_zero = false;
  double cf_abs_period = 0.0;   // 0 if no periodic comparison is available
  double cf_period_drift = 0.0;
  std::optional<Envelope> cf_envelope;
  // Exact product structure of the characteristic function, used by the
  // Fourier-representation integrators to price oscillatory tails:
  //   discrete |X|:  cf(t) = sum_i p_i cos(v_i t) with atoms (v_i, p_i);
  //   smeared sign:  cf(t) = cos(t) * sinc(uniform_smear * t).
  // value_atoms is empty for continuous laws; uniform_smear is 0 when the
  // law has no uniform smear factor.
  std::vector<std::pair<double, double>> value_atoms;
  double uniform_smear = 0.0;
  // Cancellation-free log|cf(t)| (zeros floored at -745); see header comment.
  std::function<double(double)> log_abs_cf;
  // Log of the exactly cf_abs_period-periodic comparison function; equals
  // log_abs_cf when cf_period_drift == 0. Meaningful only when
  // cf_abs_period > 0.
  std::function<double(double)> log_abs_cf_snapped;
};

struct RadialDist3D {
  std::string name;
  std::function<double(double)> cf_radial;  // r -> E sinc(R r)
  std::function<std::vector<std::array<double, 3>>(std::size_t, std::uint64_t)>
      sample3d;
  std::vector<std::pair<double, double>> radius_atoms;  // (R, prob), exact law
  double third_moment = 0.0;  // E R^3
  double decay_C0 = 0.0;      // |cf_radial(r)| <= decay_C0 / r, = E R^-1
  double w2_sphere = 0.0;     // || R - 1 ||_2, exact
  bool w2_exactly_zero = false;
  // Cancellation-free log|cf_radial(r)| (zeros floored at -745).
  std::function<double(double)> log_abs_cf_radial;
};

// ---------------------------------------------------------------------------
// Unit coefficient vectors.

struct UnitVector {
  std::vector<double> coords;

  // Requires n >= 2 and sum a_j^2 = 1 within 1e-12.
  static UnitVector exact(std::vector<double> c) {
    validate_size(c);
    double n2 = 0.0;
    for (double a : c) n2 += a * a;
    if (std::abs(n2 - 1.0) > 1e-12)
      throw std::invalid_argument("UnitVector: squared norm " +
                                  std::to_string(n2) + " is not 1 to 1e-12");
    return UnitVector{std::move(c)};
  }

  // Rescales an arbitrary nonzero vector onto the unit sphere.
  static UnitVector normalized(std::vector<double> c) {
    validate_size(c);
    double n2 = 0.0;
    for (double a : c) n2 += a * a;
    if (!(n2 > 0.0) || !std::isfinite(n2))
      throw std::invalid_argument("UnitVector: vector must be finite nonzero");
    const double inv = 1.0 / std::sqrt(n2);
    for (double& a : c) a *= inv;
    return UnitVector{std::move(c)};
  }

  std::size_t n() const { return coords.size(); }

  double max_abs() const {
    double m = 0.0;
    for (double a : coords) m = std::max(m, std::abs(a));
    return m;
  }

  // The small-coefficient precondition of the sharp inequalities.
  bool small_coeff() const {
    return max_abs() <= 1.0 / std::sqrt(2.0) + 1e-12;
  }

 private:
  static void validate_size(const std::vector<double>& c) {
    if (c.size() < 2)
      throw std::invalid_argument("UnitVector: need at least 2 coordinates");
    for (double a : c)
      if (!std::isfinite(a))
        throw std::invalid_argument("UnitVector: coordinates must be finite");
  }
};

// ---------------------------------------------------------------------------
// One-dimensional families.

enum class Family1D { two_point, four_point, noise };

namespace detail {

inline std::string format_name(const char* base, double c) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s(c=%.17g)", base, c);
  return buf;
}

// Best rational approximation p/q to x in (0, 1) with q <= qmax, by walking
// continued-fraction convergents. Any approximation with error < 1/(2 q^2)
// is itself a convergent, so convergents find every "exact rational in
// floating point" case. Returns the first convergent within 1e-15, else the
// last one with admissible denominator.
inline std::pair<long long, long long> rationalize(double x, long long qmax) {
  // h_k = a_k h_{k-1} + h_{k-2}, seeded with (h_{-1}, h_{-2}) = (1, 0) and
  // (k_{-1}, k_{-2}) = (0, 1).
  long long h1 = 1, h2 = 0, k1 = 0, k2 = 1;
  double y = x;
  long long best_p = 0, best_q = 1;
  for (int it = 0; it < 64; ++it) {
    const double fl = std::floor(y);
    if (!(fl >= 0.0) || fl > 9e17) break;
    const long long a = static_cast<long long>(fl);
    const __int128 h = static_cast<__int128>(a) * h1 + h2;
    const __int128 k = static_cast<__int128>(a) * k1 + k2;
    if (k > qmax) break;
    h2 = h1, k2 = k1;
    h1 = static_cast<long long>(h);
    k1 = static_cast<long long>(k);
    if (k1 >= 1) {
      best_p = h1;
      best_q = k1;
      if (std::abs(x - double(h1) / double(k1)) <= 1e-15) break;
    }
    const double rem = y - fl;
    if (rem < 1e-18) break;
    y = 1.0 / rem;
  }
  return {best_p, best_q};
}

}  // namespace detail

// Symmetric perturbations of the Rademacher law. Families:
//   two_point:  X = +-(1+c), c > -1;
//   four_point: X uniform on {+-(1-c), +-(1+c)}, 0 <= c < 1;
//   noise:      X = sign * (1 + c U), U uniform on [-1, 1], 0 <= c <= 1.
inline Distribution1D make_perturbed_rademacher(Family1D kind, double c) {
  if (!std::isfinite(c))
    throw std::invalid_argument("make_perturbed_rademacher: c must be finite");
  Distribution1D d;
  switch (kind) {
    case Family1D::two_point: {
      if (!(1.0 + c > 0.0))
        throw std::invalid_argument("two_point: need 1 + c > 0");
      const double a = 1.0 + c;
      d.name = c == 0.0 ? "rademacher" : detail::format_name("two_point", c);
      d.cf = [a](double t) { return std::cos(a * t); };
      d.abs_moment = [a](double p) { return std::pow(a, p); };
      d.sample = [a](std::size_t n, std::uint64_t seed) {
        Rng rng(seed);
        std::vector<double> out(n);
        for (auto& x : out) x = rng.sign() * a;
        return out;
      };
      d.w2_rademacher = std::abs(c);
      d.w2_exactly_zero = (c == 0.0);
      d.value_atoms = {{a, 1.0}};
      d.cf_abs_period = kPi / a;
      d.cf_period_drift = 0.0;
      d.log_abs_cf = [a](double t) { return specialfn::log_abs_cos(a * t); };
      d.log_abs_cf_snapped = d.log_abs_cf;
      break;
    }
    case Family1D::four_point: {
      if (!(c >= 0.0 && c < 1.0))
        throw std::invalid_argument("four_point: need 0 <= c < 1");
      const double lo = 1.0 - c, hi = 1.0 + c;
      d.name = detail::format_name("four_point", c);
      // (cos(lo t) + cos(hi t)) / 2 = cos(t) cos(c t).
      d.cf = [lo, hi](double t) {
        return 0.5 * (std::cos(lo * t) + std::cos(hi * t));
      };
      d.abs_moment = [lo, hi](double p) {
        return 0.5 * (std::pow(lo, p) + std::pow(hi, p));
      };
      d.sample = [lo, hi](std::size_t n, std::uint64_t seed) {
        Rng rng(seed);
        std::vector<double> out(n);
        for (auto& x : out) {
          const std::uint64_t bits = rng.next_u64();
          const double mag = (bits & 1) ? hi : lo;
          x = (bits & 2) ? mag : -mag;
        }
        return out;
      };
      d.w2_rademacher = c;  // |X| in {1-c, 1+c} equiprobably
      d.w2_exactly_zero = (c == 0.0);
      d.value_atoms = {{lo, 0.5}, {hi, 0.5}};
      if (c == 0.0) {
        d.cf_abs_period = kPi;
        d.cf_period_drift = 0.0;
        d.log_abs_cf = [](double t) { return specialfn::log_abs_cos(t); };
        d.log_abs_cf_snapped = d.log_abs_cf;
      } else {
        // |cf| = |cos t| |cos(c t)| is exactly periodic only for rational c;
        // snap to the best p/q and record the phase drift honestly:
        // | |cf(t)| - |cos t cos((p/q) t)| | <= |c - p/q| * |t|.
        const auto [p, q] = detail::rationalize(c, 1000000);
        d.cf_abs_period = kPi * double(q);
        // |c - p/q| via fma: the naive difference of two rounded quotients
        // can collapse to zero even though c is not exactly p/q.
        d.cf_period_drift =
            std::abs(std::fma(c, double(q), -double(p))) / double(q);
        d.log_abs_cf = [c](double t) {
          return specialfn::log_abs_cos(t) + specialfn::log_abs_cos(c * t);
        };
        // Evaluate the snapped factor through p*t/q (not a pre-rounded
        // double ratio) so the function is the exactly (pi*q)-periodic one
        // up to argument roundoff, which the quadrature error estimates see.
        const double num = double(p), den = double(q);
        d.log_abs_cf_snapped = [num, den](double t) {
          return specialfn::log_abs_cos(t) +
                 specialfn::log_abs_cos(num * t / den);
        };
      }
      break;
    }
    case Family1D::noise: {
      if (!(c >= 0.0 && c <= 1.0))
        throw std::invalid_argument("noise: need 0 <= c <= 1");
      d.name = detail::format_name("noise", c);
      // E cos(t(1 + cU)) = cos(t) sin(ct)/(ct).
      d.cf = [c](double t) {
        const double x = c * t;
        const double smear =
            std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
        return std::cos(t) * smear;
      };
      d.abs_moment = [c](double p) {
        if (c == 0.0) return 1.0;
        // E (1 + cU)^p = ((1+c)^(p+1) - (1-c)^(p+1)) / (2c(p+1)).
        return (std::pow(1.0 + c, p + 1.0) - std::pow(1.0 - c, p + 1.0)) /
               (2.0 * c * (p + 1.0));
      };
      d.sample = [c](std::size_t n, std::uint64_t seed) {
        Rng rng(seed);
        std::vector<double> out(n);
        for (auto& x : out) {
          const double mag = 1.0 + c * rng.symmetric_uniform();
          x = rng.sign() * mag;
        }
        return out;
      };
      d.w2_rademacher = c / std::sqrt(3.0);  // || cU ||_2
      d.w2_exactly_zero = (c == 0.0);
      if (c == 0.0) {
        d.value_atoms = {{1.0, 1.0}};
        d.cf_abs_period = kPi;
        d.cf_period_drift = 0.0;
        d.log_abs_cf = [](double t) { return specialfn::log_abs_cos(t); };
      } else {
        d.uniform_smear = c;
        d.cf_envelope = Envelope{1.0 / c, 1.0};  // |sin(ct)/(ct)| <= 1/(ct)
        d.log_abs_cf = [c](double t) {
          return specialfn::log_abs_cos(t) + specialfn::log_sinc(c * t);
        };
      }
      d.log_abs_cf_snapped = d.log_abs_cf;
      break;
    }
  }
  return d;
}

inline Distribution1D rademacher() {
  return make_perturbed_rademacher(Family1D::two_point, 0.0);
}

// ---------------------------------------------------------------------------
// Rotationally invariant families on R^3: X = R * theta, theta uniform on the
// sphere, so the characteristic function is E sin(R|t|)/(R|t|).

enum class RadialKind { sphere, scaled, two_point };

namespace detail {

inline double sinc(double x) {
  return std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
}

// sinc(x) - 1 without cancellation. The nested series matches the Taylor
// expansion through x^10; at the 0.35 switch point its truncation error is
// below 3e-14 relative, and the direct branch has already lost only ~5 bits.
inline double sinc_m1(double x) {
  const double ax = std::abs(x);
  if (ax < 0.35) {
    const double x2 = x * x;
    return -x2 / 6.0 *
           (1.0 -
            x2 / 20.0 *
                (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0 * (1.0 - x2 / 110.0))));
  }
  return std::sin(x) / x - 1.0;
}

}  // namespace detail

inline RadialDist3D make_radial(RadialKind kind, double c = 0.0) {
  if (!std::isfinite(c))
    throw std::invalid_argument("make_radial: c must be finite");
  RadialDist3D d;
  switch (kind) {
    case RadialKind::sphere:
      d.name = "sphere";
      d.radius_atoms = {{1.0, 1.0}};
      d.w2_sphere = 0.0;
      d.w2_exactly_zero = true;
      break;
    case RadialKind::scaled: {
      if (!(1.0 + c > 0.0))
        throw std::invalid_argument("radial scaled: need 1 + c > 0");
      d.name = detail::format_name("radial_scaled", c);
      d.radius_atoms = {{1.0 + c, 1.0}};
      d.w2_sphere = std::abs(c);  // exact even when 1 + c rounds to 1
      d.w2_exactly_zero = (c == 0.0);
      break;
    }
    case RadialKind::two_point: {
      if (!(c >= 0.0 && c < 1.0))
        throw std::invalid_argument("radial two_point: need 0 <= c < 1");
      d.name = detail::format_name("radial_two_point", c);
      d.radius_atoms = {{1.0 - c, 0.5}, {1.0 + c, 0.5}};
      d.w2_sphere = c;  // E (R - 1)^2 = c^2 exactly
      d.w2_exactly_zero = (c == 0.0);
      break;
    }
  }
  double m3 = 0.0, inv = 0.0;
  for (auto [r, p] : d.radius_atoms) {
    if (!(r > 0.0))
      throw std::invalid_argument("make_radial: radius law must be positive");
    m3 += p * r * r * r;
    inv += p / r;
  }
  d.third_moment = m3;
  d.decay_C0 = inv;  // E R^-1 dominates r |cf_radial(r)|
  auto atoms = d.radius_atoms;
  d.cf_radial = [atoms](double r) {
    double v = 0.0;
    for (auto [rr, p] : atoms) v += p * detail::sinc(rr * r);
    return v;
  };
  // Accumulate cf - 1 (every sinc_m1 term is <= 0, so no cancellation) and
  // take log1p while the value is away from zero; fall back to a direct log
  // near the zeros of cf, where relative accuracy no longer matters.
  d.log_abs_cf_radial = [atoms](double r) {
    double m1 = 0.0;
    for (auto [rr, p] : atoms) m1 += p * detail::sinc_m1(rr * r);
    if (m1 > -0.5) return std::log1p(m1);
    const double v = std::abs(1.0 + m1);
    return v > 0.0 ? std::log(v) : -745.0;
  };
  d.sample3d = [atoms](std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::array<double, 3>> out(n);
    for (auto& pt : out) {
      double u = rng.uniform(), radius = atoms.back().first;
      for (auto [rr, p] : atoms) {
        if (u < p) {
          radius = rr;
          break;
        }
        u -= p;
      }
      double x, y, z;
      rng.sphere_direction(x, y, z);
      pt = {radius * x, radius * y, radius * z};
    }
    return out;
  };
  return d;
}

// ---------------------------------------------------------------------------
// Hypothesis checkers.

// Line case: the sharp inequality tolerates W2 perturbations up to 1e-4.
inline report::LemmaReport check_thm1_hypothesis(const Distribution1D& d) {
  report::LemmaReport r;
  r.lemma_id = "assump-S";
  r.inputs = "dist=" + d.name;
  r.paper_bound = 1e-4;
  r.computed = {{"w2_rademacher", d.w2_rademacher, 0.0}};
  r.margin = r.paper_bound - d.w2_rademacher;
  r.verdict = r.margin >= 0.0 ? report::Verdict::pass : report::Verdict::fail;
  if (d.w2_exactly_zero) r.notes = "w2 is exactly zero by construction";
  return r;
}

// Sphere case: threshold 1e-38 * C1^-9 * min((E R^3)^-6, 1) with
// C1 = max(decay_C0, 1); also emits the proof-pipeline split point
// s0 = max(1e6 (E R^3)^2, 2 log C1).
inline report::LemmaReport check_thm2_hypothesis(const RadialDist3D& d) {
  report::LemmaReport r;
  r.lemma_id = "assump-B";
  r.inputs = "dist=" + d.name;
  const double c1 = std::max(d.decay_C0, 1.0);
  const double threshold = 1e-38 * std::pow(c1, -9.0) *
                           std::min(std::pow(d.third_moment, -6.0), 1.0);
  const double s0 =
      std::max(1e6 * d.third_moment * d.third_moment, 2.0 * std::log(c1));
  r.paper_bound = threshold;
  r.computed = {{"w2_sphere", d.w2_sphere, 0.0},
                {"C1", c1, 0.0},
                {"third_moment", d.third_moment, 0.0},
                {"s0", s0, 0.0}};
  const bool pass = d.w2_exactly_zero || d.w2_sphere <= threshold;
  r.margin = threshold - d.w2_sphere;
  r.verdict = pass ? report::Verdict::pass : report::Verdict::fail;
  if (d.w2_exactly_zero) r.notes = "w2 is exactly zero by construction";
  return r;
}

// Uniform CF comparison: a W2 distance delta to the reference law forces
// |cf(t) - cos t| <= delta(delta+2)/2 * t^2 (line) and
// |cf_radial(r) - sinc r| <= delta(delta+2)/2 * r^2 (sphere).
namespace detail {

inline report::LemmaReport cf_deviation_impl(
    const std::string& lemma_id, const std::string& name, double delta,
    const std::function<double(double)>& cf,
    const std::function<double(double)>& reference,
    const std::vector<double>& grid) {
  report::LemmaReport r;
  r.lemma_id = lemma_id;
  r.inputs = "dist=" + name;
  if (grid.empty())
    throw std::invalid_argument("cf_deviation_check: empty grid");
  const double coef = 0.5 * delta * (delta + 2.0);
  double min_margin = std::numeric_limits<double>::infinity();
  double max_dev = 0.0, bound_at_min = 0.0;
  for (double t : grid) {
    if (!(t > 0.0) || !std::isfinite(t))
      throw std::invalid_argument("cf_deviation_check: grid must be positive");
    const double dev = std::abs(cf(t) - reference(t));
    const double bound = coef * t * t;
    max_dev = std::max(max_dev, dev);
    if (bound - dev < min_margin) {
      min_margin = bound - dev;
      bound_at_min = bound;
    }
  }
  r.computed = {{"max_deviation", max_dev, 0.0},
                {"w2", delta, 0.0},
                {"grid_points", double(grid.size()), 0.0}};
  r.paper_bound = bound_at_min;
  r.margin = min_margin;
  r.verdict = r.margin >= 0.0 ? report::Verdict::pass : report::Verdict::fail;
  return r;
}

}  // namespace detail

inline report::LemmaReport cf_deviation_check(const Distribution1D& d,
                                              const std::vector<double>& grid) {
  return detail::cf_deviation_impl(
      "phi-unif", d.name, d.w2_rademacher, d.cf,
      [](double t) { return std::cos(t); }, grid);
}

inline report::LemmaReport cf_deviation_check(const RadialDist3D& d,
                                              const std::vector<double>& grid) {
  return detail::cf_deviation_impl(
      "phi-unif-vec", d.name, d.w2_sphere, d.cf_radial,
      [](double r) { return detail::sinc(r); }, grid);
}

}  // namespace khinchin::dist
