#pragma once

// Limit special functions of the two sharp-constant problems:
//
//   psi0(s)  = sqrt(2/pi) * prod_{k>=0} (1 - (s+2k+1)^-2)^(1/2)
//            = (2 / (pi sqrt(s))) * int_0^inf (1 - |cos u|^s) u^-2 du,
//   ball_I(s, k) = int_0^inf |sinc u|^s log^k|sinc u| du  (k = 0, 1, 2),
//   phi0(s) = (2 sqrt(s) / pi) * ball_I(s, 0),
//
// plus first derivatives. The product route closes its truncation with an
// Euler-Maclaurin tail (closed-form antiderivative of log(1 - u^-2)), so a
// thousand factors deliver near-machine accuracy with a rigorous remainder
// bound; the quadrature route exists as an independent cross-check and as
// the shared evaluation path for the perturbed functionals.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "khinchin/quad.hpp"

namespace khinchin::specialfn {

inline constexpr double kPi = std::numbers::pi;
inline const double kPsi0Limit = std::sqrt(2.0 / kPi);      // psi0(s) as s -> inf
inline const double kPhi0Limit = std::sqrt(6.0 / kPi);      // phi0(s) as s -> inf
inline constexpr double kZeta3 = 1.2020569031595942854;
inline const double kPsi0PrimeFloor =
    (kZeta3 - 1.0) / (8.0 * std::sqrt(2.0));  // lower bound for psi0' on [2,3]
inline const double kBallSecondDerivCap = 48.0 * std::exp(-2.0);  // |I''| cap

struct Certified {
  double value = 0.0;
  double unc = 0.0;  // rigorous absolute uncertainty envelope
  bool ok = true;    // false if a quadrature could not certify its tolerance
};

// ---------------------------------------------------------------------------
// Stable logarithms near removable singularities.

// log|cos t| without cancellation: cos t = 1 - 2 sin^2(t/2) and
// |cos t| = 1 - 2 cos^2(t/2) when cos t < 0.
inline double log_abs_cos(double t) {
  const double c = std::cos(t);
  double q = -1.0;
  if (c > 0.0) {
    const double sh = std::sin(0.5 * t);
    q = -2.0 * sh * sh;
  } else if (c < 0.0) {
    const double ch = std::cos(0.5 * t);
    q = -2.0 * ch * ch;
  }
  // q <= -1 means |cos t| rounds to zero at working precision; return a log
  // small enough that exp(s * result) underflows for every admissible s.
  return q > -1.0 ? std::log1p(q) : -745.0;
}

// log(sin x / x) for x > 0, series-stabilized for small x:
// -x^2/6 - x^4/180 - x^6/2835 - x^8/37800 - ...
inline double log_sinc(double x) {
  if (x < 0.1) {
    const double x2 = x * x;
    return -x2 / 6.0 *
           (1.0 + x2 / 30.0 *
                      (1.0 + x2 * (4.0 / 63.0) * (1.0 + x2 * (3.0 / 40.0))));
  }
  const double s = std::abs(std::sin(x));
  if (s == 0.0) return -745.0;
  return std::log(s) - std::log(x);
}

// ---------------------------------------------------------------------------
// Product route for psi0 and its derivative.

namespace detail {

// G(u) = log(1 - u^-2) and its derivatives; EM closes sums of G over u-step 2.
inline double G0(double u) { return std::log1p(-1.0 / (u * u)); }
inline double G1(double u) { return 2.0 / (u * u * u - u); }
inline double G2(double u) {
  const double d = u * u * u - u;
  return -2.0 * (3.0 * u * u - 1.0) / (d * d);
}
inline double G3(double u) {
  const double d = u * u * u - u;
  return -2.0 * (6.0 * u * d - 2.0 * (3.0 * u * u - 1.0) * (3.0 * u * u - 1.0)) /
         (d * d * d);
}
// int_U^inf G0(u) du = -(U log1p(-1/U^2) + 2 atanh(1/U)), written stably.
inline double G0_integral(double U) {
  return -(U * std::log1p(-1.0 / (U * U)) + 2.0 * std::atanh(1.0 / U));
}

struct ProductSums {
  double log_product = 0.0;  // sum of log1p(-u_k^-2), all k >= 0
  double log_unc = 0.0;
  double deriv_sum = 0.0;  // sum of 1/(u_k^3 - u_k), all k >= 0
  double deriv_unc = 0.0;
};

inline ProductSums product_sums(double s) {
  constexpr int K = 4000;
  ProductSums out;
  // Kahan-compensated partial sums of the first K factors.
  double sl = 0.0, cl = 0.0, sd = 0.0, cd = 0.0, abs_l = 0.0;
  for (int k = 0; k < K; ++k) {
    const double u = s + 2.0 * k + 1.0;
    const double term_l = std::log1p(-1.0 / (u * u));
    const double term_d = 1.0 / (u * u * u - u);
    double y = term_l - cl;
    double t = sl + y;
    cl = (t - sl) - y;
    sl = t;
    y = term_d - cd;
    t = sd + y;
    cd = (t - sd) - y;
    sd = t;
    abs_l += std::fabs(term_l);
  }
  const double U = s + 2.0 * K + 1.0;
  // Euler-Maclaurin closure for sum_{k>=K} G0(U + 2k):
  //   (1/2) int_U^inf G0 + G0(U)/2 - G1(U)/6 + G3(U)/90,  |R| <= 0.27 U^-5.
  const double tail_l =
      0.5 * G0_integral(U) + 0.5 * G0(U) - G1(U) / 6.0 + G3(U) / 90.0;
  const double tail_l_unc = 0.27 * std::pow(U, -5.0);
  // Same for sum_{k>=K} (1/2) G1(U + 2k):
  //   -G0(U)/4 + G1(U)/4 - G2(U)/12,  |R| <= 0.5 U^-4.
  const double tail_d = -G0(U) / 4.0 + G1(U) / 4.0 - G2(U) / 12.0;
  const double tail_d_unc = 0.5 * std::pow(U, -4.0);

  out.log_product = sl + tail_l;
  out.log_unc = tail_l_unc + 4.0e-16 * abs_l + 1e-18;
  out.deriv_sum = sd + tail_d;
  out.deriv_unc = tail_d_unc + 4.0e-16 * std::fabs(sd) + 1e-18;
  return out;
}

inline void require_s_at_least(double s, double lo, const char* fn) {
  if (!(s >= lo) || !std::isfinite(s))
    throw std::domain_error(std::string(fn) + " requires s >= " +
                            std::to_string(lo));
}

}  // namespace detail

// psi0 via the infinite product. Near-machine accuracy, certified.
inline Certified psi0(double s) {
  detail::require_s_at_least(s, 1.0, "psi0");
  const auto ps = detail::product_sums(s);
  const double v = kPsi0Limit * std::exp(0.5 * ps.log_product);
  return {v, v * (0.5 * ps.log_unc + 3e-16), true};
}

// d/ds psi0: psi0(s) * sum_k 1 / (u_k^3 - u_k), u_k = s + 2k + 1.
inline Certified psi0_prime(double s) {
  detail::require_s_at_least(s, 1.0, "psi0_prime");
  const auto ps = detail::product_sums(s);
  const double v0 = kPsi0Limit * std::exp(0.5 * ps.log_product);
  const double v = v0 * ps.deriv_sum;
  const double unc =
      std::fabs(v) * (0.5 * ps.log_unc + 3e-16) + v0 * ps.deriv_unc;
  return {v, unc, true};
}

// psi0 via the semi-infinite integral (independent cross-check route):
// psi0(s) = (2 / (pi sqrt(s))) int_0^inf (1 - |cos u|^s) u^-2 du, s >= 1.
inline Certified psi0_quadrature(double s, double tol = 1e-10) {
  detail::require_s_at_least(s, 1.0, "psi0_quadrature");
  quad::Integrand f;
  f.eval = [s](double u) {
    if (u < 1e-8) return 0.5 * s;  // limit of (1 - cos^s u)/u^2
    return -std::expm1(s * log_abs_cos(u)) / (u * u);
  };
  f.period_hint = 0.5 * kPi;  // |cos|^s kinks sit on half-period boundaries
  quad::PeriodicStructure ps;
  ps.period = kPi;
  ps.power = 2.0;
  f.periodic = ps;
  const double scale = 2.0 / (kPi * std::sqrt(s));
  auto r = quad::integrate_semi_infinite(f, tol / scale);
  return {scale * r.value, scale * r.total_uncertainty(),
          r.status == quad::QuadStatus::ok};
}

// ---------------------------------------------------------------------------
// ball_I(s, k) = int_0^inf |sinc u|^s log^k|sinc u| du, k in {0, 1, 2}.
//
// Tail handling: pointwise envelopes |sinc|^s <= u^-s,
// x^s |log x| <= (2/e) x^(s-1/2), x^s log^2 x <= (16/e^2) x^(s-1/2), plus the
// exact decomposition log|sinc u| = log|sin u| - log u, which turns the tail
// into periodic factors against u^-s log^j u kernels (binomial expansion).
inline Certified ball_I(double s, int k, double tol = 1e-10) {
  if (k < 0 || k > 2) throw std::domain_error("ball_I supports k in {0,1,2}");
  detail::require_s_at_least(s, k == 0 ? 1.05 : 2.0, "ball_I");
  quad::Integrand f;
  f.eval = [s, k](double u) {
    if (u < 1e-12) return k == 0 ? 1.0 : 0.0;
    const double L = log_sinc(u);
    const double a = std::exp(s * L);
    if (k == 0) return a;
    if (a == 0.0) return 0.0;  // underflow dominates any log power
    return k == 1 ? a * L : a * L * L;
  };
  f.period_hint = kPi;
  if (k == 0) {
    f.tail_model = quad::TailModel{1.0, s};
    if (s < 6.0) {
      quad::PeriodicStructure ps;
      ps.period = kPi;
      ps.power = s;
      f.periodic = ps;
    }
  } else {
    const double e1 = std::exp(1.0);
    f.tail_model = k == 1 ? quad::TailModel{2.0 / e1, s - 0.5}
                          : quad::TailModel{16.0 / (e1 * e1), s - 0.5};
    if (s <= 40.0) {
      // |sinc|^s log^k|sinc| = sum_j C(k,j) (-1)^k w_j(u) u^-s log^j u with
      // w_j = |sin u|^s (-log|sin u|)^(k-j) >= 0; the engine measures each.
      for (int j = 0; j <= k; ++j) {
        quad::PeriodicLogTerm term;
        term.period = kPi;
        term.power = s;
        term.log_power = j;
        const double binom = (k == 2 && j == 1) ? 2.0 : 1.0;
        term.coeff = (k % 2 == 0 ? 1.0 : -1.0) * binom;
        const int m = k - j;
        term.factor = [s, m](double u) {
          const double si = std::abs(std::sin(u));
          if (si == 0.0) return 0.0;
          const double a = std::pow(si, s);
          if (m == 0) return a;
          if (a == 0.0) return 0.0;
          const double nl = -std::log(si);
          return m == 1 ? a * nl : a * nl * nl;
        };
        f.periodic_log_terms.push_back(std::move(term));
      }
    }
  }
  auto r = quad::integrate_semi_infinite(f, tol);
  return {r.value, r.total_uncertainty(), r.status == quad::QuadStatus::ok};
}

// phi0(s) = (2 sqrt(s) / pi) * ball_I(s, 0), s >= 2 in the sharp-constant
// range (admitted from 1.05 like ball_I).
inline Certified phi0(double s, double tol = 1e-10) {
  const double scale = 2.0 * std::sqrt(s) / kPi;
  auto i0 = ball_I(s, 0, tol / scale);
  return {scale * i0.value, scale * i0.unc, i0.ok};
}

// d/ds phi0 = (2/pi) (ball_I(s,0) / (2 sqrt(s)) + sqrt(s) ball_I(s,1)).
inline Certified phi0_prime(double s, double tol = 1e-10) {
  detail::require_s_at_least(s, 2.0, "phi0_prime");
  const double rs = std::sqrt(s);
  const double c0 = 2.0 / (kPi * 2.0 * rs);
  const double c1 = 2.0 * rs / kPi;
  auto i0 = ball_I(s, 0, tol / (2.0 * c0));
  auto i1 = ball_I(s, 1, tol / (2.0 * c1));
  return {c0 * i0.value + c1 * i1.value, c0 * i0.unc + c1 * i1.unc,
          i0.ok && i1.ok};
}

}  // namespace khinchin::specialfn
