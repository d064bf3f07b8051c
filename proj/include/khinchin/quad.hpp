#pragma once

// Adaptive Gauss-Kronrod quadrature with rigorous tail accounting for the
// semi-infinite oscillatory integrals this library lives on.
//
// Tail contract. integrate_semi_infinite needs at least one of:
//   * tail_model {c, p}: |f(t)| <= c * t^-p with p > 1, giving the truncation
//     bound c * T^(1-p) / (p-1);
//   * periodic {period, power, ...}: f(t) = w(t) * t^-power with w >= 0 having
//     the stated exact period. The engine measures (or is told) the period
//     mean m and a bound C on the running integral of w - m, adds the analytic
//     tail m * T^(1-power) / (power-1), and bounds the remainder by
//     C * T^-power (integration by parts). An optional decaying defect
//     envelope covers almost-periodic integrands such as sinc-smeared
//     characteristic functions.
// A power-law tail bound of Theta(1/T) alone cannot certify tolerances near
// 1e-10 in bounded time for kernels like (1 - |cos t|^s)/t^2; the periodic
// route is what makes those integrals cheap.
//
// Removable singularities at t = 0 are the caller's job: integrands must be
// evaluated in a numerically stable form (log1p/expm1) so that values near 0
// are accurate. Kronrod nodes are interior, so t = 0 itself is never touched.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace khinchin::quad {

struct QuadError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// |f(t)| <= c * t^-p for all t at and beyond the engine's cutoff candidates.
struct TailModel {
  double c = 0.0;
  double p = 0.0;
};

// f(t) = w(t) * t^-power with w exactly `period`-periodic and w >= 0.
// known_mean / known_runint, when supplied, replace the measurement pass:
// known_runint must bound |int_A^B (w - mean)| for every A, B > 0.
// runint_decay {c, q} is the decaying variant |int_A^B (w - mean)| <= c * A^-q.
// envelope_decay {c, q} is the pointwise variant |w(t) - mean| <= c * t^-q for
// t >= min_cutoff (covers envelopes whose running integral diverges).
// defect {c, q} declares |w(t) - w_periodic(t)| <= c * t^-q (measured route),
// for integrands that are only asymptotically periodic.
struct PeriodicStructure {
  double period = 0.0;
  double power = 2.0;
  std::optional<double> known_mean;
  std::optional<double> known_runint;
  std::optional<TailModel> runint_decay;
  std::optional<TailModel> envelope_decay;
  std::optional<TailModel> defect;
  double min_cutoff = 0.0;  // declared decay bounds hold from here on
};

// One term of a decomposition f(t) = sum_j coeff_j * w_j(t) * t^-power *
// log(t)^log_power valid for all t beyond the engine's cutoff candidates,
// with each w_j >= 0 exactly `period`-periodic. Covers integrands such as
// |sinc t|^s log^k|sinc t| whose kernels carry log factors.
struct PeriodicLogTerm {
  std::function<double(double)> factor;  // w_j
  double period = 0.0;
  double power = 0.0;  // p > 1
  int log_power = 0;   // j >= 0
  double coeff = 1.0;
};

struct Integrand {
  std::function<double(double)> eval;
  std::optional<double> period_hint;  // panel splitting length (lobe width)
  std::optional<TailModel> tail_model;
  std::optional<PeriodicStructure> periodic;
  std::vector<PeriodicLogTerm> periodic_log_terms;
  std::optional<double> singularity_hint;  // removable-singularity location
};

enum class QuadStatus { ok, tolerance_not_met };

struct QuadResult {
  double value = 0.0;
  double abs_error_est = 0.0;  // accumulated panel error estimate
  double tail_bound = 0.0;     // rigorous bound on everything beyond cutoff
  double cutoff = 0.0;
  std::size_t panels = 0;
  QuadStatus status = QuadStatus::ok;

  double total_uncertainty() const { return abs_error_est + tail_bound; }
};

namespace detail {

// 15-point Kronrod extension of 7-point Gauss (QUADPACK dqk15 abscissae).
inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a = 0.0, b = 0.0, value = 0.0, err = 0.0;
};

struct PanelErrLess {
  bool operator()(const Panel& x, const Panel& y) const { return x.err < y.err; }
};

template <typename F>
Panel gk15(F&& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  auto ev = [&](double t) {
    const double v = f(t);
    if (!std::isfinite(v))
      throw QuadError("integrand evaluated to a non-finite value at t = " +
                      std::to_string(t));
    return v;
  };
  const double fc = ev(c);
  double resg = kWg[3] * fc;
  double resk = kWgk[7] * fc;
  for (int j = 0; j < 3; ++j) {
    const double x = h * kXgk[2 * j + 1];
    const double f1 = ev(c - x), f2 = ev(c + x);
    resg += kWg[j] * (f1 + f2);
    resk += kWgk[2 * j + 1] * (f1 + f2);
  }
  for (int j = 0; j < 4; ++j) {
    const double x = h * kXgk[2 * j];
    resk += kWgk[2 * j] * (ev(c - x) + ev(c + x));
  }
  return Panel{a, b, resk * h, std::abs((resk - resg) * h)};
}

inline double kahan_total(const std::vector<Panel>& panels) {
  double s = 0.0, comp = 0.0;
  for (const Panel& p : panels) {
    const double y = p.value - comp;
    const double t = s + y;
    comp = (t - s) - y;
    s = t;
  }
  return s;
}

struct AdaptiveOutcome {
  double value = 0.0;
  double err = 0.0;
  std::size_t panels = 0;
  bool converged = false;
  std::vector<Panel> store;  // final panels (heap order)
};

// Refines the worst panel until the summed error estimate meets tol or the
// panel budget runs out. `boundaries` must be strictly increasing.
template <typename F>
AdaptiveOutcome adapt(F&& f, const std::vector<double>& boundaries, double tol,
                      std::size_t budget) {
  AdaptiveOutcome out;
  out.store.reserve(boundaries.size() + 256);
  double err_sum = 0.0;
  for (std::size_t i = 0; i + 1 < boundaries.size(); ++i) {
    out.store.push_back(gk15(f, boundaries[i], boundaries[i + 1]));
    err_sum += out.store.back().err;
  }
  std::make_heap(out.store.begin(), out.store.end(), PanelErrLess{});
  while (err_sum > tol && out.store.size() < budget) {
    std::pop_heap(out.store.begin(), out.store.end(), PanelErrLess{});
    const Panel worst = out.store.back();
    out.store.pop_back();
    if (worst.b - worst.a <= 16.0 * std::numeric_limits<double>::epsilon() *
                                 std::max(std::abs(worst.a), 1.0)) {
      // Cannot subdivide further in double precision; keep as-is.
      out.store.push_back(worst);
      std::push_heap(out.store.begin(), out.store.end(), PanelErrLess{});
      break;
    }
    err_sum -= worst.err;
    const double mid = 0.5 * (worst.a + worst.b);
    Panel left = gk15(f, worst.a, mid);
    Panel right = gk15(f, mid, worst.b);
    err_sum += left.err + right.err;
    out.store.push_back(left);
    std::push_heap(out.store.begin(), out.store.end(), PanelErrLess{});
    out.store.push_back(right);
    std::push_heap(out.store.begin(), out.store.end(), PanelErrLess{});
  }
  out.value = kahan_total(out.store);
  out.err = err_sum;
  out.panels = out.store.size();
  out.converged = err_sum <= tol;
  return out;
}

inline std::vector<double> spaced_boundaries(double a, double b,
                                             std::optional<double> step,
                                             std::size_t max_panels) {
  std::vector<double> bounds;
  if (step && *step > 0.0 && (b - a) / *step >= 2.0) {
    const double n_est = (b - a) / *step;
    if (n_est <= double(max_panels)) {
      bounds.reserve(std::size_t(n_est) + 2);
      bounds.push_back(a);
      for (double x = a + *step; x < b - 0.5 * *step; x += *step)
        bounds.push_back(x);
      bounds.push_back(b);
      return bounds;
    }
  }
  // Dyadic fallback: fine near the origin, coarse far out.
  bounds.push_back(a);
  double x = std::max(1.0, std::abs(a));
  if (a + x < b) {
    for (double y = a + x; y < b; y *= 2.0) bounds.push_back(y);
  }
  bounds.push_back(b);
  return bounds;
}

}  // namespace detail

inline QuadResult integrate_finite(const Integrand& f, double a, double b,
                                   double tol, std::size_t budget = 40000) {
  if (!f.eval) throw QuadError("integrand has no eval function");
  if (!(tol > 0.0)) throw QuadError("tolerance must be positive");
  if (!std::isfinite(a) || !std::isfinite(b) || !(a < b))
    throw QuadError("invalid finite integration bounds: need a < b");
  const auto bounds = detail::spaced_boundaries(a, b, f.period_hint, budget / 2);
  auto out = detail::adapt(f.eval, bounds, tol, budget);
  QuadResult r;
  r.value = out.value;
  r.abs_error_est = out.err;
  r.tail_bound = 0.0;
  r.cutoff = b;
  r.panels = out.panels;
  r.status = out.converged ? QuadStatus::ok : QuadStatus::tolerance_not_met;
  return r;
}

namespace detail {

// A priced tail: everything needed to evaluate the analytic tail value and
// its rigorous remainder bound at any admissible cutoff.
//
// Measured periodic route, two correction orders. With w periodic, m its
// period mean, H(t) = int_T^t (w - m) (periodic, since each period integrates
// to zero when T sits on the measurement phase), and h its period mean:
//   int_T^inf w t^-p dt = m T^(1-p)/(p-1) + h T^-p + R,
//   |R| <= p * C_G * T^-(p+1),  C_G >= sup |int_T^x (H - h)|.
// The second-order term moves the cutoff from (C/tol)^(1/2) to (C_G/tol)^(1/3)
// scaling, which is what makes dense evaluation grids affordable.
// int_T^inf u^-p log(u)^j du for p > 1 (recursive closed form).
inline double log_kernel_integral(double T, double p, int j) {
  const double base = std::pow(T, 1.0 - p) / (p - 1.0);
  double lk = base;
  double logT = std::log(T);
  // LK_j = T^(1-p) log^j T / (p-1) + j/(p-1) * LK_{j-1}
  for (int i = 1; i <= j; ++i)
    lk = base * std::pow(logT, double(i)) + double(i) / (p - 1.0) * lk;
  return lk;
}

// Measured data for one periodic-log term.
struct LogPiece {
  double coeff = 0.0, m = 0.0, C = 0.0, e_m = 0.0, p = 0.0;
  int j = 0;
};

struct TailPlan {
  bool periodic_route = false;
  bool log_route = false;
  std::vector<LogPiece> pieces;
  // tail_model route
  double tm_c = 0.0, tm_p = 0.0;
  // periodic route
  double P = 0.0, p = 0.0;
  double m = 0.0;             // period mean of w
  double mean_err = 0.0;      // uncertainty on m
  bool second_order = false;  // measured route: h / C_G available
  double h_bar = 0.0;         // period mean of H
  double h_err = 0.0;         // uncertainty on h_bar
  double CG = 0.0;            // bound on |int (H - h_bar)|
  double runint_const = 0.0;  // known route: constant bound on |int (w - m)|
  std::optional<TailModel> runint_decay;
  std::optional<TailModel> envelope_decay;
  std::optional<TailModel> defect;
  double window_start = 0.0;  // phase anchor for admissible cutoffs
  bool need_alignment = false;
  double min_cutoff = 0.0;
  double extra_panel_err = 0.0;
  std::size_t extra_panels = 0;

  double preferred_cutoff = 0.0;

  double analytic_value(double T) const {
    if (log_route) {
      double v = 0.0;
      for (const LogPiece& lp : pieces)
        v += lp.coeff * lp.m * log_kernel_integral(T, lp.p, lp.j);
      return v;
    }
    if (!periodic_route) return 0.0;
    double v = m * std::pow(T, 1.0 - p) / (p - 1.0);
    if (second_order) v += h_bar * std::pow(T, -p);
    return v;
  }
  double bound(double T) const {
    if (log_route) {
      double b = 0.0;
      const double logT = std::log(T);
      for (const LogPiece& lp : pieces)
        b += std::abs(lp.coeff) *
             (lp.C * std::pow(T, -lp.p) * std::pow(logT, double(lp.j)) +
              lp.e_m * log_kernel_integral(T, lp.p, lp.j));
      return b;
    }
    if (!periodic_route)
      return tm_c * std::pow(T, 1.0 - tm_p) / (tm_p - 1.0);
    double b = mean_err * std::pow(T, 1.0 - p) / (p - 1.0);
    if (second_order)
      b += p * CG * std::pow(T, -(p + 1.0)) + h_err * std::pow(T, -p);
    else
      b += runint_const * std::pow(T, -p);
    if (runint_decay) b += runint_decay->c * std::pow(T, -(p + runint_decay->p));
    if (envelope_decay)
      b += envelope_decay->c * std::pow(T, 1.0 - p - envelope_decay->p) /
           (p + envelope_decay->p - 1.0);
    if (defect)
      b += defect->c * std::pow(T, 1.0 - p - defect->p) / (p + defect->p - 1.0);
    return b;
  }
  // Snap a candidate cutoff to the measurement phase so the periodic-remainder
  // bounds apply (only the measured plain-periodic route is phase-sensitive;
  // the log route's run-integral bounds are phase-free).
  double align(double T) const {
    if (log_route) return std::max(T, min_cutoff);
    if (!periodic_route) return T;
    T = std::max(T, min_cutoff);
    if (!need_alignment) return std::max(T, P);
    const double anchor = window_start > 0.0 ? window_start : P;
    if (T <= anchor) return anchor;
    return anchor + std::ceil((T - anchor) / P - 1e-9) * P;
  }
};

inline double solve_power(double coeff, double expo, double target) {
  // smallest T >= 1 with coeff * T^-expo <= target
  if (coeff <= target) return 1.0;
  return std::pow(coeff / target, 1.0 / expo);
}

inline TailPlan plan_tail_model(const TailModel& tm, double tol_tail) {
  if (!(tm.p > 1.0)) throw QuadError("tail_model decay power must exceed 1");
  if (tm.c < 0.0) throw QuadError("tail_model constant must be nonnegative");
  TailPlan plan;
  plan.periodic_route = false;
  plan.tm_c = tm.c;
  plan.tm_p = tm.p;
  plan.preferred_cutoff =
      std::max(1.0, solve_power(tm.c / (tm.p - 1.0), tm.p - 1.0, tol_tail));
  return plan;
}

template <typename F>
TailPlan plan_periodic(F&& f, const PeriodicStructure& ps, double tol_tail,
                       std::optional<double> lobe_hint, std::size_t budget) {
  if (!(ps.period > 0.0))
    throw QuadError("periodic structure requires a positive period");
  if (!(ps.power > 1.0))
    throw QuadError("periodic structure kernel power must exceed 1");
  TailPlan plan;
  plan.periodic_route = true;
  plan.P = ps.period;
  plan.p = ps.power;
  const double P = ps.period;
  const double p = ps.power;

  plan.min_cutoff = ps.min_cutoff;
  if (ps.known_mean) {
    plan.m = *ps.known_mean;
    if (ps.known_runint) plan.runint_const = *ps.known_runint;
    plan.runint_decay = ps.runint_decay;
    plan.envelope_decay = ps.envelope_decay;
    if (plan.envelope_decay && !(p + plan.envelope_decay->p > 1.0))
      throw QuadError("envelope_decay needs power + q > 1");
    if (!ps.known_runint && !ps.runint_decay && !ps.envelope_decay)
      throw QuadError(
          "periodic structure with known_mean needs known_runint, "
          "runint_decay, or envelope_decay");
    plan.window_start = P;
  } else {
    plan.need_alignment = true;
    plan.defect = ps.defect;
    double window_start = P;
    if (plan.defect) {
      if (!(plan.defect->p > 0.0) || plan.defect->c < 0.0)
        throw QuadError("periodic defect envelope must have c >= 0, p > 0");
      // Start the measurement window where defect contamination of the mean
      // perturbs the analytic tail by at most tol/8.
      const double w0 = std::pow(
          8.0 * plan.defect->c / ((p - 1.0) * tol_tail),
          1.0 / (p + plan.defect->p - 1.0));
      window_start = std::ceil(std::max(w0, P) / P) * P;
    }
    plan.window_start = window_start;
    const double W = window_start;
    // Pass 1: period mean of w over one aligned window.
    const double tol_w = std::max(
        tol_tail * P * (p - 1.0) * std::pow(W, p - 1.0) / 8.0, 1e-14 * P);
    auto wfun = [&](double t) { return f(t) * std::pow(t, p); };
    const auto bounds = spaced_boundaries(W, W + P, lobe_hint, budget / 2);
    auto win = adapt(wfun, bounds, tol_w, budget);
    plan.m = win.value / P;
    plan.mean_err = win.err / P;
    std::vector<Panel> sorted = win.store;
    std::sort(sorted.begin(), sorted.end(),
              [](const Panel& x, const Panel& y) { return x.a < y.a; });
    // Pass 2: first moment int t * w(t) dt over the same final panel layout,
    // giving exact prefixes of int H at the shared boundaries via
    //   int_W^x H dt = x H(x) - int_W^x t (w - m) dt.
    std::vector<Panel> moment(sorted.size());
    double moment_err = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      moment[i] = gk15([&](double t) { return t * wfun(t); }, sorted[i].a,
                       sorted[i].b);
      moment_err += moment[i].err;
    }
    plan.extra_panels = 2 * win.panels;
    // Prefixes of H(x) = int_W^x (w - m) dt at panel boundaries, plus the
    // first-order bound C_H >= sup |H| (within-panel slack valid for w >= 0).
    double run = 0.0, peakH = 0.0, slackH = 0.0;
    std::vector<double> Hb(sorted.size() + 1, 0.0);
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      const Panel& pan = sorted[i];
      const double len = pan.b - pan.a;
      if (pan.value < -1e-12 * std::max(1.0, std::abs(plan.m) * len))
        throw QuadError(
            "periodic tail measurement assumes a nonnegative envelope");
      run += pan.value - plan.m * len;
      Hb[i + 1] = run;
      peakH = std::max(peakH, std::abs(run));
      slackH = std::max(slackH,
                        std::max(std::max(pan.value, 0.0),
                                 std::abs(plan.m) * len));
    }
    const double CH = peakH + slackH + win.err;
    // Period mean of H: int_W^{W+P} H dt = (W+P) H(W+P) - int t (w - m) dt
    // with H(W+P) = run (vanishing up to quadrature error).
    const double m1 = kahan_total(moment);  // int_W^{W+P} t w dt
    const double intH =
        (W + P) * run - (m1 - plan.m * (W * P + 0.5 * P * P));
    plan.h_bar = intH / P;
    plan.h_err = (moment_err + (W + P) * win.err) / P;
    // Bound C_G >= sup |int_T^x (H - h_bar)| from prefixes of int H at the
    // boundaries plus within-panel slack (|H| <= C_H inside a panel).
    double peakG = 0.0, slackG = 0.0, m1_prefix = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      const Panel& pan = sorted[i];
      const double len = pan.b - pan.a;
      m1_prefix += moment[i].value;
      // int_W^{b_i} H dt by the same parts identity at the prefix boundary.
      const double b = pan.b;
      const double intH_prefix =
          b * Hb[i + 1] - (m1_prefix - plan.m * 0.5 * (b * b - W * W));
      const double g = intH_prefix - plan.h_bar * (b - W);
      peakG = std::max(peakG, std::abs(g));
      slackG = std::max(slackG, (CH + std::abs(plan.h_bar)) * len);
    }
    plan.CG = peakG + slackG + moment_err + (W + P) * win.err +
              plan.h_err * P;
    plan.second_order = true;
    // Cancellation allowance: the parts identities subtract O(m W P)-sized
    // quantities, so grant the results a few ulps of that magnitude.
    const double ulp_allow = 1e-15 * (W + P) * (W + P) *
                             (std::abs(plan.m) + std::abs(plan.h_bar) + 1.0);
    plan.h_err += ulp_allow / P;
    plan.CG += ulp_allow;
    if (plan.defect) {
      // Contamination of the periodic extrapolation by the decaying defect,
      // evaluated at the window (conservative for any cutoff >= W).
      const double md = plan.defect->c * std::pow(W, -plan.defect->p);
      plan.mean_err += md;
      plan.h_err += md * P;
      plan.CG += 2.0 * md * P * P;
    }
  }

  // Choose the preferred cutoff: split tol_tail across active remainder terms.
  const int terms = (plan.second_order ? 1 + (plan.h_err > 0.0 ? 1 : 0) : 1) +
                    (plan.runint_decay ? 1 : 0) +
                    (plan.envelope_decay ? 1 : 0) + (plan.defect ? 1 : 0) +
                    (plan.mean_err > 0.0 ? 1 : 0);
  const double share = tol_tail / terms;
  double T = std::max(plan.window_start, P);
  if (plan.second_order) {
    T = std::max(T, solve_power(p * plan.CG, p + 1.0, share));
    if (plan.h_err > 0.0)
      T = std::max(T, solve_power(plan.h_err, p, share));
  } else {
    T = std::max(T, solve_power(plan.runint_const, p, share));
  }
  if (plan.runint_decay)
    T = std::max(T, solve_power(plan.runint_decay->c, p + plan.runint_decay->p,
                                share));
  if (plan.envelope_decay)
    T = std::max(T, solve_power(
                        plan.envelope_decay->c / (p + plan.envelope_decay->p - 1.0),
                        p + plan.envelope_decay->p - 1.0, share));
  if (plan.defect)
    T = std::max(T, solve_power(plan.defect->c / (p + plan.defect->p - 1.0),
                                p + plan.defect->p - 1.0, share));
  if (plan.mean_err > 0.0)
    T = std::max(T, solve_power(plan.mean_err / (p - 1.0), p - 1.0, share));
  plan.preferred_cutoff = plan.align(T);
  return plan;
}

inline TailPlan plan_log_terms(const std::vector<PeriodicLogTerm>& terms,
                               double tol_tail,
                               std::optional<double> lobe_hint,
                               std::size_t budget) {
  TailPlan plan;
  plan.log_route = true;
  plan.pieces.reserve(terms.size());
  double min_T = 1.0;
  for (const PeriodicLogTerm& term : terms) {
    if (!term.factor) throw QuadError("periodic log term has no factor");
    if (!(term.period > 0.0) || !(term.power > 1.0) || term.log_power < 0)
      throw QuadError("periodic log term needs period > 0, power > 1, j >= 0");
    LogPiece lp;
    lp.coeff = term.coeff;
    lp.p = term.power;
    lp.j = term.log_power;
    const double P = term.period;
    // Measure the period mean and a phase-free run-integral bound
    // (prefix range + within-panel slack, valid for nonnegative factors).
    const auto bounds = spaced_boundaries(P, 2.0 * P, lobe_hint, budget / 4);
    auto win = adapt(term.factor, bounds, 1e-13 * std::max(1.0, P), budget / 2);
    lp.m = win.value / P;
    lp.e_m = win.err / P;
    std::vector<Panel> sorted = win.store;
    std::sort(sorted.begin(), sorted.end(),
              [](const Panel& x, const Panel& y) { return x.a < y.a; });
    double run = 0.0, lo = 0.0, hi = 0.0, slack = 0.0;
    for (const Panel& pan : sorted) {
      const double len = pan.b - pan.a;
      if (pan.value < -1e-12 * std::max(1.0, std::abs(lp.m) * len))
        throw QuadError("periodic log terms assume nonnegative factors");
      run += pan.value - lp.m * len;
      lo = std::min(lo, run);
      hi = std::max(hi, run);
      slack = std::max(slack, std::max(std::max(pan.value, 0.0),
                                       std::abs(lp.m) * len));
    }
    lp.C = (hi - lo) + 2.0 * slack + 2.0 * win.err;
    plan.extra_panels += win.panels;
    plan.pieces.push_back(lp);
    // The remainder bound needs T^-p log^j T decreasing: T >= e^(j/p).
    min_T = std::max(min_T, std::exp(double(lp.j) / lp.p));
    min_T = std::max(min_T, P);
  }
  plan.min_cutoff = min_T;
  // Fixed-point solve for the smallest T with bound(T) <= tol_tail: freeze
  // the log factors, solve the dominant power, iterate.
  double T = min_T;
  for (int iter = 0; iter < 60; ++iter) {
    if (plan.bound(T) <= tol_tail) break;
    T *= 1.5;
    if (!(T < 1e300)) throw QuadError("periodic log tail cannot reach tolerance");
  }
  // Tighten back down by bisection between T/1.5 and T.
  if (plan.bound(min_T) > tol_tail) {
    double loT = std::max(min_T, T / 1.5), hiT = T;
    for (int iter = 0; iter < 80; ++iter) {
      const double mid = 0.5 * (loT + hiT);
      if (plan.bound(mid) <= tol_tail)
        hiT = mid;
      else
        loT = mid;
    }
    T = hiT;
  } else {
    T = min_T;
  }
  plan.preferred_cutoff = plan.align(T);
  return plan;
}

}  // namespace detail

// Integrates f over (0, infinity). The cutoff is chosen so the certified tail
// remainder is at most tol/2; the panel pass targets the other half.
inline QuadResult integrate_semi_infinite(const Integrand& f, double tol,
                                          std::size_t budget = 2000000) {
  if (!f.eval) throw QuadError("integrand has no eval function");
  if (!(tol > 0.0)) throw QuadError("tolerance must be positive");
  if (!f.tail_model && !f.periodic && f.periodic_log_terms.empty())
    throw QuadError(
        "cannot bound the tail: integrand declares neither a tail_model nor "
        "periodic structure");

  const double tol_tail = 0.5 * tol;
  const double tol_quad = 0.5 * tol;

  std::optional<detail::TailPlan> plan;
  if (f.tail_model) plan = detail::plan_tail_model(*f.tail_model, tol_tail);
  if (f.periodic) {
    auto pp = detail::plan_periodic(f.eval, *f.periodic, tol_tail,
                                    f.period_hint, budget);
    if (!plan || pp.preferred_cutoff < plan->preferred_cutoff) plan = pp;
  }
  if (!f.periodic_log_terms.empty()) {
    auto lp = detail::plan_log_terms(f.periodic_log_terms, tol_tail,
                                     f.period_hint, budget);
    if (!plan || lp.preferred_cutoff < plan->preferred_cutoff) plan = lp;
  }

  // Panel budget guard: cap the cutoff if the lobe count would explode, and
  // report honestly when the requested tolerance cannot be certified.
  bool capped = false;
  double T = plan->preferred_cutoff;
  const double lobe = f.period_hint.value_or(0.0);
  const std::size_t max_init = budget * 3 / 4;
  if (lobe > 0.0 && T / lobe > double(max_init)) {
    T = plan->align(double(max_init) * lobe);
    capped = true;
  }

  const auto bounds = detail::spaced_boundaries(0.0, T, f.period_hint, max_init);
  auto out = detail::adapt(f.eval, bounds, tol_quad, budget);

  QuadResult r;
  r.cutoff = T;
  r.panels = out.panels + plan->extra_panels;
  r.value = out.value + plan->analytic_value(T);
  r.abs_error_est = out.err + plan->extra_panel_err;
  r.tail_bound = plan->bound(T);
  r.status = (!capped && out.converged) ? QuadStatus::ok
                                        : QuadStatus::tolerance_not_met;
  return r;
}

}  // namespace khinchin::quad
