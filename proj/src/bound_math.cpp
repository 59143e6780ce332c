#include "pbrf/bound_math.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pbrf/errors.hpp"

namespace pbrf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// One summand p*ln(p/q) with 0*ln(0) = 0; +inf when p > 0 and q = 0.
double kl_term(double p, double q) {
  if (p <= 0.0) return 0.0;
  if (q <= 0.0) return kInf;
  return p * std::log(p / q);
}

}  // namespace

double ComplexityTerm::rhs() const {
  if (n < 1) throw NumericError("complexity term requires n >= 1");
  if (!(delta > 0.0 && delta < 1.0))
    throw ConfigError("delta must lie in (0,1)");
  if (kl_div < 0.0) throw NumericError("KL(rho||pi) must be nonnegative");
  const double c =
      xi_mode == XiMode::Xi ? xi(n) : 2.0 * std::sqrt(static_cast<double>(n));
  return (kl_div + std::log(c / delta)) / static_cast<double>(n);
}

double kl_bernoulli(double p, double q) {
  const double v = kl_term(p, q) + kl_term(1.0 - p, 1.0 - q);
  return v > 0.0 ? v : 0.0;
}

double kl_trivalent(double p1, double p2, double q1, double q2) {
  const double v = kl_term(p1, q1) + kl_term(p2, q2) +
                   kl_term(1.0 - p1 - p2, 1.0 - q1 - q2);
  return v > 0.0 ? v : 0.0;
}

double xi(std::int64_t n) {
  if (n < 1) throw NumericError("xi(n) requires n >= 1");
  const double nd = static_cast<double>(n);
  if (n > kXiExactLimit) return 2.0 * std::sqrt(nd);
  const double ln_n = std::log(nd);
  double sum = 2.0;  // k = 0 and k = n contribute 1 each (0^0 = 1)
  double ln_binom = 0.0;
  for (std::int64_t k = 1; k < n; ++k) {
    const double kd = static_cast<double>(k);
    ln_binom += std::log(nd - kd + 1.0) - std::log(kd);
    sum += std::exp(ln_binom + kd * (std::log(kd) - ln_n) +
                    (nd - kd) * std::log1p(-kd / nd));
  }
  return sum;
}

double kl_inv_upper(double p_hat, double rhs) {
  if (std::isnan(rhs) || rhs < 0.0)
    throw NumericError("kl_inv_upper requires rhs >= 0");
  if (rhs == kInf) return 1.0;
  if (kl_bernoulli(p_hat, 1.0) <= rhs) return 1.0;  // only when p_hat = 1
  double lo = p_hat, hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (kl_bernoulli(p_hat, mid) <= rhs ? lo : hi) = mid;
  }
  return lo;
}

double kl_inv_lower(double p_hat, double rhs) {
  if (std::isnan(rhs) || rhs < 0.0)
    throw NumericError("kl_inv_lower requires rhs >= 0");
  if (rhs == kInf) return 0.0;
  if (kl_bernoulli(p_hat, 0.0) <= rhs) return 0.0;  // only when p_hat = 0
  double lo = 0.0, hi = p_hat;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (kl_bernoulli(p_hat, mid) <= rhs ? hi : lo) = mid;
  }
  return hi;
}

namespace {

// 1 - (1-(2e+d))^2 / (1-2d); caller guarantees 1-2d > 0.
double cbound_objective(double d, double e) {
  const double u = 1.0 - (2.0 * e + d);
  return 1.0 - u * u / (1.0 - 2.0 * d);
}

// Unconstrained minimizer over d of kl(d_hat, e_hat || d, e) at fixed e,
// clamped into the open domain (solves -d_hat/d + (1-d_hat-e_hat)/(1-d-e) = 0).
double kl_argmin_d(double d_hat, double e_hat, double e) {
  const double hi = (1.0 - e) * (1.0 - 1e-15);
  double d = e_hat < 1.0 ? d_hat * (1.0 - e) / (1.0 - e_hat) : 0.0;
  return std::clamp(d, 0.0, hi);
}

struct DInterval {
  double lo = 0.0, hi = 0.0;
};

// Intersection of the kl level set at fixed e with the C2 constraints
// d <= 2(sqrt(e)-e) and 2e + d < 1. Returns false when empty.
bool feasible_d_interval(double d_hat, double e_hat, double e, double rhs,
                         DInterval* out) {
  if (e < 0.0 || 2.0 * e >= 1.0) return false;
  const double cap = std::min(2.0 * (std::sqrt(e) - e),
                              (1.0 - 2.0 * e) * (1.0 - 1e-12));
  if (cap < 0.0) return false;

  auto kl_at = [&](double d) { return kl_trivalent(d_hat, e_hat, d, e); };
  const double d_star = kl_argmin_d(d_hat, e_hat, e);
  if (kl_at(d_star) > rhs) return false;

  double lo = 0.0;
  if (kl_at(0.0) > rhs) {
    double a = 0.0, b = d_star;  // kl(a) > rhs >= kl(b)
    for (int it = 0; it < 100 && b - a > 1e-15; ++it) {
      const double mid = 0.5 * (a + b);
      (kl_at(mid) <= rhs ? b : a) = mid;
    }
    lo = b;
  }
  if (lo > cap) return false;

  const double d_dom_hi = (1.0 - e) * (1.0 - 1e-15);
  double hi = d_dom_hi;
  if (kl_at(d_dom_hi) > rhs) {
    double a = d_star, b = d_dom_hi;  // kl(a) <= rhs < kl(b)
    for (int it = 0; it < 100 && b - a > 1e-15; ++it) {
      const double mid = 0.5 * (a + b);
      (kl_at(mid) <= rhs ? a : b) = mid;
    }
    hi = a;
  }
  out->lo = lo;
  out->hi = std::min(hi, cap);
  return out->lo <= out->hi;
}

// Best objective at fixed e. The objective is unimodal in d with its peak on
// the d = 2e diagonal (df/dd has the sign of 2e - d), so clamping 2e into
// the feasible d interval is exact.
double best_at_e(double d_hat, double e_hat, double e, double rhs,
                 bool* feasible) {
  DInterval iv;
  if (!feasible_d_interval(d_hat, e_hat, e, rhs, &iv)) {
    *feasible = false;
    return -kInf;
  }
  *feasible = true;
  return cbound_objective(std::clamp(2.0 * e, iv.lo, iv.hi), e);
}

}  // namespace

TrivalentSup trivalent_cbound_sup(double d_hat, double e_hat, double rhs) {
  if (d_hat < 0.0 || e_hat < 0.0 || d_hat + e_hat > 1.0 + 1e-12)
    throw NumericError("trivalent_cbound_sup requires d_hat + e_hat <= 1");
  if (std::isnan(rhs) || rhs < 0.0)
    throw NumericError("trivalent_cbound_sup requires rhs >= 0");

  // Zero budget collapses the level set to the empirical point.
  if (rhs == 0.0) {
    if (2.0 * e_hat + d_hat < 1.0 && d_hat <= 2.0 * (std::sqrt(e_hat) - e_hat))
      return {std::clamp(cbound_objective(d_hat, e_hat), 0.0, 1.0), true};
    return {1.0, false};
  }
  if (rhs == kInf) return {1.0, true};

  // e-range of the kl ball (superset of the feasible e's): the min over d of
  // the kl is convex in e and zero at e = e_hat, so its level set is an
  // interval found by bisection.
  auto phi = [&](double e) {
    return kl_trivalent(d_hat, e_hat, kl_argmin_d(d_hat, e_hat, e), e);
  };
  const double e_dom_hi = 1.0 - 1e-12;
  double ball_lo = 0.0;
  if (phi(0.0) > rhs) {
    double a = 0.0, b = e_hat;
    for (int it = 0; it < 100 && b - a > 1e-15; ++it) {
      const double mid = 0.5 * (a + b);
      (phi(mid) <= rhs ? b : a) = mid;
    }
    ball_lo = b;
  }
  double ball_hi = e_dom_hi;
  if (phi(e_dom_hi) > rhs) {
    double a = std::min(e_hat, e_dom_hi), b = e_dom_hi;
    for (int it = 0; it < 100 && b - a > 1e-15; ++it) {
      const double mid = 0.5 * (a + b);
      (phi(mid) <= rhs ? a : b) = mid;
    }
    ball_hi = a;
  }
  const double scan_lo = ball_lo;
  const double scan_hi = std::min(ball_hi, 0.5 * (1.0 - 1e-12));
  if (scan_lo > scan_hi) return {1.0, false};

  constexpr int kGridPoints = 10000;
  const double step = (scan_hi - scan_lo) / kGridPoints;
  double best = -kInf, best_e = scan_lo;
  bool any_feasible = false;
  for (int i = 0; i <= kGridPoints; ++i) {
    const double e = scan_lo + step * i;
    bool ok = false;
    const double val = best_at_e(d_hat, e_hat, e, rhs, &ok);
    if (ok) {
      any_feasible = true;
      if (val > best) {
        best = val;
        best_e = e;
      }
    }
  }
  if (!any_feasible) return {1.0, false};

  // Golden-section refinement around the best grid cell.
  double a = std::max(scan_lo, best_e - step);
  double b = std::min(scan_hi, best_e + step);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  bool ok = false;
  double f1 = best_at_e(d_hat, e_hat, x1, rhs, &ok);
  double f2 = best_at_e(d_hat, e_hat, x2, rhs, &ok);
  for (int it = 0; it < 120 && b - a > 1e-14; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = best_at_e(d_hat, e_hat, x2, rhs, &ok);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = best_at_e(d_hat, e_hat, x1, rhs, &ok);
    }
  }
  best = std::max({best, f1, f2});
  return {std::clamp(best, 0.0, 1.0), true};
}

}  // namespace pbrf
