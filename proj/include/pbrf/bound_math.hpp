#pragma once

#include <cstdint>

namespace pbrf {

// Complexity constant used inside the kl bounds: either the combinatorial
// xi(n) or its upper bound 2*sqrt(n).
enum class XiMode { Xi, TwoSqrtN };

// Deviation term (KL(rho||pi) + ln(c(n)/delta)) / n shared by the kl-form
// bounds, with c(n) chosen by xi_mode.
struct ComplexityTerm {
  double kl_div = 0.0;    // KL(rho||pi), >= 0
  std::int64_t n = 0;     // effective sample count, >= 1
  double delta = 0.05;    // confidence, in (0,1)
  XiMode xi_mode = XiMode::Xi;

  double rhs() const;
};

// kl(p||q) between Bernoulli biases, with the 0*ln(0) = 0 convention.
// Returns +inf for the (p>0, q=0) and (p<1, q=1) cases.
double kl_bernoulli(double p, double q);

// KL divergence between two trivalent distributions (p1, p2, 1-p1-p2) and
// (q1, q2, 1-q1-q2), same conventions as kl_bernoulli.
double kl_trivalent(double p1, double p2, double q1, double q2);

// xi(n) = sum_{k=0}^{n} C(n,k) (k/n)^k (1-k/n)^(n-k), evaluated per term in
// the log domain. Satisfies sqrt(n) <= xi(n) <= 2*sqrt(n). Beyond
// kXiExactLimit the 2*sqrt(n) upper bound is returned instead.
double xi(std::int64_t n);
inline constexpr std::int64_t kXiExactLimit = 100000;

// Largest q in [p_hat, 1] with kl(p_hat||q) <= rhs (upper confidence bound).
// Saturates at 1 when the budget is never exhausted (p_hat = 1 or rhs = inf).
double kl_inv_upper(double p_hat, double rhs);

// Smallest q in [0, p_hat] with kl(p_hat||q) <= rhs (lower confidence bound).
double kl_inv_lower(double p_hat, double rhs);

// sup over (d, e) with kl(d_hat, e_hat || d, e) <= rhs, d <= 2(sqrt(e)-e)
// and 2e + d < 1 of 1 - (1-(2e+d))^2 / (1-2d). feasible = false (value 1.0)
// when no (d, e) satisfies the constraints.
struct TrivalentSup {
  double value = 1.0;
  bool feasible = false;
};
TrivalentSup trivalent_cbound_sup(double d_hat, double e_hat, double rhs);

}  // namespace pbrf
