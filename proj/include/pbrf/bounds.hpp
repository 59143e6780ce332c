#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>

#include <json.hpp>

#include "pbrf/bound_math.hpp"

namespace pbrf {

enum class BoundName { PBkl, SH, C1, C2, Lambda, COracle, CAligned };

std::string bound_name_str(BoundName name);

// Everything that produced a bound value, echoed into reports so each row
// can be recomputed independently.
struct BoundIngredients {
  double gibbs_emp = std::numeric_limits<double>::quiet_NaN();
  double d_emp = std::numeric_limits<double>::quiet_NaN();
  double e_emp = std::numeric_limits<double>::quiet_NaN();
  double kl_div = std::numeric_limits<double>::quiet_NaN();
  std::int64_t n_gibbs = 0;
  std::int64_t n_pair = 0;
  double delta = std::numeric_limits<double>::quiet_NaN();
  double lambda = std::numeric_limits<double>::quiet_NaN();
  bool trivial = false;  // set iff mv_bound >= 0.5
};

struct BoundReport {
  BoundName name = BoundName::PBkl;
  double mv_bound = 0.0;  // values > 1 are reported as-is, not clamped
  std::optional<double> gibbs_bound;
  BoundIngredients ingredients;

  // Flat object: name, mv_bound, gibbs_bound plus the ingredient fields.
  nlohmann::ordered_json to_json() const;
};

// kl bound on the Gibbs loss inverted at (KL + ln(c(n)/delta))/n, doubled
// for the majority vote.
BoundReport pbkl(double gibbs_emp, std::int64_t n, double kl_div, double delta,
                 XiMode xi_mode);

// Single-hypothesis kl bound on the majority vote evaluated on a held-out
// validation set; no factor 2 and KL = 0.
BoundReport sh_bound(double mv_emp_on_val, std::int64_t n_val, double delta,
                     XiMode xi_mode);

// Oracle bound 1 - m1^2/m2 from the margin moments; requires m1 > 0.
double cbound_oracle(double m1, double m2);

// Empirical bound from an upper kl bound b on the Gibbs loss and a lower kl
// bound d on the disagreement, delta split evenly between the two.
BoundReport c1_bound(double gibbs_emp, std::int64_t n_gibbs, double d_emp,
                     std::int64_t n_pair, double kl_div, double delta);

// Empirical bound from the trivalent (disagreement, joint error) supremum.
BoundReport c2_bound(double d_emp, double e_emp, std::int64_t n_pair,
                     double kl_div, double delta);

// Pinsker-relaxed bound at a fixed lambda in (0, 2); always uses 2*sqrt(n).
BoundReport lambda_bound(double gibbs_emp, std::int64_t n, double kl_div,
                         double delta, double lambda);

}  // namespace pbrf
