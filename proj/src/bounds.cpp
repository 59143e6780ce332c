#include "pbrf/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "pbrf/errors.hpp"

namespace pbrf {

namespace {

BoundReport finish(BoundReport report) {
  report.ingredients.trivial = report.mv_bound >= 0.5;
  return report;
}

}  // namespace

std::string bound_name_str(BoundName name) {
  switch (name) {
    case BoundName::PBkl:
      return "pbkl";
    case BoundName::SH:
      return "sh";
    case BoundName::C1:
      return "c1";
    case BoundName::C2:
      return "c2";
    case BoundName::Lambda:
      return "lambda";
    case BoundName::COracle:
      return "c_oracle";
    case BoundName::CAligned:
      return "c_aligned";
  }
  return "?";
}

nlohmann::ordered_json BoundReport::to_json() const {
  nlohmann::ordered_json j;
  j["bound"] = bound_name_str(name);
  j["mv_bound"] = mv_bound;
  if (gibbs_bound)
    j["gibbs_bound"] = *gibbs_bound;
  else
    j["gibbs_bound"] = nullptr;
  auto put = [&j](const char* key, double v) {
    if (std::isnan(v))
      j[key] = nullptr;
    else
      j[key] = v;
  };
  put("gibbs_emp", ingredients.gibbs_emp);
  put("d_emp", ingredients.d_emp);
  put("e_emp", ingredients.e_emp);
  put("kl_div", ingredients.kl_div);
  j["n_gibbs"] = ingredients.n_gibbs;
  j["n_pair"] = ingredients.n_pair;
  put("delta", ingredients.delta);
  put("lambda", ingredients.lambda);
  j["trivial"] = ingredients.trivial;
  return j;
}

BoundReport pbkl(double gibbs_emp, std::int64_t n, double kl_div, double delta,
                 XiMode xi_mode) {
  const ComplexityTerm term{kl_div, n, delta, xi_mode};
  const double b = kl_inv_upper(gibbs_emp, term.rhs());

  BoundReport report;
  report.name = BoundName::PBkl;
  report.gibbs_bound = b;
  report.mv_bound = 2.0 * b;
  report.ingredients.gibbs_emp = gibbs_emp;
  report.ingredients.kl_div = kl_div;
  report.ingredients.n_gibbs = n;
  report.ingredients.delta = delta;
  return finish(report);
}

BoundReport sh_bound(double mv_emp_on_val, std::int64_t n_val, double delta,
                     XiMode xi_mode) {
  if (n_val < 1) throw ConfigError("sh_bound requires a nonempty validation set");
  const ComplexityTerm term{0.0, n_val, delta, xi_mode};

  BoundReport report;
  report.name = BoundName::SH;
  report.mv_bound = kl_inv_upper(mv_emp_on_val, term.rhs());
  report.ingredients.gibbs_emp = mv_emp_on_val;
  report.ingredients.kl_div = 0.0;
  report.ingredients.n_gibbs = n_val;
  report.ingredients.delta = delta;
  return finish(report);
}

double cbound_oracle(double m1, double m2) {
  if (m1 <= 0.0) throw NumericError("oracle C-bound requires positive first moment");
  if (m2 <= 0.0) throw NumericError("oracle C-bound requires positive second moment");
  if (m1 * m1 > m2 + 1e-12)
    throw NumericError("margin moments violate m1^2 <= m2");
  return 1.0 - m1 * m1 / m2;
}

BoundReport c1_bound(double gibbs_emp, std::int64_t n_gibbs, double d_emp,
                     std::int64_t n_pair, double kl_div, double delta) {
  // delta/2 each for the Gibbs upper bound and the disagreement lower bound.
  const double half = delta / 2.0;
  const double rhs_b =
      (kl_div + std::log(xi(n_gibbs) / half)) / static_cast<double>(n_gibbs);
  const double rhs_d =
      (2.0 * kl_div + std::log(xi(n_pair) / half)) / static_cast<double>(n_pair);
  const double b = kl_inv_upper(gibbs_emp, rhs_b);
  const double d = kl_inv_lower(d_emp, rhs_d);

  BoundReport report;
  report.name = BoundName::C1;
  report.gibbs_bound = b;
  if (b >= 0.5 || 1.0 - 2.0 * d <= 0.0) {
    report.mv_bound = 1.0;
  } else {
    const double num = 1.0 - 2.0 * b;
    report.mv_bound = std::max(0.0, 1.0 - num * num / (1.0 - 2.0 * d));
  }
  report.ingredients.gibbs_emp = gibbs_emp;
  report.ingredients.d_emp = d_emp;
  report.ingredients.kl_div = kl_div;
  report.ingredients.n_gibbs = n_gibbs;
  report.ingredients.n_pair = n_pair;
  report.ingredients.delta = delta;
  return finish(report);
}

BoundReport c2_bound(double d_emp, double e_emp, std::int64_t n_pair,
                     double kl_div, double delta) {
  if (n_pair < 1) throw ConfigError("c2_bound requires n_pair >= 1");
  const double n = static_cast<double>(n_pair);
  const double rhs = (2.0 * kl_div + std::log((xi(n_pair) + n) / delta)) / n;
  const TrivalentSup sup = trivalent_cbound_sup(d_emp, e_emp, rhs);

  BoundReport report;
  report.name = BoundName::C2;
  report.mv_bound = sup.value;
  report.ingredients.d_emp = d_emp;
  report.ingredients.e_emp = e_emp;
  report.ingredients.kl_div = kl_div;
  report.ingredients.n_pair = n_pair;
  report.ingredients.delta = delta;
  return finish(report);
}

BoundReport lambda_bound(double gibbs_emp, std::int64_t n, double kl_div,
                         double delta, double lambda) {
  if (!(lambda > 0.0 && lambda < 2.0))
    throw NumericError("lambda must lie in (0,2)");
  if (n < 1) throw ConfigError("lambda_bound requires n >= 1");
  const double nd = static_cast<double>(n);
  const double complexity = kl_div + std::log(2.0 * std::sqrt(nd) / delta);
  const double b = gibbs_emp / (1.0 - lambda / 2.0) +
                   complexity / (lambda * (1.0 - lambda / 2.0) * nd);

  BoundReport report;
  report.name = BoundName::Lambda;
  report.gibbs_bound = b;
  report.mv_bound = 2.0 * b;
  report.ingredients.gibbs_emp = gibbs_emp;
  report.ingredients.kl_div = kl_div;
  report.ingredients.n_gibbs = n;
  report.ingredients.delta = delta;
  report.ingredients.lambda = lambda;
  return finish(report);
}

}  // namespace pbrf
