#include "pbrf/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <string>

#include "pbrf/errors.hpp"
#include "pbrf/parallel.hpp"

namespace pbrf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double kl_to_uniform(std::span<const double> rho) {
  const double m = static_cast<double>(rho.size());
  double kl = 0.0;
  for (double p : rho)
    if (p > 0.0) kl += p * std::log(p * m);
  return kl > 0.0 ? kl : 0.0;
}

}  // namespace

std::string provenance_str(Provenance p) {
  switch (p) {
    case Provenance::Uniform:
      return "uniform";
    case Provenance::LambdaOpt:
      return "lambda";
    case Provenance::COpt:
      return "cbound";
  }
  return "?";
}

LambdaOptResult optimize_lambda(std::span<const double> per_tree_loss,
                                std::int64_t n_gibbs, double delta) {
  const std::size_t m = per_tree_loss.size();
  if (m == 0) throw ConfigError("optimize_lambda: no voters");
  if (n_gibbs < 1) throw ConfigError("optimize_lambda: n_gibbs must be >= 1");
  const double n = static_cast<double>(n_gibbs);
  const double ln_term = std::log(2.0 * std::sqrt(n) / delta);

  std::vector<double> rho(m, 1.0 / static_cast<double>(m));
  auto bound_at = [&](const std::vector<double>& r, double lambda) {
    double gibbs = 0.0;
    for (std::size_t i = 0; i < m; ++i) gibbs += r[i] * per_tree_loss[i];
    const double c = kl_to_uniform(r) + ln_term;
    return gibbs / (1.0 - lambda / 2.0) + c / (lambda * (1.0 - lambda / 2.0) * n);
  };

  double lambda = 1.0;
  double best = bound_at(rho, lambda);
  LambdaOptResult out;
  out.converged = false;

  for (int it = 0; it < 200; ++it) {
    // rho-step: exact minimizer for fixed lambda (Gibbs posterior).
    const double l_min = *std::min_element(per_tree_loss.begin(), per_tree_loss.end());
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      rho[i] = std::exp(-lambda * n * (per_tree_loss[i] - l_min));
      total += rho[i];
    }
    for (auto& p : rho) p /= total;

    // lambda-step: golden-section on the unimodal one-dimensional bound.
    {
      double a = 1e-12, b = 2.0 - 1e-12;
      const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
      double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
      double f1 = bound_at(rho, x1), f2 = bound_at(rho, x2);
      while (b - a > 1e-9) {
        if (f1 > f2) {
          a = x1;
          x1 = x2;
          f1 = f2;
          x2 = a + gr * (b - a);
          f2 = bound_at(rho, x2);
        } else {
          b = x2;
          x2 = x1;
          f2 = f1;
          x1 = b - gr * (b - a);
          f1 = bound_at(rho, x1);
        }
      }
      const double candidate = f1 < f2 ? x1 : x2;
      if (bound_at(rho, candidate) <= bound_at(rho, lambda)) lambda = candidate;
    }

    const double current = bound_at(rho, lambda);
    if (current > best + 1e-9)
      throw NumericError("lambda-bound increased during alternating minimization");
    out.bound_trace.push_back(current);
    out.iterations = it + 1;
    const double improvement = best - current;
    best = std::min(best, current);
    if (improvement < 1e-9) {
      out.converged = true;
      break;
    }
  }
  if (!out.converged)
    std::cerr << "warning: lambda optimization hit the iteration cap; "
                 "returning best iterate\n";

  out.rho.weights = rho;
  out.rho.provenance = Provenance::LambdaOpt;
  out.rho.lambda_star = lambda;

  double gibbs = 0.0;
  for (std::size_t i = 0; i < m; ++i) gibbs += rho[i] * per_tree_loss[i];
  out.report = lambda_bound(gibbs, n_gibbs, kl_to_uniform(rho), delta, lambda);
  return out;
}

SelfComplementedSet self_complement(const Ensemble& ens) {
  if (ens.size() == 0) throw ConfigError("self_complement: empty ensemble");
  return SelfComplementedSet{&ens};
}

std::vector<double> AlignedPosterior::full() const {
  const double c = pair_mass();
  std::vector<double> rho(2 * q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    rho[i] = q[i];
    rho[q.size() + i] = c - q[i];
  }
  return rho;
}

std::vector<double> AlignedPosterior::signed_vote() const {
  const double c = pair_mass();
  std::vector<double> s(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) s[i] = 2.0 * q[i] - c;
  return s;
}

namespace {

// Projection onto {s in [-c, c]^m : a.s = mu}: clip(z - tau a) with tau
// solved by bisection (the constraint value is nonincreasing in tau).
class BoxAffineProjector {
 public:
  BoxAffineProjector(std::span<const double> a, double c, double mu)
      : a_(a.begin(), a.end()), c_(c), mu_(mu) {}

  void project(const std::vector<double>& z, std::vector<double>* out) const {
    double lo = -1.0, hi = 1.0;
    while (constraint_at(z, lo) < mu_ && lo > -1e18) lo *= 2.0;
    while (constraint_at(z, hi) > mu_ && hi < 1e18) hi *= 2.0;
    if (constraint_at(z, lo) < mu_ || constraint_at(z, hi) > mu_)
      throw NumericError("box/affine projection: target moment unreachable");
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (constraint_at(z, mid) >= mu_ ? lo : hi) = mid;
    }
    const double tau = 0.5 * (lo + hi);
    out->resize(z.size());
    for (std::size_t i = 0; i < z.size(); ++i)
      (*out)[i] = std::clamp(z[i] - tau * a_[i], -c_, c_);
  }

 private:
  double constraint_at(const std::vector<double>& z, double tau) const {
    double v = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i)
      v += a_[i] * std::clamp(z[i] - tau * a_[i], -c_, c_);
    return v;
  }

  std::vector<double> a_;
  double c_, mu_;
};

void mat_vec(const SquareMatrix& g, const std::vector<double>& x,
             std::vector<double>* out) {
  const std::size_t m = g.n;
  out->assign(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < m; ++j) acc += g.at(i, j) * x[j];
    (*out)[i] = acc;
  }
}

double quad_form(const SquareMatrix& g, const std::vector<double>& x) {
  double acc = 0.0;
  for (std::size_t i = 0; i < g.n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < g.n; ++j) row += g.at(i, j) * x[j];
    acc += x[i] * row;
  }
  return acc;
}

// Largest |eigenvalue| of P G P with P the projector onto {a.x = 0},
// estimated by power iteration. Sets the initial step length.
double tangent_spectral_norm(const SquareMatrix& g, const std::vector<double>& a) {
  const std::size_t m = g.n;
  double a2 = 0.0;
  for (double v : a) a2 += v * v;
  auto project_tangent = [&](std::vector<double>& x) {
    if (a2 <= 0.0) return;
    double dot = 0.0;
    for (std::size_t i = 0; i < m; ++i) dot += a[i] * x[i];
    for (std::size_t i = 0; i < m; ++i) x[i] -= dot / a2 * a[i];
  };

  std::vector<double> v(m), w;
  for (std::size_t i = 0; i < m; ++i) v[i] = 1.0 + 0.37 * std::sin(1.0 + 2.1 * i);
  project_tangent(v);
  double norm = 0.0;
  for (int it = 0; it < 80; ++it) {
    mat_vec(g, v, &w);
    project_tangent(w);
    norm = 0.0;
    for (double x : w) norm += x * x;
    norm = std::sqrt(norm);
    if (norm <= 1e-300) break;
    for (std::size_t i = 0; i < m; ++i) v[i] = w[i] / norm;
  }
  return norm;
}

}  // namespace

double max_first_moment(const OobStatistics& stats) {
  const std::size_t m = stats.per_tree_loss.size();
  double mu_max = 0.0;
  for (double loss : stats.per_tree_loss) mu_max += std::abs(1.0 - 2.0 * loss);
  return mu_max / static_cast<double>(m);
}

std::vector<double> default_mu_grid(const OobStatistics& stats, int points) {
  const double mu_max = max_first_moment(stats);
  if (mu_max <= 0.0)
    throw NumericError("all voters are at loss 1/2; no positive first moment is achievable");
  const double hi = mu_max * (1.0 - 1e-9);
  const double lo = std::max(mu_max * 1e-3, 1e-6);
  std::vector<double> grid;
  if (points <= 1 || lo >= hi) return {hi};
  const double ratio = std::log(hi / lo);
  for (int k = 0; k < points; ++k)
    grid.push_back(lo * std::exp(ratio * k / (points - 1)));
  return grid;
}

CboundOptResult optimize_cbound(const SelfComplementedSet& scs,
                                const OobStatistics& stats, double mu,
                                double delta, const IterateHook& on_iterate) {
  const std::size_t m = scs.base_size();
  if (stats.per_tree_loss.size() != m)
    throw ConfigError("optimize_cbound: statistics do not match the ensemble");
  if (!(mu > 0.0 && mu < 1.0)) throw ConfigError("mu must lie in (0,1)");

  const double c = 1.0 / static_cast<double>(m);  // per-pair prior mass
  std::vector<double> a(m);
  for (std::size_t i = 0; i < m; ++i) a[i] = 1.0 - 2.0 * stats.per_tree_loss[i];

  const double mu_max = max_first_moment(stats);
  if (mu > mu_max)
    throw NumericError("mu = " + std::to_string(mu) +
                       " is not an achievable aligned first moment; the range is [" +
                       std::to_string(-mu_max) + ", " + std::to_string(mu_max) + "]");

  // Second-moment matrix over base trees; complement pairs fold into the
  // signed vote s_i = 2 q_i - 1/m.
  const SquareMatrix* g_dis = &stats.disagreement;
  SquareMatrix g(m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      g.at(i, j) = 1.0 - 2.0 * g_dis->at(i, j);

  const BoxAffineProjector projector(a, c, mu);
  std::vector<double> s, zero(m, 0.0);
  projector.project(zero, &s);

  const double l_tan = tangent_spectral_norm(g, a);
  const double step = 1.0 / std::max(2.0 * l_tan, 1e-9);

  auto report_iterate = [&](const std::vector<double>& sv) {
    if (!on_iterate) return;
    std::vector<double> q(m);
    for (std::size_t i = 0; i < m; ++i) q[i] = 0.5 * (sv[i] + c);
    on_iterate(q);
  };

  std::vector<double> grad, trial, dir(m), g_dir;
  double residual = kInf;
  int iterations = 0;
  report_iterate(s);
  for (int it = 0; it < 10000; ++it) {
    iterations = it + 1;
    mat_vec(g, s, &grad);
    for (auto& v : grad) v *= 2.0;

    // Fixed-point residual with unit step is the termination measure.
    std::vector<double> probe(m);
    for (std::size_t i = 0; i < m; ++i) probe[i] = s[i] - grad[i];
    projector.project(probe, &trial);
    residual = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      residual = std::max(residual, std::abs(s[i] - trial[i]));
    if (residual <= 1e-6) break;

    for (std::size_t i = 0; i < m; ++i) probe[i] = s[i] - step * grad[i];
    projector.project(probe, &trial);
    for (std::size_t i = 0; i < m; ++i) dir[i] = trial[i] - s[i];

    // Exact line search along the feasible segment s + t dir, t in [0,1].
    mat_vec(g, dir, &g_dir);
    double g_dot_dir = 0.0, curv = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      g_dot_dir += grad[i] * dir[i];
      curv += dir[i] * g_dir[i];
    }
    double t = 1.0;
    if (curv > 0.0) t = std::clamp(-g_dot_dir / (2.0 * curv), 0.0, 1.0);
    if (t <= 0.0) break;  // no descent available along the projected direction
    for (std::size_t i = 0; i < m; ++i) s[i] += t * dir[i];
    report_iterate(s);
  }

  CboundOptResult out;
  out.posterior.q.resize(m);
  for (std::size_t i = 0; i < m; ++i) out.posterior.q[i] = 0.5 * (s[i] + c);
  out.kkt_residual = residual;
  out.iterations = iterations;

  double first = 0.0;
  for (std::size_t i = 0; i < m; ++i) first += a[i] * s[i];
  out.first_moment = first;
  out.second_moment = quad_form(g, s);

  // Aligned C-bound at the optimized posterior with n = n_pair.
  double gibbs = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    gibbs += out.posterior.q[i] * stats.per_tree_loss[i] +
             (c - out.posterior.q[i]) * (1.0 - stats.per_tree_loss[i]);
  const double d_rho = 0.5 * (1.0 - out.second_moment);
  const std::int64_t n = stats.n_pair;
  const double eps =
      std::sqrt(std::log(2.0 * xi(n) / delta) / (2.0 * static_cast<double>(n)));
  const double r = std::min(0.5, gibbs + eps);
  const double d = std::max(0.0, d_rho - eps);

  BoundReport report;
  report.name = BoundName::CAligned;
  report.gibbs_bound = r;
  if (r >= 0.5 || 1.0 - 2.0 * d <= 0.0) {
    report.mv_bound = 1.0;
  } else {
    const double num = 1.0 - 2.0 * r;
    report.mv_bound = std::max(0.0, 1.0 - num * num / (1.0 - 2.0 * d));
  }
  report.ingredients.gibbs_emp = gibbs;
  report.ingredients.d_emp = d_rho;
  report.ingredients.kl_div = 0.0;
  report.ingredients.n_gibbs = n;
  report.ingredients.n_pair = n;
  report.ingredients.delta = delta;
  report.ingredients.trivial = report.mv_bound >= 0.5;
  out.report = report;
  return out;
}

MuSelection select_mu(const SelfComplementedSet& scs, const Dataset& train,
                      const OobStatistics& stats,
                      std::span<const double> mu_grid, double delta) {
  if (mu_grid.empty()) throw ConfigError("select_mu: empty grid");
  std::vector<double> grid(mu_grid.begin(), mu_grid.end());
  std::sort(grid.begin(), grid.end());

  struct Entry {
    bool feasible = false;
    double oob = kInf;
    CboundOptResult result;
    std::string error;
  };
  std::vector<Entry> entries(grid.size());

  parallel_for(grid.size(), [&](std::size_t k) {
    try {
      entries[k].result = optimize_cbound(scs, stats, grid[k], delta);
      const std::vector<double> s = entries[k].result.posterior.signed_vote();
      entries[k].oob = oob_mv_estimate(*scs.base, train, s);
      entries[k].feasible = true;
    } catch (const NumericError& err) {
      entries[k].error = err.what();
    }
  });

  MuSelection best;
  bool found = false;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!entries[k].feasible) {
      std::cerr << "warning: skipping mu = " << grid[k] << ": " << entries[k].error
                << "\n";
      continue;
    }
    best.evaluated.emplace_back(grid[k], entries[k].oob);
    if (!found || entries[k].oob < best.oob_mv_loss) {  // ties keep smaller mu
      found = true;
      best.mu = grid[k];
      best.oob_mv_loss = entries[k].oob;
      best.result = entries[k].result;
    }
  }
  if (!found)
    throw NumericError("no feasible mu in the grid; achievable range is [-" +
                       std::to_string(max_first_moment(stats)) + ", " +
                       std::to_string(max_first_moment(stats)) + "]");
  return best;
}

}  // namespace pbrf
