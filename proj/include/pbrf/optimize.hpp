#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "pbrf/bounds.hpp"
#include "pbrf/dataset.hpp"
#include "pbrf/forest.hpp"
#include "pbrf/stats.hpp"

namespace pbrf {

enum class Provenance { Uniform, LambdaOpt, COpt };

std::string provenance_str(Provenance p);

struct PosteriorWeights {
  std::vector<double> weights;  // nonnegative, sums to 1
  Provenance provenance = Provenance::Uniform;
  std::optional<double> lambda_star;
};

struct LambdaOptResult {
  PosteriorWeights rho;
  BoundReport report;
  std::vector<double> bound_trace;  // value after each iteration, nonincreasing
  int iterations = 0;
  bool converged = true;
};

// Alternating minimization of the lambda bound with a uniform prior:
// rho-step rho_i proportional to exp(-lambda n L_i) (the exact minimizer for
// fixed lambda), lambda-step by golden-section over (0,2) to 1e-9. Stops
// when the bound improves by < 1e-9, or after 200 iterations with
// converged = false.
LambdaOptResult optimize_lambda(std::span<const double> per_tree_loss,
                                std::int64_t n_gibbs, double delta);

// Voter set closed under prediction negation: voter i < m is tree i, voter
// m + i predicts the opposite of tree i on every input.
struct SelfComplementedSet {
  const Ensemble* base = nullptr;

  std::size_t base_size() const { return base->size(); }
  std::size_t size() const { return 2 * base->size(); }
  std::int8_t predict(std::size_t voter, const double* x) const {
    const std::int8_t p = base->trees[voter % base->size()].predict(x);
    return voter < base->size() ? p : static_cast<std::int8_t>(-p);
  }
};

SelfComplementedSet self_complement(const Ensemble& ens);

// Posterior aligned on the uniform prior over the doubled set: original
// voter i carries q_i in [0, 1/m], its complement carries 1/m - q_i.
struct AlignedPosterior {
  std::vector<double> q;

  double pair_mass() const { return 1.0 / static_cast<double>(q.size()); }
  std::vector<double> full() const;        // length 2m, sums to 1
  std::vector<double> signed_vote() const; // s_i = q_i - (1/m - q_i)
};

struct CboundOptResult {
  AlignedPosterior posterior;
  BoundReport report;    // aligned C-bound at the optimized posterior
  double first_moment;   // = mu at the solution
  double second_moment;  // objective value at the solution
  double kkt_residual;
  int iterations = 0;
};

using IterateHook = std::function<void(std::span<const double> q)>;

// Minimizes the empirical second margin moment subject to first moment = mu
// over aligned posteriors: projected gradient with exact projection onto the
// box/affine intersection, run until the fixed-point residual
// ||s - P(s - grad)||_inf is <= 1e-6 (10^4 iteration cap). Moments collapse
// onto the base trees: first moment a.s with a_i = 1 - 2 L_i, second moment
// s'Gs with G_ij = 1 - 2 d_ij. Throws NumericError naming the achievable
// first-moment range when mu is infeasible.
CboundOptResult optimize_cbound(const SelfComplementedSet& scs,
                                const OobStatistics& stats, double mu,
                                double delta,
                                const IterateHook& on_iterate = nullptr);

// Largest achievable aligned first moment sum_i |1 - 2 L_i| / m.
double max_first_moment(const OobStatistics& stats);

// 20 log-spaced points over the feasible interval, ending at mu_max.
std::vector<double> default_mu_grid(const OobStatistics& stats, int points = 20);

struct MuSelection {
  double mu = 0.0;
  double oob_mv_loss = 0.0;
  CboundOptResult result;
  std::vector<std::pair<double, double>> evaluated;  // (mu, oob loss)
};

// Runs optimize_cbound per grid point and keeps the mu whose posterior
// minimizes the OOB majority-vote estimate (ties -> smaller mu). Infeasible
// points are skipped with a warning; throws if every point is infeasible.
MuSelection select_mu(const SelfComplementedSet& scs, const Dataset& train,
                      const OobStatistics& stats,
                      std::span<const double> mu_grid, double delta);

}  // namespace pbrf
