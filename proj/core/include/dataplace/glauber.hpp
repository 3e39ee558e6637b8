#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "dataplace/objective.hpp"
#include "dataplace/rng.hpp"

namespace dataplace {

// Cost deltas for player i switching to each resource, relative to its
// current pick (entry x_i is 0). One evaluation of the two affected holder
// sets per candidate; no full objective recomputation.
Vector candidate_cost_deltas(const UnitInstance& inst, const Allocation& x,
                             int i);

// Update law of the single-site dynamics: p(o) proportional to
// exp(-beta c_i(o, x_-i)), computed as a max-shifted softmax of the cost
// deltas (the common c_i(x) term cancels). Sums to one.
Vector update_distribution(const UnitInstance& inst, const Allocation& x,
                           int i, double beta);

struct StepRecord {
  std::int64_t t = 0;
  int player = -1;
  int old_resource = -1;
  int new_resource = -1;
  double phi_after = 0.0;
};

// One chain step in place: uniform player, softmax resource draw. phi_inout,
// when given, is advanced by the executed move's exact delta.
StepRecord step(const UnitInstance& inst, Allocation& x, double beta,
                Rng& rng, std::int64_t t = 0, double* phi_inout = nullptr);

struct GlauberConfig {
  double beta = 1.0;
  std::int64_t horizon = 0;
  std::uint64_t seed = 0;
  std::optional<Allocation> initial;  // uniform-random when absent
  std::int64_t record_stride = 1;     // keep every stride-th step record
};

struct ChainTrace {
  Allocation initial_state;
  double initial_phi = 0.0;
  std::vector<StepRecord> records;
  Allocation final_state;
  double final_phi = 0.0;
  Allocation best_state;
  double best_phi = 0.0;
  std::optional<std::int64_t> target_hit_time;  // first t with target(x_t)
};

using StatePredicate = std::function<bool(const Allocation&)>;

ChainTrace run(const UnitInstance& inst, const GlauberConfig& cfg,
               const StatePredicate& target = nullptr);

struct BestResponseResult {
  Allocation equilibrium;
  std::int64_t improving_moves = 0;
  std::int64_t sweeps = 0;
  bool converged = false;
};

// Round-robin scan; each player with a strictly improving move switches to
// its argmin-cost resource (ties to the smallest index). Stops after a full
// sweep without improvement, i.e. at a pure Nash equilibrium. Termination is
// the finite improvement property of the exact potential; max_sweeps is a
// guard whose violation would indicate a potential-identity bug.
BestResponseResult best_response_dynamics(const UnitInstance& inst,
                                          Allocation initial,
                                          std::int64_t max_sweeps = 1 << 20);

// First strictly improving (player, resource) pair, if any. A pure Nash
// equilibrium returns nullopt.
std::optional<std::pair<int, int>> find_improving_move(
    const UnitInstance& inst, const Allocation& x, double tol = 1e-9);

// Joint draw (a, b) with marginals exactly mu and nu and
// P(a != b) = ||mu - nu||_TV: with probability sum_o min(mu_o, nu_o) a
// shared value is drawn from the overlap measure, otherwise the two values
// come independently from the normalized positive residuals (which have
// disjoint supports). Throws on non-normalized input.
std::pair<int, int> maximal_coupling_sample(std::span<const double> mu,
                                            std::span<const double> nu,
                                            Rng& rng);

struct CoupledRunResult {
  std::optional<std::int64_t> coalescence_time;
  std::vector<int> hamming;  // rho(Z^x_t, Z^y_t) for t = 0..horizon
  Allocation final_x;
  Allocation final_y;
};

// Two chains sharing one uniformly drawn player per step, with the two
// update draws maximally coupled. When the update laws coincide (in
// particular after coalescence) the shared draw keeps the chains identical,
// so coalescence is absorbing by construction.
CoupledRunResult coupled_run(const UnitInstance& inst, Allocation x,
                             Allocation y, double beta, std::int64_t horizon,
                             Rng& rng);

struct MixingEstimate {
  std::optional<std::int64_t> t_estimate;  // first t with exceedance < eps
  std::vector<double> exceedance;  // worst-family P(not coalesced by t)
  std::int64_t replicas_per_family = 0;
  std::int64_t horizon = 0;
};

// Monte-Carlo upper estimate of the eps-mixing time from coupled runs:
// one family of uniform-random start pairs plus one family per caller
// supplied pair (e.g. an optimum against a far state). Replica r of family
// f uses Rng::stream(seed, f * 2^32 + r).
MixingEstimate estimate_mixing(
    const UnitInstance& inst, double beta, double eps, std::int64_t replicas,
    std::uint64_t seed, std::int64_t horizon = 0,
    const std::vector<std::pair<Allocation, Allocation>>& extra_pairs = {});

}  // namespace dataplace
