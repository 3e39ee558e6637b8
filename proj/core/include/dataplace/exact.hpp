#pragma once

#include <Eigen/SparseCore>
#include <cstdint>

#include "dataplace/objective.hpp"

namespace dataplace {

// Keeps dense per-state vectors (potentials, distributions) in memory.
inline constexpr std::int64_t kDefaultStateCap = 2'000'000;

// Bijection between [0, k^n) and allocations: base-k digits, agent 0 least
// significant, so scan order breaks ties toward the smallest encoded state.
struct StateSpace {
  int n = 0;
  int k = 0;
  std::int64_t size = 0;

  // Throws std::length_error once k^n exceeds cap.
  static StateSpace make(int n, int k, std::int64_t cap = kDefaultStateCap);

  std::int64_t encode(const Allocation& x) const;
  Allocation decode(std::int64_t s) const;
  void decode_into(std::int64_t s, Allocation& x) const;
};

// Phi over every state, indexed by encoded state.
std::vector<double> enumerate_potentials(const UnitInstance& inst,
                                         std::int64_t cap = kDefaultStateCap);

struct BruteForceResult {
  Allocation best;                  // smallest encoded optimum
  double phi = 0.0;                 // global minimum of Phi
  std::vector<std::int64_t> optima; // all states with Phi <= phi + tie_tol
  double tie_tol = 1e-9;
};

BruteForceResult brute_force_optimum(const UnitInstance& inst,
                                     std::int64_t cap = kDefaultStateCap);

using TransitionMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// Row-stochastic single-site update chain: a uniformly chosen player moves to
// resource o with probability softmax(-beta c_i(o, x_-i)). Each row has
// n(k-1) neighbor entries plus a diagonal collecting the self-loop mass.
// The per-player softmax here is evaluated definitionally from player_cost;
// the simulation path computes it incrementally, and tests hold the two
// routes together.
TransitionMatrix transition_matrix(const UnitInstance& inst, double beta,
                                   std::int64_t cap = kDefaultStateCap);

struct GibbsDistribution {
  double beta = 0.0;
  Vector probs;  // pi(x) proportional to exp(-beta Phi(x))
};

// Weights are exponentiated after subtracting min Phi, so the partition sum
// cannot underflow for beta * (max Phi - min Phi) within exp range.
GibbsDistribution gibbs_distribution(const UnitInstance& inst, double beta,
                                     std::int64_t cap = kDefaultStateCap);

// ||pi P - pi||_1 for an explicit distribution; stationarity check helper.
double stationarity_residual(const TransitionMatrix& P, const Vector& pi);

// max |pi(x) P(x,y) - pi(y) P(y,x)| over adjacent state pairs.
double check_detailed_balance(const TransitionMatrix& P, const Vector& pi);
double check_detailed_balance(const UnitInstance& inst, double beta,
                              std::int64_t cap = kDefaultStateCap);

// d(t) = max_x ||delta_x P^t - pi||_TV for t = 0..t_max. The supremum over
// initial distributions is attained at a point mass (total variation is
// convex in the initial distribution), so the max over states is exact.
// Work is O(states^2 * n * k * t_max / threads); keep the state space small.
std::vector<double> exact_tv_curve(const UnitInstance& inst, double beta,
                                   int t_max,
                                   std::int64_t cap = kDefaultStateCap,
                                   int threads = 1);

// Certified upper bound on max_{i,x} c_i(x):
//   empty_set_distance * sum w + max f,
// using (d - c)^+ <= d <= empty_set_distance. Any upper bound here only
// tightens a noise threshold of the form k / (6 n u).
double cost_bound_u(const UnitInstance& inst);

// Exact max_{i,x} c_i(x) by enumeration; needs k^n <= cap.
double exact_cost_max(const UnitInstance& inst,
                      std::int64_t cap = kDefaultStateCap);

}  // namespace dataplace
