#pragma once

#include <cstdint>
#include <span>

#include "dataplace/instance.hpp"

namespace dataplace {

// One resource index in [0, k) per unit-cache agent.
using Allocation = std::vector<int>;

std::vector<std::string> validate_allocation(const UnitInstance& inst,
                                             const Allocation& x);

// Holder sets X^l = { i : x_i = l }, in increasing agent order.
std::vector<std::vector<int>> holder_sets(const UnitInstance& inst,
                                          const Allocation& x);

// d(j, S) = min { c(i,j) : i in S }; the empty-set distance when S is empty.
double set_distance(const UnitInstance& inst, int j,
                    std::span<const int> holders);
// Same with one agent ignored, i.e. d(j, S - excluded).
double set_distance_excluding(const UnitInstance& inst, int j,
                              std::span<const int> holders, int excluded);

// distances(j, l) = d(j, X^l) for the whole allocation.
Matrix distance_table(const UnitInstance& inst, const Allocation& x);

// Phi(x) = sum_{j,l} w(j,l) d(j, X^l) + sum_i f(i, x_i). Doubles as the
// global objective (with nearest-holder connections) and as the exact
// potential of the per-player costs below.
double potential(const UnitInstance& inst, const Allocation& x);

// c_i(x) = sum_{j,l} w(j,l) (d(j, X^l) - c(i,j))^+ + f(i, x_i).
double player_cost(const UnitInstance& inst, const Allocation& x, int i);

struct MoveDelta {
  int player = 0;
  int old_resource = 0;
  int new_resource = 0;
  double delta_cost = 0.0;       // c_i after - c_i before
  double delta_potential = 0.0;  // Phi after - Phi before
};

// Single-move deltas touching only the two affected holder sets, not the
// full objective. delta_cost expands the player-cost difference over the
// old and new sets; delta_potential uses the clamped closed form
//   sum_j w(j,l)(d(j,X^l - i) - c(i,j))^+
//   - sum_j w(j,l')(d(j,X^l') - c(i,j))^+ + f(i,l') - f(i,l).
// For an exact potential game the two agree.
MoveDelta move_delta(const UnitInstance& inst, const Allocation& x, int i,
                     int new_resource);

// Max |delta_cost - delta_potential| over `trials` random (allocation,
// player, move) triples, with both deltas recomputed from scratch via
// player_cost and potential. Zero up to rounding for an exact potential
// game; this deliberately bypasses move_delta.
double check_exact_potential(const UnitInstance& inst, int trials,
                             std::uint64_t seed);

}  // namespace dataplace
