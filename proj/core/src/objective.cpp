#include "dataplace/objective.hpp"

#include <algorithm>
#include <cmath>

#include "dataplace/rng.hpp"

namespace dataplace {

std::vector<std::string> validate_allocation(const UnitInstance& inst,
                                             const Allocation& x) {
  std::vector<std::string> out;
  if (static_cast<int>(x.size()) != inst.n) {
    out.push_back("allocation must have n = " + std::to_string(inst.n) +
                  " entries, got " + std::to_string(x.size()));
    return out;
  }
  for (int i = 0; i < inst.n; ++i)
    if (x[i] < 0 || x[i] >= inst.k)
      out.push_back("allocation entry " + std::to_string(i + 1) +
                    " out of range [1," + std::to_string(inst.k) +
                    "]: " + std::to_string(x[i] + 1));
  return out;
}

std::vector<std::vector<int>> holder_sets(const UnitInstance& inst,
                                          const Allocation& x) {
  std::vector<std::vector<int>> sets(inst.k);
  for (int i = 0; i < inst.n; ++i) sets[x[i]].push_back(i);
  return sets;
}

double set_distance(const UnitInstance& inst, int j,
                    std::span<const int> holders) {
  double d = inst.empty_set_distance;
  bool any = false;
  for (int i : holders) {
    const double c = inst.access_costs(i, j);
    if (!any || c < d) d = c;
    any = true;
  }
  return d;
}

double set_distance_excluding(const UnitInstance& inst, int j,
                              std::span<const int> holders, int excluded) {
  double d = inst.empty_set_distance;
  bool any = false;
  for (int i : holders) {
    if (i == excluded) continue;
    const double c = inst.access_costs(i, j);
    if (!any || c < d) d = c;
    any = true;
  }
  return d;
}

Matrix distance_table(const UnitInstance& inst, const Allocation& x) {
  Matrix d = Matrix::Constant(inst.n, inst.k, inst.empty_set_distance);
  for (int i = 0; i < inst.n; ++i) {
    const int l = x[i];
    for (int j = 0; j < inst.n; ++j) {
      const double c = inst.access_costs(i, j);
      if (c < d(j, l)) d(j, l) = c;
    }
  }
  return d;
}

double potential(const UnitInstance& inst, const Allocation& x) {
  const Matrix d = distance_table(inst, x);
  double phi = inst.demands.cwiseProduct(d).sum();
  for (int i = 0; i < inst.n; ++i) phi += inst.placement_fees(i, x[i]);
  return phi;
}

double player_cost(const UnitInstance& inst, const Allocation& x, int i) {
  const Matrix d = distance_table(inst, x);
  double cost = inst.placement_fees(i, x[i]);
  for (int j = 0; j < inst.n; ++j) {
    const double cij = inst.access_costs(i, j);
    for (int l = 0; l < inst.k; ++l) {
      const double gain = d(j, l) - cij;
      if (gain > 0.0) cost += inst.demands(j, l) * gain;
    }
  }
  return cost;
}

MoveDelta move_delta(const UnitInstance& inst, const Allocation& x, int i,
                     int new_resource) {
  MoveDelta md;
  md.player = i;
  md.old_resource = x[i];
  md.new_resource = new_resource;
  if (new_resource == x[i]) return md;

  const int l_old = x[i];
  const int l_new = new_resource;
  std::vector<int> old_set, new_set;
  for (int a = 0; a < inst.n; ++a) {
    if (x[a] == l_old) old_set.push_back(a);
    if (x[a] == l_new) new_set.push_back(a);
  }

  const double fee_change =
      inst.placement_fees(i, l_new) - inst.placement_fees(i, l_old);
  double dc = fee_change;
  double dp = fee_change;
  for (int j = 0; j < inst.n; ++j) {
    const double cij = inst.access_costs(i, j);
    const double w_old = inst.demands(j, l_old);
    const double w_new = inst.demands(j, l_new);
    const double d_old = set_distance(inst, j, old_set);
    const double d_old_minus = set_distance_excluding(inst, j, old_set, i);
    const double d_new = set_distance(inst, j, new_set);
    const double d_new_plus = std::min(d_new, cij);

    // Cost difference over the two affected resources: new sets minus old.
    dc += w_old * std::max(0.0, d_old_minus - cij) +
          w_new * std::max(0.0, d_new_plus - cij) -
          w_old * std::max(0.0, d_old - cij) -
          w_new * std::max(0.0, d_new - cij);
    // Potential difference in closed form.
    dp += w_old * std::max(0.0, d_old_minus - cij) -
          w_new * std::max(0.0, d_new - cij);
  }
  md.delta_cost = dc;
  md.delta_potential = dp;
  return md;
}

double check_exact_potential(const UnitInstance& inst, int trials,
                             std::uint64_t seed) {
  Rng rng(seed);
  Allocation x(inst.n), y(inst.n);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    for (int a = 0; a < inst.n; ++a)
      x[a] = static_cast<int>(rng.uniform_index(inst.k));
    const int i = static_cast<int>(rng.uniform_index(inst.n));
    const int l = static_cast<int>(rng.uniform_index(inst.k));
    y = x;
    y[i] = l;
    const double dc = player_cost(inst, y, i) - player_cost(inst, x, i);
    const double dp = potential(inst, y) - potential(inst, x);
    worst = std::max(worst, std::abs(dc - dp));
  }
  return worst;
}

}  // namespace dataplace
