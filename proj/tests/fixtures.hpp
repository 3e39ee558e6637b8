#pragma once

#include "dataplace/instance.hpp"
#include "dataplace/objective.hpp"

namespace fixtures {

// Two agents, two resources, unit cross cost, unit demands, no fees,
// empty-set distance 3. Potentials by enumeration: the two covering states
// (1,2) and (2,1) cost 2, the two single-resource states cost 6.
inline dataplace::UnitInstance hand_2x2() {
  dataplace::Matrix c(2, 2);
  c << 0, 1, 1, 0;
  return dataplace::make_unit(2, 2, c, dataplace::Matrix::Ones(2, 2),
                              dataplace::Matrix::Zero(2, 2), 3.0);
}

inline dataplace::UnitInstance zero_demand_fees(int n, int k,
                                                double fee_scale) {
  dataplace::Matrix c = dataplace::Matrix::Zero(n, n);
  dataplace::Matrix f(n, k);
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < k; ++l) f(i, l) = fee_scale * (1 + ((i + l) % k));
  return dataplace::make_unit(n, k, c, dataplace::Matrix::Zero(n, k), f, 1.0);
}

inline dataplace::UnitInstance random_unit(std::uint64_t seed, int n, int k,
                                           double w_lo = 0.0, double w_hi = 2.0,
                                           double f_hi = 1.0) {
  dataplace::GenConfig cfg;
  cfg.seed = seed;
  cfg.n = n;
  cfg.k = k;
  cfg.cost_range = {0.0, 1.0};
  cfg.demand_range = {w_lo, w_hi};
  cfg.fee_range = {0.0, f_hi};
  cfg.cache_range = {1, 1};
  return dataplace::reduce_to_unit_cache(dataplace::gen_random(cfg));
}

}  // namespace fixtures
