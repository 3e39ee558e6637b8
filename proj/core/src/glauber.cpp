#include "dataplace/glauber.hpp"

#include <algorithm>
#include <cmath>

namespace dataplace {

Vector candidate_cost_deltas(const UnitInstance& inst, const Allocation& x,
                             int i) {
  const int l_old = x[i];
  std::vector<std::vector<int>> sets = holder_sets(inst, x);

  // Leaving the current resource costs the same regardless of destination.
  double leave_gain = 0.0;
  for (int j = 0; j < inst.n; ++j) {
    const double w = inst.demands(j, l_old);
    if (w == 0.0) continue;
    const double d_minus = set_distance_excluding(inst, j, sets[l_old], i);
    leave_gain += w * std::max(0.0, d_minus - inst.access_costs(i, j));
  }

  Vector deltas = Vector::Zero(inst.k);
  for (int o = 0; o < inst.k; ++o) {
    if (o == l_old) continue;
    double join_gain = 0.0;
    for (int j = 0; j < inst.n; ++j) {
      const double w = inst.demands(j, o);
      if (w == 0.0) continue;
      const double d = set_distance(inst, j, sets[o]);
      join_gain += w * std::max(0.0, d - inst.access_costs(i, j));
    }
    deltas[o] = leave_gain - join_gain + inst.placement_fees(i, o) -
                inst.placement_fees(i, l_old);
  }
  return deltas;
}

namespace {

Vector softmax_from_deltas(const Vector& deltas, double beta) {
  // exp(-beta c_i(o, x_-i)) normalizes identically to exp(-beta delta_o):
  // the common present-cost term cancels. Shift by the min for stability.
  const double m = deltas.minCoeff();
  Vector p = (-beta * (deltas.array() - m)).exp();
  p /= p.sum();
  return p;
}

}  // namespace

Vector update_distribution(const UnitInstance& inst, const Allocation& x,
                           int i, double beta) {
  return softmax_from_deltas(candidate_cost_deltas(inst, x, i), beta);
}

StepRecord step(const UnitInstance& inst, Allocation& x, double beta,
                Rng& rng, std::int64_t t, double* phi_inout) {
  const int i = static_cast<int>(rng.uniform_index(inst.n));
  const Vector deltas = candidate_cost_deltas(inst, x, i);
  const Vector p = softmax_from_deltas(deltas, beta);
  const int o = rng.sample_discrete({p.data(), static_cast<size_t>(p.size())});

  StepRecord rec;
  rec.t = t;
  rec.player = i;
  rec.old_resource = x[i];
  rec.new_resource = o;
  x[i] = o;
  if (phi_inout) {
    *phi_inout += deltas[o];
    rec.phi_after = *phi_inout;
  }
  return rec;
}

ChainTrace run(const UnitInstance& inst, const GlauberConfig& cfg,
               const StatePredicate& target) {
  Rng rng(cfg.seed);
  Allocation x;
  if (cfg.initial) {
    x = *cfg.initial;
    if (auto bad = validate_allocation(inst, x); !bad.empty())
      throw std::invalid_argument("run: " + bad.front());
  } else {
    x.resize(inst.n);
    for (int i = 0; i < inst.n; ++i)
      x[i] = static_cast<int>(rng.uniform_index(inst.k));
  }

  ChainTrace trace;
  trace.initial_state = x;
  trace.initial_phi = potential(inst, x);
  trace.best_state = x;
  trace.best_phi = trace.initial_phi;
  if (target && target(x)) trace.target_hit_time = 0;

  const std::int64_t stride = std::max<std::int64_t>(1, cfg.record_stride);
  double phi = trace.initial_phi;
  for (std::int64_t t = 1; t <= cfg.horizon; ++t) {
    const StepRecord rec = step(inst, x, cfg.beta, rng, t, &phi);
    if (phi < trace.best_phi) {
      trace.best_phi = phi;
      trace.best_state = x;
    }
    if (!trace.target_hit_time && target && target(x))
      trace.target_hit_time = t;
    if (t % stride == 0 || t == cfg.horizon) trace.records.push_back(rec);
  }
  trace.final_state = x;
  trace.final_phi = phi;
  return trace;
}

BestResponseResult best_response_dynamics(const UnitInstance& inst,
                                          Allocation initial,
                                          std::int64_t max_sweeps) {
  if (auto bad = validate_allocation(inst, initial); !bad.empty())
    throw std::invalid_argument("best_response_dynamics: " + bad.front());
  // Strictly below this the move does not count as improving; keeping it
  // tighter than the equilibrium test tolerance makes returned points pass.
  constexpr double kImproveTol = 1e-12;

  BestResponseResult res;
  res.equilibrium = std::move(initial);
  Allocation& x = res.equilibrium;
  while (res.sweeps < max_sweeps) {
    ++res.sweeps;
    bool improved = false;
    for (int i = 0; i < inst.n; ++i) {
      const Vector deltas = candidate_cost_deltas(inst, x, i);
      int best = 0;
      for (int o = 1; o < inst.k; ++o)
        if (deltas[o] < deltas[best]) best = o;
      if (deltas[best] < -kImproveTol) {
        x[i] = best;
        ++res.improving_moves;
        improved = true;
      }
    }
    if (!improved) {
      res.converged = true;
      break;
    }
  }
  return res;
}

std::optional<std::pair<int, int>> find_improving_move(
    const UnitInstance& inst, const Allocation& x, double tol) {
  for (int i = 0; i < inst.n; ++i) {
    const Vector deltas = candidate_cost_deltas(inst, x, i);
    for (int o = 0; o < inst.k; ++o)
      if (deltas[o] < -tol) return std::make_pair(i, o);
  }
  return std::nullopt;
}

std::pair<int, int> maximal_coupling_sample(std::span<const double> mu,
                                            std::span<const double> nu,
                                            Rng& rng) {
  const std::size_t k = mu.size();
  if (nu.size() != k)
    throw std::invalid_argument("maximal_coupling_sample: size mismatch");
  double sum_mu = 0.0, sum_nu = 0.0, overlap = 0.0;
  for (std::size_t o = 0; o < k; ++o) {
    if (mu[o] < -1e-12 || nu[o] < -1e-12)
      throw std::invalid_argument(
          "maximal_coupling_sample: negative probability");
    sum_mu += mu[o];
    sum_nu += nu[o];
    overlap += std::min(mu[o], nu[o]);
  }
  if (std::abs(sum_mu - 1.0) > 1e-9 || std::abs(sum_nu - 1.0) > 1e-9)
    throw std::invalid_argument(
        "maximal_coupling_sample: distributions must sum to 1");

  std::vector<double> buf(k);
  if (rng.uniform() < overlap) {
    for (std::size_t o = 0; o < k; ++o) buf[o] = std::min(mu[o], nu[o]) / overlap;
    const int shared = rng.sample_discrete(buf);
    return {shared, shared};
  }
  const double residual = 1.0 - overlap;
  if (residual <= 0.0) {  // numerically identical distributions
    const int shared = rng.sample_discrete(mu);
    return {shared, shared};
  }
  for (std::size_t o = 0; o < k; ++o)
    buf[o] = std::max(0.0, mu[o] - nu[o]) / residual;
  const int a = rng.sample_discrete(buf);
  for (std::size_t o = 0; o < k; ++o)
    buf[o] = std::max(0.0, nu[o] - mu[o]) / residual;
  const int b = rng.sample_discrete(buf);
  return {a, b};
}

CoupledRunResult coupled_run(const UnitInstance& inst, Allocation x,
                             Allocation y, double beta, std::int64_t horizon,
                             Rng& rng) {
  for (const auto* a : {&x, &y})
    if (auto bad = validate_allocation(inst, *a); !bad.empty())
      throw std::invalid_argument("coupled_run: " + bad.front());

  int hamming = 0;
  for (int i = 0; i < inst.n; ++i) hamming += x[i] != y[i];

  CoupledRunResult res;
  res.hamming.reserve(horizon + 1);
  res.hamming.push_back(hamming);
  if (hamming == 0) res.coalescence_time = 0;

  for (std::int64_t t = 1; t <= horizon; ++t) {
    const int i = static_cast<int>(rng.uniform_index(inst.n));
    const bool differed = x[i] != y[i];
    if (hamming == 0) {
      // Identical chains share every draw; one sample keeps both marginals.
      const Vector p = update_distribution(inst, x, i, beta);
      const int o =
          rng.sample_discrete({p.data(), static_cast<size_t>(p.size())});
      x[i] = o;
      y[i] = o;
    } else {
      const Vector mu = update_distribution(inst, x, i, beta);
      const Vector nu = update_distribution(inst, y, i, beta);
      const auto [a, b] = maximal_coupling_sample(
          {mu.data(), static_cast<size_t>(mu.size())},
          {nu.data(), static_cast<size_t>(nu.size())}, rng);
      x[i] = a;
      y[i] = b;
      hamming += static_cast<int>(x[i] != y[i]) - static_cast<int>(differed);
      if (hamming == 0 && !res.coalescence_time) res.coalescence_time = t;
    }
    res.hamming.push_back(hamming);
  }
  return res;
}

MixingEstimate estimate_mixing(
    const UnitInstance& inst, double beta, double eps, std::int64_t replicas,
    std::uint64_t seed, std::int64_t horizon,
    const std::vector<std::pair<Allocation, Allocation>>& extra_pairs) {
  if (replicas < 1)
    throw std::invalid_argument("estimate_mixing: replicas must be >= 1");
  if (horizon <= 0) {
    const double target = 7.0 * inst.n *
                          std::log(std::max(2.0, inst.n / std::max(eps, 1e-9)));
    horizon = std::max<std::int64_t>(16, 4 * static_cast<std::int64_t>(target));
  }

  MixingEstimate est;
  est.replicas_per_family = replicas;
  est.horizon = horizon;
  est.exceedance.assign(horizon + 1, 0.0);

  const std::size_t families = 1 + extra_pairs.size();
  for (std::size_t f = 0; f < families; ++f) {
    std::vector<std::int64_t> not_coalesced(horizon + 1, 0);
    for (std::int64_t r = 0; r < replicas; ++r) {
      Rng rng = Rng::stream(seed, (static_cast<std::uint64_t>(f) << 32) |
                                      static_cast<std::uint64_t>(r));
      Allocation x, y;
      if (f == 0) {
        x.resize(inst.n);
        y.resize(inst.n);
        for (int i = 0; i < inst.n; ++i)
          x[i] = static_cast<int>(rng.uniform_index(inst.k));
        for (int i = 0; i < inst.n; ++i)
          y[i] = static_cast<int>(rng.uniform_index(inst.k));
      } else {
        x = extra_pairs[f - 1].first;
        y = extra_pairs[f - 1].second;
      }
      const CoupledRunResult run = coupled_run(inst, x, y, beta, horizon, rng);
      const std::int64_t coal =
          run.coalescence_time.value_or(horizon + 1);
      for (std::int64_t t = 0; t <= horizon && t < coal; ++t)
        ++not_coalesced[t];
    }
    for (std::int64_t t = 0; t <= horizon; ++t)
      est.exceedance[t] =
          std::max(est.exceedance[t],
                   static_cast<double>(not_coalesced[t]) / replicas);
  }

  for (std::int64_t t = 0; t <= horizon; ++t) {
    if (est.exceedance[t] < eps) {
      est.t_estimate = t;
      break;
    }
  }
  return est;
}

}  // namespace dataplace
