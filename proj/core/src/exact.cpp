#include "dataplace/exact.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace dataplace {

StateSpace StateSpace::make(int n, int k, std::int64_t cap) {
  if (n < 1 || k < 1)
    throw std::invalid_argument("StateSpace: n and k must be positive");
  StateSpace sp;
  sp.n = n;
  sp.k = k;
  sp.size = 1;
  for (int i = 0; i < n; ++i) {
    if (sp.size > cap / k) {
      throw std::length_error("state space k^n with k=" + std::to_string(k) +
                              ", n=" + std::to_string(n) + " exceeds cap " +
                              std::to_string(cap));
    }
    sp.size *= k;
  }
  return sp;
}

std::int64_t StateSpace::encode(const Allocation& x) const {
  std::int64_t s = 0;
  for (int i = n - 1; i >= 0; --i) s = s * k + x[i];
  return s;
}

Allocation StateSpace::decode(std::int64_t s) const {
  Allocation x(n);
  decode_into(s, x);
  return x;
}

void StateSpace::decode_into(std::int64_t s, Allocation& x) const {
  x.resize(n);
  for (int i = 0; i < n; ++i) {
    x[i] = static_cast<int>(s % k);
    s /= k;
  }
}

namespace {

// Advance base-k digits by one; returns the lowest changed position.
int odometer_next(Allocation& x, int k) {
  int i = 0;
  while (i < static_cast<int>(x.size())) {
    if (++x[i] < k) break;
    x[i] = 0;
    ++i;
  }
  return i;
}

}  // namespace

std::vector<double> enumerate_potentials(const UnitInstance& inst,
                                         std::int64_t cap) {
  const StateSpace sp = StateSpace::make(inst.n, inst.k, cap);
  std::vector<double> phis(static_cast<std::size_t>(sp.size));
  Allocation x(inst.n, 0);
  for (std::int64_t s = 0; s < sp.size; ++s) {
    phis[static_cast<std::size_t>(s)] = potential(inst, x);
    if (s + 1 < sp.size) odometer_next(x, inst.k);
  }
  return phis;
}

BruteForceResult brute_force_optimum(const UnitInstance& inst,
                                     std::int64_t cap) {
  const StateSpace sp = StateSpace::make(inst.n, inst.k, cap);
  const std::vector<double> phis = enumerate_potentials(inst, cap);

  BruteForceResult res;
  std::int64_t arg = 0;
  for (std::int64_t s = 1; s < sp.size; ++s)
    if (phis[static_cast<std::size_t>(s)] <
        phis[static_cast<std::size_t>(arg)])
      arg = s;
  res.phi = phis[static_cast<std::size_t>(arg)];
  res.best = sp.decode(arg);
  for (std::int64_t s = 0; s < sp.size; ++s)
    if (phis[static_cast<std::size_t>(s)] <= res.phi + res.tie_tol)
      res.optima.push_back(s);
  return res;
}

namespace {

// softmax of -beta * costs with max-shift; costs evaluated definitionally.
Vector definitional_update_law(const UnitInstance& inst, Allocation& x, int i,
                               double beta) {
  const int original = x[i];
  Vector costs(inst.k);
  for (int o = 0; o < inst.k; ++o) {
    x[i] = o;
    costs[o] = player_cost(inst, x, i);
  }
  x[i] = original;
  const double m = costs.minCoeff();
  Vector p = (-beta * (costs.array() - m)).exp();
  p /= p.sum();
  return p;
}

}  // namespace

TransitionMatrix transition_matrix(const UnitInstance& inst, double beta,
                                   std::int64_t cap) {
  const StateSpace sp = StateSpace::make(inst.n, inst.k, cap);
  const int S = static_cast<int>(sp.size);

  std::vector<std::int64_t> pow_k(inst.n);
  pow_k[0] = 1;
  for (int i = 1; i < inst.n; ++i) pow_k[i] = pow_k[i - 1] * inst.k;

  TransitionMatrix P(S, S);
  P.reserve(Eigen::VectorXi::Constant(S, inst.n * (inst.k - 1) + 1));
  const double inv_n = 1.0 / inst.n;
  Allocation x(inst.n, 0);
  for (std::int64_t s = 0; s < sp.size; ++s) {
    double self = 0.0;
    for (int i = 0; i < inst.n; ++i) {
      const Vector p = definitional_update_law(inst, x, i, beta);
      for (int o = 0; o < inst.k; ++o) {
        if (o == x[i]) {
          self += inv_n * p[o];
        } else {
          const std::int64_t y = s + (o - x[i]) * pow_k[i];
          P.coeffRef(static_cast<int>(s), static_cast<int>(y)) += inv_n * p[o];
        }
      }
    }
    P.coeffRef(static_cast<int>(s), static_cast<int>(s)) += self;
    if (s + 1 < sp.size) odometer_next(x, inst.k);
  }
  P.makeCompressed();
  return P;
}

GibbsDistribution gibbs_distribution(const UnitInstance& inst, double beta,
                                     std::int64_t cap) {
  const std::vector<double> phis = enumerate_potentials(inst, cap);
  const double phi_min = *std::min_element(phis.begin(), phis.end());
  GibbsDistribution g;
  g.beta = beta;
  g.probs.resize(static_cast<Eigen::Index>(phis.size()));
  double z = 0.0;
  for (std::size_t s = 0; s < phis.size(); ++s) {
    const double w = std::exp(-beta * (phis[s] - phi_min));
    g.probs[static_cast<Eigen::Index>(s)] = w;
    z += w;
  }
  g.probs /= z;
  return g;
}

double stationarity_residual(const TransitionMatrix& P, const Vector& pi) {
  Vector out = Vector::Zero(pi.size());
  for (int s = 0; s < P.outerSize(); ++s)
    for (TransitionMatrix::InnerIterator it(P, s); it; ++it)
      out[it.col()] += pi[s] * it.value();
  return (out - pi).cwiseAbs().sum();
}

double check_detailed_balance(const TransitionMatrix& P, const Vector& pi) {
  double worst = 0.0;
  for (int s = 0; s < P.outerSize(); ++s) {
    for (TransitionMatrix::InnerIterator it(P, s); it; ++it) {
      const int y = static_cast<int>(it.col());
      if (y == s) continue;
      const double forward = pi[s] * it.value();
      const double backward = pi[y] * P.coeff(y, s);
      worst = std::max(worst, std::abs(forward - backward));
    }
  }
  return worst;
}

double check_detailed_balance(const UnitInstance& inst, double beta,
                              std::int64_t cap) {
  const TransitionMatrix P = transition_matrix(inst, beta, cap);
  const GibbsDistribution g = gibbs_distribution(inst, beta, cap);
  return check_detailed_balance(P, g.probs);
}

namespace {

void apply_transition(const TransitionMatrix& P, const Vector& in,
                      Vector& out) {
  out.setZero();
  for (int s = 0; s < P.outerSize(); ++s) {
    const double mass = in[s];
    if (mass == 0.0) continue;
    for (TransitionMatrix::InnerIterator it(P, s); it; ++it)
      out[it.col()] += mass * it.value();
  }
}

double tv_distance(const Vector& mu, const Vector& pi) {
  return 0.5 * (mu - pi).cwiseAbs().sum();
}

}  // namespace

std::vector<double> exact_tv_curve(const UnitInstance& inst, double beta,
                                   int t_max, std::int64_t cap, int threads) {
  const TransitionMatrix P = transition_matrix(inst, beta, cap);
  const GibbsDistribution g = gibbs_distribution(inst, beta, cap);
  const int S = static_cast<int>(g.probs.size());

  const int workers = std::max(1, std::min(threads, S));
  std::vector<std::vector<double>> partial(
      workers, std::vector<double>(t_max + 1, 0.0));

  auto work = [&](int w) {
    Vector mu(S), next(S);
    auto& local = partial[w];
    for (int start = w; start < S; start += workers) {
      mu.setZero();
      mu[start] = 1.0;
      local[0] = std::max(local[0], tv_distance(mu, g.probs));
      for (int t = 1; t <= t_max; ++t) {
        apply_transition(P, mu, next);
        mu.swap(next);
        local[t] = std::max(local[t], tv_distance(mu, g.probs));
      }
    }
  };

  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }

  std::vector<double> curve(t_max + 1, 0.0);
  for (int t = 0; t <= t_max; ++t)
    for (int w = 0; w < workers; ++w)
      curve[t] = std::max(curve[t], partial[w][t]);
  return curve;
}

double cost_bound_u(const UnitInstance& inst) {
  const double max_fee =
      inst.placement_fees.size() > 0 ? inst.placement_fees.maxCoeff() : 0.0;
  return inst.empty_set_distance * inst.demands.sum() + max_fee;
}

double exact_cost_max(const UnitInstance& inst, std::int64_t cap) {
  const StateSpace sp = StateSpace::make(inst.n, inst.k, cap);
  double worst = 0.0;
  Allocation x(inst.n, 0);
  for (std::int64_t s = 0; s < sp.size; ++s) {
    for (int i = 0; i < inst.n; ++i)
      worst = std::max(worst, player_cost(inst, x, i));
    if (s + 1 < sp.size) odometer_next(x, inst.k);
  }
  return worst;
}

}  // namespace dataplace
