#include <doctest.h>

#include <cmath>
#include <map>

#include "dataplace/exact.hpp"
#include "dataplace/glauber.hpp"
#include "fixtures.hpp"

using namespace dataplace;

TEST_CASE("update distribution is uniform at beta zero") {
  const UnitInstance inst = fixtures::random_unit(3, 4, 3);
  const Vector p = update_distribution(inst, {0, 1, 2, 0}, 1, 0.0);
  for (int o = 0; o < 3; ++o) CHECK(p[o] == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("update distribution follows the softmax algebra") {
  // Lone agent, no demand: costs are the fees (0, ln 2), so at beta = 1 the
  // law is (2/3, 1/3).
  Matrix f(1, 2);
  f << 0.0, std::log(2.0);
  const UnitInstance inst =
      make_unit(1, 2, Matrix::Zero(1, 1), Matrix::Zero(1, 2), f, 1.0);
  const Vector p = update_distribution(inst, {0}, 0, 1.0);
  CHECK(p[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(p[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("update distribution matches the exact chain rows") {
  const UnitInstance inst = fixtures::random_unit(9, 4, 3);
  const double beta = 0.8;
  const TransitionMatrix P = transition_matrix(inst, beta);
  const StateSpace sp = StateSpace::make(inst.n, inst.k);

  std::vector<std::int64_t> pow_k(inst.n);
  pow_k[0] = 1;
  for (int i = 1; i < inst.n; ++i) pow_k[i] = pow_k[i - 1] * inst.k;

  Rng rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    Allocation x(inst.n);
    for (int& v : x) v = static_cast<int>(rng.uniform_index(inst.k));
    const int i = static_cast<int>(rng.uniform_index(inst.n));
    const std::int64_t s = sp.encode(x);
    const Vector p = update_distribution(inst, x, i, beta);
    for (int o = 0; o < inst.k; ++o) {
      if (o == x[i]) continue;
      const std::int64_t y = s + (o - x[i]) * pow_k[i];
      CHECK(inst.n * P.coeff(static_cast<int>(s), static_cast<int>(y)) ==
            doctest::Approx(p[o]).epsilon(1e-12));
    }
  }
}

TEST_CASE("steps are deterministic for a fixed seed and trivial for k = 1") {
  const UnitInstance single =
      make_unit(3, 1, Matrix::Zero(3, 3), Matrix::Ones(3, 1),
                Matrix::Zero(3, 1), 1.0);
  Rng rng(5);
  Allocation x = {0, 0, 0};
  for (int t = 0; t < 20; ++t) {
    step(single, x, 1.0, rng);
    CHECK(x == Allocation{0, 0, 0});
  }

  const UnitInstance inst = fixtures::random_unit(11, 4, 3);
  GlauberConfig cfg;
  cfg.beta = 0.5;
  cfg.horizon = 200;
  cfg.seed = 99;
  const ChainTrace a = run(inst, cfg);
  const ChainTrace b = run(inst, cfg);
  CHECK(a.final_state == b.final_state);
  CHECK(a.best_phi == b.best_phi);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t r = 0; r < a.records.size(); ++r) {
    CHECK(a.records[r].player == b.records[r].player);
    CHECK(a.records[r].new_resource == b.records[r].new_resource);
  }
}

TEST_CASE("step statistics are uniform at beta zero") {
  const UnitInstance inst = fixtures::random_unit(13, 2, 2);
  Rng rng(17);
  Allocation x = {0, 0};
  const int draws = 100000;
  std::map<std::pair<int, int>, int> counts;
  for (int t = 0; t < draws; ++t) {
    const StepRecord rec = step(inst, x, 0.0, rng);
    ++counts[{rec.player, rec.new_resource}];
  }
  // (player, resource) uniform over 4 cells; 3-sigma binomial band.
  const double expect = draws / 4.0;
  const double sigma = std::sqrt(draws * 0.25 * 0.75);
  for (int i = 0; i < 2; ++i)
    for (int o = 0; o < 2; ++o)
      CHECK(std::abs(counts[{i, o}] - expect) <= 3.0 * sigma);
}

TEST_CASE("run with zero horizon keeps the initial state only") {
  const UnitInstance inst = fixtures::hand_2x2();
  GlauberConfig cfg;
  cfg.beta = 1.0;
  cfg.horizon = 0;
  cfg.seed = 1;
  cfg.initial = Allocation{0, 0};
  const ChainTrace trace = run(inst, cfg);
  CHECK(trace.records.empty());
  CHECK(trace.initial_state == Allocation{0, 0});
  CHECK(trace.final_state == Allocation{0, 0});
  CHECK(trace.initial_phi == doctest::Approx(6.0));
}

TEST_CASE("run finds the optimum of the hand instance at high beta") {
  const UnitInstance inst = fixtures::hand_2x2();
  GlauberConfig cfg;
  cfg.beta = 5.0;
  cfg.horizon = 10000;
  cfg.seed = 2;
  const ChainTrace trace = run(inst, cfg);
  CHECK(trace.best_phi == doctest::Approx(2.0));
}

TEST_CASE("recorded potentials match recomputation along the trajectory") {
  const UnitInstance inst = fixtures::random_unit(23, 5, 3);
  GlauberConfig cfg;
  cfg.beta = 0.7;
  cfg.horizon = 500;
  cfg.seed = 31;
  cfg.record_stride = 1;
  const ChainTrace trace = run(inst, cfg);
  REQUIRE(static_cast<std::int64_t>(trace.records.size()) == cfg.horizon);

  Allocation x = trace.initial_state;
  for (const StepRecord& rec : trace.records) {
    CHECK(x[rec.player] == rec.old_resource);
    x[rec.player] = rec.new_resource;
    CHECK(rec.phi_after == doctest::Approx(potential(inst, x)).epsilon(1e-9));
  }
  CHECK(x == trace.final_state);
}

TEST_CASE("long-run state frequencies approach the gibbs law") {
  const UnitInstance inst = fixtures::random_unit(29, 3, 2);
  const double beta = 0.2;
  const StateSpace sp = StateSpace::make(inst.n, inst.k);
  Vector freq = Vector::Zero(sp.size);

  Rng rng(41);
  Allocation x = {0, 0, 0};
  const std::int64_t steps = 1000000;
  for (std::int64_t t = 0; t < steps; ++t) {
    step(inst, x, beta, rng);
    freq[sp.encode(x)] += 1.0;
  }
  freq /= static_cast<double>(steps);
  const GibbsDistribution g = gibbs_distribution(inst, beta);
  CHECK(0.5 * (freq - g.probs).cwiseAbs().sum() <= 0.02);
}

TEST_CASE("best response stays put at the global optimum") {
  const UnitInstance inst = fixtures::random_unit(37, 5, 3);
  const BruteForceResult brute = brute_force_optimum(inst);
  const BestResponseResult res = best_response_dynamics(inst, brute.best);
  CHECK(res.converged);
  CHECK(res.improving_moves == 0);
  CHECK(res.equilibrium == brute.best);
}

TEST_CASE("best response solves the hand instance") {
  const UnitInstance inst = fixtures::hand_2x2();
  const BestResponseResult res = best_response_dynamics(inst, {0, 0});
  CHECK(res.converged);
  CHECK(res.improving_moves <= 2);
  CHECK(potential(inst, res.equilibrium) == doctest::Approx(2.0));
}

TEST_CASE("best response returns an equilibrium on random instances") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const UnitInstance inst = fixtures::random_unit(500 + seed, 5, 3);
    Rng rng(seed);
    Allocation start(inst.n);
    for (int& v : start) v = static_cast<int>(rng.uniform_index(inst.k));
    const BestResponseResult res = best_response_dynamics(inst, start);
    REQUIRE(res.converged);
    CHECK(!find_improving_move(inst, res.equilibrium, 1e-9));
    for (int i = 0; i < inst.n; ++i)
      for (int l = 0; l < inst.k; ++l)
        CHECK(move_delta(inst, res.equilibrium, i, l).delta_cost >= -1e-9);
  }
}

TEST_CASE("maximal coupling with identical marginals always agrees") {
  Rng rng(3);
  const std::vector<double> mu = {0.2, 0.5, 0.3};
  for (int t = 0; t < 1000; ++t) {
    const auto [a, b] = maximal_coupling_sample(mu, mu, rng);
    CHECK(a == b);
  }
}

TEST_CASE("maximal coupling with disjoint supports always differs") {
  Rng rng(4);
  const std::vector<double> mu = {1.0, 0.0};
  const std::vector<double> nu = {0.0, 1.0};
  for (int t = 0; t < 1000; ++t) {
    const auto [a, b] = maximal_coupling_sample(mu, nu, rng);
    CHECK(a == 0);
    CHECK(b == 1);
  }
}

TEST_CASE("maximal coupling rejects non-normalized input") {
  Rng rng(5);
  const std::vector<double> bad = {0.5, 0.4};
  const std::vector<double> ok = {0.5, 0.5};
  CHECK_THROWS_AS(maximal_coupling_sample(bad, ok, rng), std::invalid_argument);
  CHECK_THROWS_AS(maximal_coupling_sample(ok, bad, rng), std::invalid_argument);
}

TEST_CASE("maximal coupling hits the total-variation disagreement rate") {
  Rng rng(6);
  const std::vector<double> mu = {0.7, 0.3};
  const std::vector<double> nu = {0.3, 0.7};
  const double tv = 0.4;
  const int draws = 100000;
  int differ = 0;
  std::vector<int> count_a(2, 0);
  for (int t = 0; t < draws; ++t) {
    const auto [a, b] = maximal_coupling_sample(mu, nu, rng);
    differ += a != b;
    ++count_a[a];
  }
  const double rate = static_cast<double>(differ) / draws;
  CHECK(std::abs(rate - tv) <= 3.0 * std::sqrt(tv * (1 - tv) / draws));
  const double sigma = std::sqrt(draws * 0.7 * 0.3);
  CHECK(std::abs(count_a[0] - 0.7 * draws) <= 3.0 * sigma);
}

TEST_CASE("coupled run coalesces immediately from equal states") {
  const UnitInstance inst = fixtures::hand_2x2();
  Rng rng(7);
  const CoupledRunResult res =
      coupled_run(inst, {0, 1}, {0, 1}, 1.0, 10, rng);
  REQUIRE(res.coalescence_time.has_value());
  CHECK(*res.coalescence_time == 0);
  for (const int h : res.hamming) CHECK(h == 0);
}

TEST_CASE("at beta zero the distance never increases and chains coalesce") {
  const UnitInstance inst = fixtures::random_unit(43, 4, 3);
  Rng rng(8);
  const CoupledRunResult res =
      coupled_run(inst, {0, 1, 2, 0}, {2, 1, 0, 1}, 0.0, 400, rng);
  for (std::size_t t = 1; t < res.hamming.size(); ++t)
    CHECK(res.hamming[t] <= res.hamming[t - 1]);
  CHECK(res.coalescence_time.has_value());
}

TEST_CASE("hamming distance stays zero after coalescence") {
  const UnitInstance inst = fixtures::random_unit(47, 3, 2);
  Rng rng(9);
  const CoupledRunResult res =
      coupled_run(inst, {0, 0, 0}, {1, 1, 1}, 0.5, 500, rng);
  REQUIRE(res.coalescence_time.has_value());
  for (std::size_t t = *res.coalescence_time; t < res.hamming.size(); ++t)
    CHECK(res.hamming[t] == 0);
}

TEST_CASE("coupled chains preserve the single-chain one-step law") {
  const UnitInstance inst = fixtures::random_unit(53, 2, 2);
  const double beta = 0.6;
  const TransitionMatrix P = transition_matrix(inst, beta);
  const StateSpace sp = StateSpace::make(inst.n, inst.k);
  const Allocation x0 = {0, 1}, y0 = {1, 1};

  const int draws = 100000;
  Vector count_x = Vector::Zero(sp.size);
  for (int r = 0; r < draws; ++r) {
    Rng rng = Rng::stream(1001, r);
    const CoupledRunResult res = coupled_run(inst, x0, y0, beta, 1, rng);
    (void)res;
    // Rebuild the post-step x chain state from the same stream.
    Rng replay = Rng::stream(1001, r);
    Allocation x = x0, y = y0;
    const int i = static_cast<int>(replay.uniform_index(inst.n));
    const Vector mu = update_distribution(inst, x, i, beta);
    const Vector nu = update_distribution(inst, y, i, beta);
    const auto [a, b] = maximal_coupling_sample(
        {mu.data(), static_cast<size_t>(mu.size())},
        {nu.data(), static_cast<size_t>(nu.size())}, replay);
    x[i] = a;
    count_x[sp.encode(x)] += 1.0;
  }
  // chi-square against the exact row of the transition matrix; 0.9973
  // quantile for the cell count.
  const int s0 = static_cast<int>(sp.encode(x0));
  double stat = 0.0;
  int cells = 0;
  for (int s = 0; s < sp.size; ++s) {
    const double p = P.coeff(s0, s);
    if (p <= 0.0) {
      CHECK(count_x[s] == 0.0);
      continue;
    }
    const double expect = draws * p;
    stat += (count_x[s] - expect) * (count_x[s] - expect) / expect;
    ++cells;
  }
  static const double kChi2[] = {9.0000, 11.8292, 14.1565, 16.2514, 18.2054};
  REQUIRE(cells >= 2);
  CHECK(stat <= kChi2[cells - 2]);
}

TEST_CASE("mixing estimate handles the vacuous threshold") {
  const UnitInstance inst = fixtures::random_unit(59, 3, 2);
  const MixingEstimate est = estimate_mixing(inst, 0.1, 1.0, 10, 1, 32);
  REQUIRE(est.t_estimate.has_value());
  CHECK(*est.t_estimate == 0);
}

TEST_CASE("mixing estimate stays within the theorem scale at small beta") {
  const UnitInstance inst = fixtures::random_unit(61, 4, 2, 0.5, 1.5, 0.5);
  const double beta = inst.k / (6.0 * inst.n * cost_bound_u(inst));
  const double eps = 0.05;
  const MixingEstimate est = estimate_mixing(inst, beta, eps, 400, 5);
  REQUIRE(est.t_estimate.has_value());
  CHECK(*est.t_estimate <=
        7.0 * inst.n * std::log(inst.n / eps) * 1.5);
}

TEST_CASE("mixing estimate is consistent with the exact curve") {
  const UnitInstance inst = fixtures::random_unit(67, 3, 2, 0.5, 1.5, 0.5);
  const double beta = inst.k / (6.0 * inst.n * cost_bound_u(inst));
  const double eps = 0.05;
  const std::vector<double> curve = exact_tv_curve(inst, beta, 400);
  std::int64_t t_exact = -1;
  for (std::size_t t = 0; t < curve.size(); ++t)
    if (curve[t] < eps) {
      t_exact = static_cast<std::int64_t>(t);
      break;
    }
  REQUIRE(t_exact > 0);

  const MixingEstimate est = estimate_mixing(inst, beta, eps, 2000, 11);
  REQUIRE(est.t_estimate.has_value());
  CHECK(*est.t_estimate >= t_exact / 2);
  CHECK(*est.t_estimate <= t_exact * 2);
}
