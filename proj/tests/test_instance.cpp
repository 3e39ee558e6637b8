#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "dataplace/instance.hpp"
#include "dataplace/objective.hpp"
#include "dataplace/rng.hpp"
#include "fixtures.hpp"

using namespace dataplace;

namespace {

Instance small_valid() {
  GenConfig cfg;
  cfg.seed = 11;
  cfg.n = 4;
  cfg.k = 3;
  cfg.cache_range = {1, 2};
  return gen_random(cfg);
}

bool any_contains(const std::vector<std::string>& v, const std::string& what) {
  for (const auto& s : v)
    if (s.find(what) != std::string::npos) return true;
  return false;
}

std::string temp_path(const char* stem) {
  return std::string("/tmp/dataplace_test_") + stem + ".json";
}

// Total cost of a capacitated instance under explicit per-agent slot
// contents; direct evaluation of the placement-plus-access objective.
double capacitated_cost(const Instance& inst,
                        const std::vector<std::vector<int>>& slots) {
  double cost = 0.0;
  for (int l = 0; l < inst.k; ++l)
    for (int j = 0; j < inst.n; ++j) {
      double d = inst.empty_set_distance;
      for (int i = 0; i < inst.n; ++i)
        for (int s : slots[i])
          if (s == l) d = std::min(d, inst.access_costs(i, j));
      cost += inst.demands(j, l) * d;
    }
  for (int i = 0; i < inst.n; ++i)
    for (int s : slots[i]) cost += inst.placement_fees(i, s);
  return cost;
}

}  // namespace

TEST_CASE("validate accepts a generated instance") {
  CHECK(validate(small_valid()).empty());
}

TEST_CASE("validate reports asymmetry with indices") {
  Instance inst = small_valid();
  inst.access_costs(0, 1) = 1.0;
  inst.access_costs(1, 0) = 2.0;
  const auto v = validate(inst);
  REQUIRE(v.size() == 1);
  CHECK(any_contains(v, "(1,2)"));
}

TEST_CASE("validate reports infeasible cache totals") {
  Instance inst;
  inst.n = 2;
  inst.k = 3;
  inst.cache_sizes = {1, 1};
  inst.access_costs = Matrix::Zero(2, 2);
  inst.demands = Matrix::Zero(2, 3);
  inst.placement_fees = Matrix::Zero(2, 3);
  inst.empty_set_distance = 1.0;
  const auto v = validate(inst);
  REQUIRE(v.size() == 1);
  CHECK(any_contains(v, "2 < k = 3"));
}

TEST_CASE("validate rejects negative data and zero caches") {
  Instance inst = small_valid();
  inst.demands(1, 2) = -0.5;
  inst.cache_sizes[0] = 0;
  const auto v = validate(inst);
  CHECK(any_contains(v, "demands must be nonnegative"));
  CHECK(any_contains(v, "cache_sizes must be >= 1"));
}

TEST_CASE("reduce is the identity on unit instances") {
  GenConfig cfg;
  cfg.seed = 3;
  cfg.n = 5;
  cfg.k = 2;
  const Instance inst = gen_random(cfg);
  const UnitInstance unit = reduce_to_unit_cache(inst);
  CHECK(unit.n == inst.n);
  CHECK(unit.access_costs == inst.access_costs);
  CHECK(unit.demands == inst.demands);
  CHECK(unit.placement_fees == inst.placement_fees);
  for (int i = 0; i < unit.n; ++i) CHECK(unit.source_agent[i] == i);
}

TEST_CASE("reduce splits demand across copies") {
  Instance inst;
  inst.n = 1;
  inst.k = 2;
  inst.cache_sizes = {2};
  inst.access_costs = Matrix::Zero(1, 1);
  inst.demands = Matrix(1, 2);
  inst.demands << 4, 6;
  inst.placement_fees = Matrix(1, 2);
  inst.placement_fees << 0.5, 0.25;
  inst.empty_set_distance = 1.0;

  const UnitInstance unit = reduce_to_unit_cache(inst);
  REQUIRE(unit.n == 2);
  for (int copy = 0; copy < 2; ++copy) {
    CHECK(unit.demands(copy, 0) == doctest::Approx(2.0));
    CHECK(unit.demands(copy, 1) == doctest::Approx(3.0));
    CHECK(unit.placement_fees(copy, 0) == 0.5);
    CHECK(unit.source_agent[copy] == 0);
  }
  CHECK(unit.access_costs(0, 1) == 0.0);
}

TEST_CASE("reduce preserves the objective of matched allocations") {
  Instance inst;
  inst.n = 3;
  inst.k = 2;
  inst.cache_sizes = {2, 1, 3};
  {
    GenConfig cfg;
    cfg.seed = 99;
    cfg.n = 3;
    cfg.k = 2;
    const Instance r = gen_random(cfg);
    inst.access_costs = r.access_costs;
    inst.demands = r.demands;
    inst.placement_fees = r.placement_fees;
    inst.empty_set_distance = r.empty_set_distance;
  }
  const UnitInstance unit = reduce_to_unit_cache(inst);
  REQUIRE(unit.n == 6);

  Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::vector<int>> slots(inst.n);
    Allocation matched;
    for (int i = 0; i < inst.n; ++i) {
      slots[i].resize(inst.cache_sizes[i]);
      for (int& s : slots[i]) {
        s = static_cast<int>(rng.uniform_index(inst.k));
        matched.push_back(s);
      }
    }
    CHECK(capacitated_cost(inst, slots) ==
          doctest::Approx(potential(unit, matched)).epsilon(1e-9));
  }
}

TEST_CASE("embed_uflp builds the two-resource embedding") {
  Matrix c(2, 2);
  c << 0, 1, 1, 0;
  Vector fees(2);
  fees << 5, 5;
  const Instance inst = embed_uflp(fees, c);
  CHECK(inst.k == 2);
  CHECK(inst.demands.col(0).sum() == 2.0);
  CHECK(inst.demands.col(1).sum() == 0.0);
  CHECK(inst.placement_fees.col(1).sum() == 0.0);
  CHECK(validate(inst).empty());

  // Any subset of open facilities costs the same in both formulations.
  const UnitInstance unit = reduce_to_unit_cache(inst);
  const Allocation open_first = {0, 1};
  // UFLP cost of opening facility 1 only: fee 5 + client 2 travels 1.
  CHECK(potential(unit, open_first) == doctest::Approx(6.0));

  const Allocation open_both = {0, 0};
  CHECK(potential(unit, open_both) == doctest::Approx(10.0));
}

TEST_CASE("embed_uflp with zero data has zero-cost covering allocations") {
  Matrix c = Matrix::Zero(3, 3);
  Vector fees = Vector::Zero(3);
  const UnitInstance unit = reduce_to_unit_cache(embed_uflp(fees, c));
  CHECK(potential(unit, {0, 1, 0}) == doctest::Approx(0.0));
}

TEST_CASE("gen_random is deterministic and honors degenerate ranges") {
  GenConfig cfg;
  cfg.seed = 1;
  cfg.n = 6;
  cfg.k = 3;
  cfg.fee_range = {0.0, 0.0};
  cfg.cache_range = {1, 3};
  const Instance a = gen_random(cfg);
  const Instance b = gen_random(cfg);
  CHECK(a.access_costs == b.access_costs);
  CHECK(a.demands == b.demands);
  CHECK(a.placement_fees == b.placement_fees);
  CHECK(a.cache_sizes == b.cache_sizes);
  CHECK(a.placement_fees.maxCoeff() == 0.0);
  CHECK(validate(a).empty());
}

TEST_CASE("gen_random rejects invalid ranges") {
  GenConfig cfg;
  cfg.seed = 1;
  cfg.n = 2;
  cfg.k = 2;
  cfg.cost_range = {0.5, 0.1};
  CHECK_THROWS_AS(gen_random(cfg), std::invalid_argument);
  cfg.cost_range = {0.0, 1.0};
  cfg.cache_range = {0, 1};
  CHECK_THROWS_AS(gen_random(cfg), std::invalid_argument);
  cfg.cache_range = {1, 1};
  cfg.k = 5;
  CHECK_THROWS_AS(gen_random(cfg), std::invalid_argument);  // 2 caches < k
}

TEST_CASE("save/load round trip is exact") {
  const Instance inst = small_valid();
  const std::string path = temp_path("roundtrip");
  save_instance(inst, path);
  const Instance back = load_instance(path);
  CHECK(back.n == inst.n);
  CHECK(back.k == inst.k);
  CHECK(back.cache_sizes == inst.cache_sizes);
  CHECK(back.access_costs == inst.access_costs);
  CHECK(back.demands == inst.demands);
  CHECK(back.placement_fees == inst.placement_fees);
  CHECK(back.empty_set_distance == inst.empty_set_distance);
  std::remove(path.c_str());
}

TEST_CASE("load errors name the offending field") {
  CHECK_THROWS_WITH_AS(
      instance_from_json(R"({"n": 1, "k": 1, "cache_sizes": [1],
                             "demands": [[1]], "placement_fees": [[0]]})"),
      doctest::Contains("access_costs"), ParseError);
  CHECK_THROWS_AS(instance_from_json("{nonsense"), ParseError);
  CHECK_THROWS_AS(load_instance("/nonexistent/path.json"), FileError);
}

TEST_CASE("load rejects invariant violations with the violation list") {
  const char* doc = R"({
    "n": 2, "k": 1, "cache_sizes": [1, 1],
    "access_costs": [[0, 0.5], [0.5, 0]],
    "demands": [[-1], [0]],
    "placement_fees": [[0], [0]]
  })";
  try {
    instance_from_json(doc);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(any_contains(e.violations(), "demands must be nonnegative"));
  }
}

TEST_CASE("loaded instances always validate") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    GenConfig cfg;
    cfg.seed = seed;
    cfg.n = 3 + static_cast<int>(seed);
    cfg.k = 2;
    cfg.cache_range = {1, 2};
    const std::string path = temp_path("validates");
    save_instance(gen_random(cfg), path);
    CHECK(validate(load_instance(path)).empty());
    std::remove(path.c_str());
  }
}
