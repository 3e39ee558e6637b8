#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dataplace {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Problem data: n agents with cache capacities u_i, k unit-size resource
// types, symmetric access costs c(i,j) with zero diagonal, demand rates
// w(j,l), and placement fees f(i,l). No triangle inequality is assumed on
// the access costs. empty_set_distance is the finite distance charged
// against a resource nobody caches; it must exceed every pairwise cost so
// that uncovered resources are never preferred when coverage is possible.
struct Instance {
  int n = 0;
  int k = 0;
  std::vector<int> cache_sizes;  // u_i, one per agent
  Matrix access_costs;           // n x n
  Matrix demands;                // n x k, demands(j, l) = w_j^l
  Matrix placement_fees;         // n x k, placement_fees(i, l) = f_i^l
  double empty_set_distance = 1.0;

  // 2 * max cost + 1: strictly dominates every pairwise cost.
  static double default_empty_set_distance(const Matrix& access_costs);
};

// Unit-cache view: every agent caches exactly one resource. source_agent
// maps each agent (copy) back to the agent of the capacitated instance it
// was expanded from; it is the identity for natively unit instances.
struct UnitInstance {
  int n = 0;
  int k = 0;
  Matrix access_costs;
  Matrix demands;
  Matrix placement_fees;
  double empty_set_distance = 1.0;
  std::vector<int> source_agent;
};

class FileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public std::runtime_error {
 public:
  ValidationError(const std::string& message,
                  std::vector<std::string> violations)
      : std::runtime_error(message), violations_(std::move(violations)) {}
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

// Every invariant violation, with 1-indexed positions; empty means valid.
// Violations are data, not errors: nothing throws here.
std::vector<std::string> validate(const Instance& inst);
std::vector<std::string> validate(const UnitInstance& inst);

// Convenience constructor for unit instances; source_agent is the identity.
UnitInstance make_unit(int n, int k, Matrix access_costs, Matrix demands,
                       Matrix placement_fees, double empty_set_distance);

// Expands agent i into u_i collocated copies with demand w^i / u_i and the
// same fee row. Copies of one agent sit at distance 0 from each other and at
// the source agent's distance from everyone else, so any allocation of the
// capacitated instance has a matched unit allocation of equal total cost.
// Agents with u_i = 0 are dropped (they violate validation anyway).
UnitInstance reduce_to_unit_cache(const Instance& inst);

// k = 2 embedding of an uncapacitated facility location instance: resource 1
// carries unit demand and the facility opening fees, resource 2 is a free
// dummy. Agents holding resource 1 correspond to open facilities.
Instance embed_uflp(const Vector& facility_fees, const Matrix& access_costs);

struct GenConfig {
  std::uint64_t seed = 0;
  int n = 1;
  int k = 1;
  std::pair<double, double> cost_range{0.0, 1.0};
  std::pair<double, double> demand_range{0.0, 1.0};
  std::pair<double, double> fee_range{0.0, 1.0};
  std::pair<int, int> cache_range{1, 1};
};

// Deterministic for a fixed seed. Costs are drawn on the upper triangle and
// mirrored; caches are redrawn until sum u_i >= k; empty_set_distance is set
// to 2 * max cost + 1. The output always passes validate().
Instance gen_random(const GenConfig& cfg);

// JSON document with fields n, k, cache_sizes, access_costs, demands,
// placement_fees and optional empty_set_distance (defaulted when absent).
// Unreadable paths raise FileError, malformed documents ParseError naming
// the field, and structurally sound documents that break invariants
// ValidationError carrying the violation list.
Instance load_instance(const std::string& path);
void save_instance(const Instance& inst, const std::string& path);
Instance instance_from_json(const std::string& text);
std::string instance_to_json(const Instance& inst);

}  // namespace dataplace
