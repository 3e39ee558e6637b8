#include "dataplace/instance.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dataplace/rng.hpp"

namespace dataplace {

using nlohmann::json;

double Instance::default_empty_set_distance(const Matrix& access_costs) {
  const double max_cost =
      access_costs.size() > 0 ? access_costs.maxCoeff() : 0.0;
  return 2.0 * max_cost + 1.0;
}

namespace {

std::string at(int i) { return std::to_string(i + 1); }

void check_common(int n, int k, const Matrix& c, const Matrix& w,
                  const Matrix& f, double empty_set_distance,
                  std::vector<std::string>& out) {
  if (n < 1) out.push_back("n must be a positive integer, got " + std::to_string(n));
  if (k < 1) out.push_back("k must be a positive integer, got " + std::to_string(k));
  if (n < 1 || k < 1) return;

  bool dims_ok = true;
  auto check_dims = [&](const Matrix& m, int rows, int cols, const char* name) {
    if (m.rows() != rows || m.cols() != cols) {
      std::ostringstream os;
      os << name << " must be " << rows << "x" << cols << ", got "
         << m.rows() << "x" << m.cols();
      out.push_back(os.str());
      dims_ok = false;
    }
  };
  check_dims(c, n, n, "access_costs");
  check_dims(w, n, k, "demands");
  check_dims(f, n, k, "placement_fees");
  if (!dims_ok) return;

  for (int i = 0; i < n; ++i) {
    if (c(i, i) != 0.0)
      out.push_back("access_costs diagonal must be zero at (" + at(i) + "," +
                    at(i) + "): " + std::to_string(c(i, i)));
    for (int j = i + 1; j < n; ++j) {
      if (c(i, j) != c(j, i)) {
        std::ostringstream os;
        os << "access_costs asymmetric at (" << at(i) << "," << at(j)
           << "): " << c(i, j) << " vs " << c(j, i);
        out.push_back(os.str());
      }
    }
  }
  if (c.size() > 0 && c.minCoeff() < 0.0)
    out.push_back("access_costs must be nonnegative");
  if (w.size() > 0 && w.minCoeff() < 0.0)
    out.push_back("demands must be nonnegative");
  if (f.size() > 0 && f.minCoeff() < 0.0)
    out.push_back("placement_fees must be nonnegative");

  const double max_cost = c.size() > 0 ? c.maxCoeff() : 0.0;
  if (!(empty_set_distance > max_cost)) {
    std::ostringstream os;
    os << "empty_set_distance must exceed every access cost: "
       << empty_set_distance << " <= " << max_cost;
    out.push_back(os.str());
  }
  if (!(empty_set_distance > 0.0))
    out.push_back("empty_set_distance must be positive");
}

}  // namespace

std::vector<std::string> validate(const Instance& inst) {
  std::vector<std::string> out;
  check_common(inst.n, inst.k, inst.access_costs, inst.demands,
               inst.placement_fees, inst.empty_set_distance, out);
  if (inst.n < 1 || inst.k < 1) return out;

  if (static_cast<int>(inst.cache_sizes.size()) != inst.n) {
    out.push_back("cache_sizes must have n entries, got " +
                  std::to_string(inst.cache_sizes.size()));
    return out;
  }
  long long total = 0;
  for (int i = 0; i < inst.n; ++i) {
    if (inst.cache_sizes[i] < 1)
      out.push_back("cache_sizes must be >= 1, agent " + at(i) + " has " +
                    std::to_string(inst.cache_sizes[i]));
    total += inst.cache_sizes[i];
  }
  if (total < inst.k) {
    std::ostringstream os;
    os << "infeasible: sum of cache sizes " << total << " < k = " << inst.k;
    out.push_back(os.str());
  }
  return out;
}

std::vector<std::string> validate(const UnitInstance& inst) {
  std::vector<std::string> out;
  check_common(inst.n, inst.k, inst.access_costs, inst.demands,
               inst.placement_fees, inst.empty_set_distance, out);
  if (inst.n < 1 || inst.k < 1) return out;
  if (inst.n < inst.k)
    out.push_back("infeasible: " + std::to_string(inst.n) +
                  " unit caches < k = " + std::to_string(inst.k));
  if (!inst.source_agent.empty() &&
      static_cast<int>(inst.source_agent.size()) != inst.n)
    out.push_back("source_agent must be empty or have n entries");
  return out;
}

UnitInstance make_unit(int n, int k, Matrix access_costs, Matrix demands,
                       Matrix placement_fees, double empty_set_distance) {
  UnitInstance u;
  u.n = n;
  u.k = k;
  u.access_costs = std::move(access_costs);
  u.demands = std::move(demands);
  u.placement_fees = std::move(placement_fees);
  u.empty_set_distance = empty_set_distance;
  u.source_agent.resize(n);
  for (int i = 0; i < n; ++i) u.source_agent[i] = i;
  return u;
}

UnitInstance reduce_to_unit_cache(const Instance& inst) {
  int m = 0;
  for (int i = 0; i < inst.n; ++i) m += std::max(0, inst.cache_sizes[i]);

  UnitInstance u;
  u.n = m;
  u.k = inst.k;
  u.empty_set_distance = inst.empty_set_distance;
  u.source_agent.reserve(m);
  for (int i = 0; i < inst.n; ++i)
    for (int r = 0; r < inst.cache_sizes[i]; ++r) u.source_agent.push_back(i);

  u.access_costs = Matrix::Zero(m, m);
  u.demands = Matrix::Zero(m, inst.k);
  u.placement_fees = Matrix::Zero(m, inst.k);
  for (int a = 0; a < m; ++a) {
    const int i = u.source_agent[a];
    const double share = 1.0 / inst.cache_sizes[i];
    u.demands.row(a) = share * inst.demands.row(i);
    u.placement_fees.row(a) = inst.placement_fees.row(i);
    for (int b = 0; b < m; ++b) {
      const int j = u.source_agent[b];
      u.access_costs(a, b) = (i == j) ? 0.0 : inst.access_costs(i, j);
    }
  }
  return u;
}

Instance embed_uflp(const Vector& facility_fees, const Matrix& access_costs) {
  const int n = static_cast<int>(facility_fees.size());
  if (n < 1) throw std::invalid_argument("embed_uflp: need at least one facility");
  if (access_costs.rows() != n || access_costs.cols() != n)
    throw std::invalid_argument("embed_uflp: access_costs must be n x n");
  if (facility_fees.minCoeff() < 0.0)
    throw std::invalid_argument("embed_uflp: facility fees must be nonnegative");
  for (int i = 0; i < n; ++i) {
    if (access_costs(i, i) != 0.0)
      throw std::invalid_argument("embed_uflp: access_costs diagonal must be zero");
    for (int j = 0; j < n; ++j) {
      if (access_costs(i, j) < 0.0)
        throw std::invalid_argument("embed_uflp: access_costs must be nonnegative");
      if (access_costs(i, j) != access_costs(j, i))
        throw std::invalid_argument("embed_uflp: access_costs must be symmetric");
    }
  }

  Instance inst;
  inst.n = n;
  inst.k = 2;
  inst.cache_sizes.assign(n, 1);
  inst.access_costs = access_costs;
  inst.demands = Matrix::Zero(n, 2);
  inst.demands.col(0).setOnes();
  inst.placement_fees = Matrix::Zero(n, 2);
  inst.placement_fees.col(0) = facility_fees;
  inst.empty_set_distance = Instance::default_empty_set_distance(access_costs);
  return inst;
}

Instance gen_random(const GenConfig& cfg) {
  auto bad = [](const std::string& what) {
    throw std::invalid_argument("gen_random: " + what);
  };
  if (cfg.n < 1) bad("n must be >= 1");
  if (cfg.k < 1) bad("k must be >= 1");
  auto check_range = [&](std::pair<double, double> r, const char* name) {
    if (r.first < 0.0 || r.second < r.first)
      bad(std::string(name) + " must satisfy 0 <= lo <= hi");
  };
  check_range(cfg.cost_range, "cost_range");
  check_range(cfg.demand_range, "demand_range");
  check_range(cfg.fee_range, "fee_range");
  if (cfg.cache_range.first < 1 || cfg.cache_range.second < cfg.cache_range.first)
    bad("cache_range must satisfy 1 <= lo <= hi");
  if (static_cast<long long>(cfg.n) * cfg.cache_range.second < cfg.k)
    bad("infeasible: n * max cache size < k");

  Rng rng(cfg.seed);
  Instance inst;
  inst.n = cfg.n;
  inst.k = cfg.k;

  inst.access_costs = Matrix::Zero(cfg.n, cfg.n);
  for (int i = 0; i < cfg.n; ++i)
    for (int j = i + 1; j < cfg.n; ++j) {
      const double c = rng.uniform(cfg.cost_range.first, cfg.cost_range.second);
      inst.access_costs(i, j) = c;
      inst.access_costs(j, i) = c;
    }

  inst.demands = Matrix::Zero(cfg.n, cfg.k);
  for (int j = 0; j < cfg.n; ++j)
    for (int l = 0; l < cfg.k; ++l)
      inst.demands(j, l) =
          rng.uniform(cfg.demand_range.first, cfg.demand_range.second);

  inst.placement_fees = Matrix::Zero(cfg.n, cfg.k);
  for (int i = 0; i < cfg.n; ++i)
    for (int l = 0; l < cfg.k; ++l)
      inst.placement_fees(i, l) =
          rng.uniform(cfg.fee_range.first, cfg.fee_range.second);

  inst.cache_sizes.assign(cfg.n, 1);
  while (true) {
    long long total = 0;
    for (int i = 0; i < cfg.n; ++i) {
      inst.cache_sizes[i] =
          rng.uniform_int(cfg.cache_range.first, cfg.cache_range.second);
      total += inst.cache_sizes[i];
    }
    if (total >= cfg.k) break;
  }

  inst.empty_set_distance =
      Instance::default_empty_set_distance(inst.access_costs);
  return inst;
}

namespace {

Matrix matrix_from_json(const json& j, const char* field, int rows, int cols) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows)
    throw ParseError(std::string("field '") + field + "' must be an array of " +
                     std::to_string(rows) + " rows");
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const json& row = j[r];
    if (!row.is_array() || static_cast<int>(row.size()) != cols)
      throw ParseError(std::string("field '") + field + "' row " + at(r) +
                       " must have " + std::to_string(cols) + " entries");
    for (int c = 0; c < cols; ++c) {
      if (!row[c].is_number())
        throw ParseError(std::string("field '") + field + "' entry (" + at(r) +
                         "," + at(c) + ") must be a number");
      m(r, c) = row[c].get<double>();
    }
  }
  return m;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

const json& require_field(const json& doc, const char* field) {
  auto it = doc.find(field);
  if (it == doc.end())
    throw ParseError(std::string("missing field '") + field + "'");
  return *it;
}

}  // namespace

Instance instance_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("document must be a JSON object");

  Instance inst;
  const json& jn = require_field(doc, "n");
  const json& jk = require_field(doc, "k");
  if (!jn.is_number_integer()) throw ParseError("field 'n' must be an integer");
  if (!jk.is_number_integer()) throw ParseError("field 'k' must be an integer");
  inst.n = jn.get<int>();
  inst.k = jk.get<int>();
  if (inst.n < 1 || inst.k < 1)
    throw ParseError("fields 'n' and 'k' must be positive");

  const json& ju = require_field(doc, "cache_sizes");
  if (!ju.is_array() || static_cast<int>(ju.size()) != inst.n)
    throw ParseError("field 'cache_sizes' must be an array of n integers");
  inst.cache_sizes.resize(inst.n);
  for (int i = 0; i < inst.n; ++i) {
    if (!ju[i].is_number_integer())
      throw ParseError("field 'cache_sizes' entry " + at(i) +
                       " must be an integer");
    inst.cache_sizes[i] = ju[i].get<int>();
  }

  inst.access_costs = matrix_from_json(require_field(doc, "access_costs"),
                                       "access_costs", inst.n, inst.n);
  inst.demands = matrix_from_json(require_field(doc, "demands"), "demands",
                                  inst.n, inst.k);
  inst.placement_fees =
      matrix_from_json(require_field(doc, "placement_fees"), "placement_fees",
                       inst.n, inst.k);

  if (auto it = doc.find("empty_set_distance"); it != doc.end()) {
    if (!it->is_number())
      throw ParseError("field 'empty_set_distance' must be a number");
    inst.empty_set_distance = it->get<double>();
  } else {
    inst.empty_set_distance =
        Instance::default_empty_set_distance(inst.access_costs);
  }

  if (auto violations = validate(inst); !violations.empty())
    throw ValidationError("instance failed validation", violations);
  return inst;
}

std::string instance_to_json(const Instance& inst) {
  json doc;
  doc["n"] = inst.n;
  doc["k"] = inst.k;
  doc["cache_sizes"] = inst.cache_sizes;
  doc["access_costs"] = matrix_to_json(inst.access_costs);
  doc["demands"] = matrix_to_json(inst.demands);
  doc["placement_fees"] = matrix_to_json(inst.placement_fees);
  doc["empty_set_distance"] = inst.empty_set_distance;
  return doc.dump(2) + "\n";
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return instance_from_json(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void save_instance(const Instance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FileError("cannot open '" + path + "' for writing");
  out << instance_to_json(inst);
  if (!out) throw FileError("failed writing '" + path + "'");
}

}  // namespace dataplace
