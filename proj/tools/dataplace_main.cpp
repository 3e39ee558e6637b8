// Command-line front end: generate, validate, reduce, eval, brute, chain,
// glauber, bestresponse, mix, dual, nebound, auction, experiment.
//
// Exit codes: 0 success, 1 bad data (validation, parsing, precondition
// failures, failed acceptance criteria), 2 usage errors (flags, missing
// files). Every run prints a machine-readable provenance line; timestamps
// stay in their own field so all other output is reproducible byte for byte
// for a fixed seed.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "dataplace/auction.hpp"
#include "dataplace/duality.hpp"
#include "dataplace/exact.hpp"
#include "dataplace/experiments.hpp"
#include "dataplace/glauber.hpp"
#include "dataplace/instance.hpp"
#include "dataplace/objective.hpp"

namespace dp = dataplace;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

struct GlobalOpts {
  bool quiet = false;
  int threads = 0;
};

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("DATAPLACE_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
}

std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof buf, "%FT%TZ", std::gmtime(&t));
  return buf;
}

json make_provenance(const std::string& command, const json& params) {
  json p;
  p["schema"] = 1;
  p["tool"] = "dataplace";
  p["version"] = kVersion;
  p["command"] = command;
  p["params"] = params;
  return p;
}

void print_provenance(const std::string& command, const json& params) {
  json p = make_provenance(command, params);
  p["timestamp"] = iso_timestamp();
  std::cout << p.dump() << "\n";
}

json matrix_json(const dp::Matrix& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

dp::UnitInstance load_unit(const std::string& path) {
  return dp::reduce_to_unit_cache(dp::load_instance(path));
}

// "1,2,1" with 1-indexed resources -> internal 0-indexed allocation.
dp::Allocation parse_allocation(const std::string& text) {
  dp::Allocation x;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      const int v = std::stoi(item);
      x.push_back(v - 1);
    } catch (const std::exception&) {
      throw dp::ParseError("allocation entry '" + item + "' is not an integer");
    }
  }
  if (x.empty()) throw dp::ParseError("allocation must not be empty");
  return x;
}

std::string alloc_string(const dp::Allocation& x) {
  std::ostringstream os;
  for (std::size_t i = 0; i < x.size(); ++i)
    os << (i ? "," : "") << x[i] + 1;
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw dp::FileError("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw dp::FileError("failed writing '" + path + "'");
}

// ---------------------------------------------------------------------------

int cmd_generate(const GlobalOpts& g, const dp::GenConfig& cfg,
                 const std::string& out_path) {
  print_provenance("generate",
                   {{"seed", cfg.seed}, {"n", cfg.n}, {"k", cfg.k},
                    {"cost_range", {cfg.cost_range.first, cfg.cost_range.second}},
                    {"demand_range", {cfg.demand_range.first, cfg.demand_range.second}},
                    {"fee_range", {cfg.fee_range.first, cfg.fee_range.second}},
                    {"cache_range", {cfg.cache_range.first, cfg.cache_range.second}},
                    {"output", out_path}});
  const dp::Instance inst = dp::gen_random(cfg);
  dp::save_instance(inst, out_path);
  if (!g.quiet)
    std::cout << "wrote instance n=" << inst.n << " k=" << inst.k << " to "
              << out_path << "\n";
  return 0;
}

int cmd_validate(const GlobalOpts& g, const std::string& in_path) {
  print_provenance("validate", {{"input", in_path}});
  std::ifstream in(in_path);
  if (!in) throw dp::FileError("cannot open '" + in_path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();

  std::vector<std::string> violations;
  try {
    dp::instance_from_json(buf.str());
  } catch (const dp::ValidationError& e) {
    violations = e.violations();
  }
  if (violations.empty()) {
    if (!g.quiet) std::cout << "valid\n";
    return 0;
  }
  for (const auto& v : violations) std::cout << "violation: " << v << "\n";
  return 1;
}

int cmd_reduce(const GlobalOpts& g, const std::string& in_path,
               const std::string& out_path) {
  print_provenance("reduce", {{"input", in_path}, {"output", out_path}});
  const dp::Instance inst = dp::load_instance(in_path);
  const dp::UnitInstance unit = dp::reduce_to_unit_cache(inst);

  dp::Instance flat;
  flat.n = unit.n;
  flat.k = unit.k;
  flat.cache_sizes.assign(unit.n, 1);
  flat.access_costs = unit.access_costs;
  flat.demands = unit.demands;
  flat.placement_fees = unit.placement_fees;
  flat.empty_set_distance = unit.empty_set_distance;

  json doc = json::parse(dp::instance_to_json(flat));
  json provenance = json::array();
  for (const int src : unit.source_agent) provenance.push_back(src + 1);
  doc["source_agents"] = provenance;  // informational; ignored on load
  write_file(out_path, doc.dump(2) + "\n");
  if (!g.quiet)
    std::cout << "reduced " << inst.n << " agents to " << unit.n
              << " unit-cache agents\n";
  return 0;
}

int cmd_eval(const GlobalOpts& g, const std::string& in_path,
             const std::string& alloc_text) {
  print_provenance("eval", {{"input", in_path}, {"alloc", alloc_text}});
  const dp::UnitInstance inst = load_unit(in_path);
  const dp::Allocation x = parse_allocation(alloc_text);
  if (auto bad = dp::validate_allocation(inst, x); !bad.empty())
    throw dp::ValidationError("invalid allocation", bad);

  std::cout << "phi " << std::setprecision(17) << dp::potential(inst, x)
            << "\n";
  if (!g.quiet) {
    for (int i = 0; i < inst.n; ++i)
      std::cout << "player " << i + 1 << " cost "
                << dp::player_cost(inst, x, i) << "\n";
    const auto sets = dp::holder_sets(inst, x);
    for (int l = 0; l < inst.k; ++l) {
      std::cout << "resource " << l + 1 << " holders";
      for (const int i : sets[l]) std::cout << " " << i + 1;
      if (sets[l].empty()) std::cout << " (none)";
      std::cout << "\n";
    }
  }
  return 0;
}

int cmd_brute(const GlobalOpts& g, const std::string& in_path,
              std::int64_t cap) {
  print_provenance("brute", {{"input", in_path}, {"cap", cap}});
  const dp::UnitInstance inst = load_unit(in_path);
  const dp::BruteForceResult res = dp::brute_force_optimum(inst, cap);
  std::cout << "phi_opt " << std::setprecision(17) << res.phi << "\n";
  std::cout << "allocation " << alloc_string(res.best) << "\n";
  if (!g.quiet) std::cout << "optima " << res.optima.size() << "\n";
  return 0;
}

int cmd_chain(const GlobalOpts& g, const std::string& in_path, double beta,
              int t_max, const std::string& out_path, std::int64_t cap) {
  print_provenance("chain", {{"input", in_path}, {"beta", beta},
                             {"tmax", t_max}, {"out", out_path}});
  const dp::UnitInstance inst = load_unit(in_path);
  const std::vector<double> curve =
      dp::exact_tv_curve(inst, beta, t_max, cap, resolve_threads(g.threads));
  std::ostringstream csv;
  csv << "t,d_t,bound_n_exp\n" << std::setprecision(17);
  for (int t = 0; t <= t_max; ++t)
    csv << t << "," << curve[t] << ","
        << inst.n * std::exp(-t / (7.0 * inst.n)) << "\n";
  write_file(out_path, csv.str());
  if (!g.quiet)
    std::cout << "d(0)=" << curve.front() << " d(" << t_max
              << ")=" << curve.back() << " written to " << out_path << "\n";
  return 0;
}

int cmd_glauber(const GlobalOpts& g, const std::string& in_path, double beta,
                std::int64_t steps, std::uint64_t seed,
                const std::string& trace_path, std::int64_t stride) {
  print_provenance("glauber", {{"input", in_path}, {"beta", beta},
                               {"steps", steps}, {"seed", seed},
                               {"stride", stride}, {"trace", trace_path}});
  const dp::UnitInstance inst = load_unit(in_path);
  dp::GlauberConfig cfg;
  cfg.beta = beta;
  cfg.horizon = steps;
  cfg.seed = seed;
  cfg.record_stride = stride;
  const dp::ChainTrace trace = dp::run(inst, cfg);

  if (!trace_path.empty()) {
    std::ostringstream csv;
    csv << "t,player,old,new,phi\n" << std::setprecision(17);
    csv << "0,0,0,0," << trace.initial_phi << "\n";
    for (const auto& rec : trace.records)
      csv << rec.t << "," << rec.player + 1 << "," << rec.old_resource + 1
          << "," << rec.new_resource + 1 << "," << rec.phi_after << "\n";
    write_file(trace_path, csv.str());
  }
  std::cout << "best_phi " << std::setprecision(17) << trace.best_phi << "\n";
  if (!g.quiet) {
    std::cout << "best_allocation " << alloc_string(trace.best_state) << "\n";
    std::cout << "final_phi " << trace.final_phi << "\n";
  }
  return 0;
}

int cmd_bestresponse(const GlobalOpts& g, const std::string& in_path,
                     std::uint64_t seed, std::int64_t max_sweeps) {
  print_provenance("bestresponse", {{"input", in_path}, {"seed", seed},
                                    {"max_sweeps", max_sweeps}});
  const dp::UnitInstance inst = load_unit(in_path);
  dp::Rng rng(seed);
  dp::Allocation start(inst.n);
  for (int i = 0; i < inst.n; ++i)
    start[i] = static_cast<int>(rng.uniform_index(inst.k));
  const dp::BestResponseResult res =
      dp::best_response_dynamics(inst, start, max_sweeps);
  if (!res.converged) {
    std::cout << "did not converge within " << max_sweeps << " sweeps\n";
    return 1;
  }
  std::cout << "equilibrium " << alloc_string(res.equilibrium) << "\n";
  std::cout << "phi " << std::setprecision(17)
            << dp::potential(inst, res.equilibrium) << "\n";
  if (!g.quiet)
    std::cout << "improving_moves " << res.improving_moves << " sweeps "
              << res.sweeps << "\n";
  return 0;
}

int cmd_mix(const GlobalOpts& g, const std::string& in_path, double beta,
            double eps, std::int64_t replicas, std::uint64_t seed,
            std::int64_t horizon, std::int64_t cap) {
  print_provenance("mix", {{"input", in_path}, {"beta", beta}, {"eps", eps},
                           {"replicas", replicas}, {"seed", seed},
                           {"horizon", horizon}});
  const dp::UnitInstance inst = load_unit(in_path);

  // Adversarial start pair when the state space is enumerable: an optimum
  // against the state of maximum potential.
  std::vector<std::pair<dp::Allocation, dp::Allocation>> extra;
  try {
    const dp::StateSpace sp = dp::StateSpace::make(inst.n, inst.k, cap);
    const std::vector<double> phis = dp::enumerate_potentials(inst, cap);
    std::int64_t lo = 0, hi = 0;
    for (std::int64_t s = 1; s < sp.size; ++s) {
      if (phis[s] < phis[lo]) lo = s;
      if (phis[s] > phis[hi]) hi = s;
    }
    extra.emplace_back(sp.decode(lo), sp.decode(hi));
  } catch (const std::length_error&) {
    // Too large to enumerate; random pairs only.
  }

  const dp::MixingEstimate est =
      dp::estimate_mixing(inst, beta, eps, replicas, seed, horizon, extra);
  if (est.t_estimate)
    std::cout << "t_mix_estimate " << *est.t_estimate << "\n";
  else
    std::cout << "t_mix_estimate not reached within horizon " << est.horizon
              << "\n";
  if (!g.quiet) {
    std::cout << "exceedance";
    const std::size_t n = est.exceedance.size();
    for (std::size_t t = 0; t < n; t += std::max<std::size_t>(1, n / 20))
      std::cout << " " << t << ":" << est.exceedance[t];
    std::cout << "\n";
  }
  return 0;
}

json dual_json(const dp::UnitInstance& inst, const dp::DualSolveResult& res) {
  json out;
  out["beta"] = matrix_json(res.solution.beta);
  json alpha = json::array();
  for (int i = 0; i < inst.n; ++i) alpha.push_back(res.solution.alpha[i]);
  out["alpha"] = std::move(alpha);
  json y = json::array();
  for (const int a : res.assignment) y.push_back(a + 1);  // 0 = unassigned
  out["y"] = std::move(y);
  out["objective"] = res.solution.objective;
  out["iterations"] = res.iterations;
  out["tolerance_met"] = res.tolerance_met;
  out["feasibility_residual"] = res.feasibility_residual;
  return out;
}

int cmd_dual(const GlobalOpts& g, const std::string& in_path, int iters,
             std::uint64_t seed, const std::string& out_path) {
  print_provenance("dual", {{"input", in_path}, {"iters", iters},
                            {"seed", seed}, {"out", out_path}});
  const dp::UnitInstance inst = load_unit(in_path);
  dp::DualSolveConfig cfg;
  cfg.max_iters = iters;
  cfg.seed = seed;
  const dp::DualSolveResult res = dp::solve_dual(inst, cfg);

  if (!out_path.empty()) {
    json doc;
    doc["schema"] = 1;
    doc["provenance"] = make_provenance(
        "dual", {{"input", in_path}, {"iters", iters}, {"seed", seed}});
    doc["dual"] = dual_json(inst, res);
    write_file(out_path, doc.dump(2) + "\n");
  }
  std::cout << "dual_objective " << std::setprecision(17)
            << res.solution.objective << "\n";
  if (!g.quiet)
    std::cout << "tolerance_met " << (res.tolerance_met ? "yes" : "no")
              << " iterations " << res.iterations << " residual "
              << res.feasibility_residual << "\n";
  return 0;
}

int cmd_nebound(const GlobalOpts& g, const std::string& in_path,
                const std::string& alloc_text, std::int64_t cap) {
  print_provenance("nebound", {{"input", in_path}, {"alloc", alloc_text}});
  const dp::UnitInstance inst = load_unit(in_path);
  const dp::Allocation x = parse_allocation(alloc_text);
  if (auto bad = dp::validate_allocation(inst, x); !bad.empty())
    throw dp::ValidationError("invalid allocation", bad);

  std::optional<double> phi_opt;
  try {
    phi_opt = dp::brute_force_optimum(inst, cap).phi;
  } catch (const std::length_error&) {
  }
  const dp::NeQualityReport rep = dp::ne_quality_bound(inst, x, phi_opt);

  std::cout << std::setprecision(17);
  std::cout << "phi_ne " << rep.phi_ne << "\n";
  if (rep.phi_opt) std::cout << "phi_opt " << *rep.phi_opt << "\n";
  if (rep.bound) {
    std::cout << "bound " << *rep.bound << "\n";
    std::cout << "bound_holds " << (*rep.bound_holds ? "yes" : "no") << "\n";
    std::cout << "bound_fee_kept " << *rep.bound_fee_kept << "\n";
    std::cout << "bound_fee_kept_holds "
              << (*rep.bound_fee_kept_holds ? "yes" : "no") << "\n";
  }
  if (!g.quiet) {
    std::cout << "certificate_objective " << rep.certificate_objective << "\n";
    for (int j = 0; j < inst.n; ++j)
      std::cout << "phi_evacuated " << j + 1 << " " << rep.phi_evacuated[j]
                << " (fee kept " << rep.phi_evacuated_fee_kept[j] << ")\n";
  }
  return 0;
}

int cmd_auction(const GlobalOpts& g, const std::string& in_path, int iters,
                std::uint64_t seed, const std::string& report_path,
                std::int64_t cap) {
  print_provenance("auction", {{"input", in_path}, {"iters", iters},
                               {"seed", seed}, {"report", report_path}});
  const dp::UnitInstance inst = load_unit(in_path);
  dp::DualSolveConfig cfg;
  cfg.max_iters = iters;
  cfg.seed = seed;
  const dp::DualSolveResult dual = dp::solve_dual(inst, cfg);
  const dp::AuctionOutcome outcome = dp::run_auction(inst, dual.solution);
  const dp::PrimalSolution primal = dp::build_primal(inst, outcome);

  std::optional<double> phi_opt;
  try {
    phi_opt = dp::brute_force_optimum(inst, cap).phi;
  } catch (const std::length_error&) {
  }
  const dp::BoundCertificate cert =
      dp::certify_bound(inst, outcome, primal, phi_opt);
  const dp::CsAuditReport audit = dp::cs_audit(inst, primal, dual.solution);

  if (!report_path.empty()) {
    json doc;
    doc["schema"] = 1;
    doc["provenance"] = make_provenance(
        "auction", {{"input", in_path}, {"iters", iters}, {"seed", seed}});
    doc["dual"] = dual_json(inst, dual);
    doc["bids"] = matrix_json(outcome.bids);
    json winners = json::array();
    for (const int w : outcome.winner) winners.push_back(w + 1);
    doc["winners"] = std::move(winners);
    json payments = json::array();
    for (int i = 0; i < inst.n; ++i) payments.push_back(outcome.payments[i]);
    doc["payments"] = std::move(payments);
    doc["social_welfare"] = outcome.social_welfare;
    doc["revenue"] = outcome.revenue;
    doc["gamma"] = outcome.gamma;
    doc["factor"] = outcome.factor;
    doc["cost"] = primal.cost;
    doc["theorem_applies"] = cert.theorem_applies;
    doc["additive_bound_holds"] = cert.additive_bound_holds;
    if (cert.phi_opt) doc["phi_opt"] = *cert.phi_opt;
    if (cert.ratio) doc["ratio"] = *cert.ratio;
    json cs;
    cs["winners_pay_tight"] = audit.winners_pay_tight;
    cs["unsold_items"] = audit.unsold_items;
    cs["uncovered_resources"] = audit.uncovered_resources;
    cs["connections_within_charges"] = audit.connections_within_charges;
    cs["gap"] = audit.gap;
    cs["cost_minus_dual"] = audit.cost_minus_dual;
    cs["identity_expected"] = audit.identity_expected;
    cs["identity_holds"] = audit.identity_holds;
    doc["cs_audit"] = std::move(cs);
    write_file(report_path, doc.dump(2) + "\n");
  }

  std::cout << std::setprecision(17);
  std::cout << "cost " << primal.cost << "\n";
  std::cout << "social_welfare " << outcome.social_welfare << "\n";
  std::cout << "revenue " << outcome.revenue << "\n";
  std::cout << "gamma " << outcome.gamma << "\n";
  std::cout << "factor " << outcome.factor << "\n";
  if (!g.quiet) {
    std::cout << "bound " << (cert.additive_bound_holds ? "holds" : "violated")
              << (cert.theorem_applies ? "" : " (outside zero-fee hypothesis)")
              << "\n";
    std::cout << "cs gap " << audit.gap << " identity "
              << (audit.identity_holds ? "holds" : "differs") << "\n";
  }
  return 0;
}

int cmd_experiment(const GlobalOpts& g, const std::string& suite,
                   std::uint64_t seed, const std::string& only,
                   const std::string& out_path) {
  if (suite != "acceptance")
    throw dp::ParseError("unknown suite '" + suite + "' (try: acceptance)");
  print_provenance("experiment",
                   {{"suite", suite}, {"seed", seed}, {"only", only}});

  dp::AcceptanceOptions opts;
  opts.seed = seed;
  opts.threads = resolve_threads(g.threads);
  if (!g.quiet) opts.log = &std::cout;
  if (!only.empty()) {
    std::stringstream ss(only);
    std::string item;
    while (std::getline(ss, item, ',')) opts.only.push_back(std::stoi(item));
  }

  const std::vector<dp::CriterionResult> results =
      dp::run_acceptance_suite(opts);

  std::cout << "criterion,pass,seconds,name\n";
  for (const auto& r : results)
    std::cout << r.id << "," << (r.passed ? "PASS" : "FAIL") << ","
              << std::fixed << std::setprecision(2) << r.seconds << ","
              << r.name << "\n";
  std::cout.unsetf(std::ios::fixed);

  if (!out_path.empty()) {
    json doc;
    doc["schema"] = 1;
    doc["provenance"] =
        make_provenance("experiment", {{"suite", suite}, {"seed", seed}});
    json arr = json::array();
    for (const auto& r : results) {
      json item;
      item["id"] = r.id;
      item["name"] = r.name;
      item["passed"] = r.passed;
      item["details"] = r.details;
      item["seconds"] = r.seconds;
      arr.push_back(std::move(item));
    }
    doc["criteria"] = std::move(arr);
    doc["all_passed"] = dp::all_passed(results);
    write_file(out_path, doc.dump(2) + "\n");
  }
  return dp::all_passed(results) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dataplace: optimal and approximate solvers for the non-metric "
               "data placement problem"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_flag("--quiet", g.quiet, "suppress human-readable tables");
  app.add_option("--threads", g.threads,
                 "worker cap (default: DATAPLACE_THREADS or hardware)");

  // generate
  auto* generate = app.add_subcommand("generate", "write a random instance");
  dp::GenConfig gen_cfg;
  std::string gen_out;
  generate->add_option("--seed", gen_cfg.seed, "rng seed")->required();
  generate->add_option("--n", gen_cfg.n, "agents")->required();
  generate->add_option("--k", gen_cfg.k, "resource types")->required();
  generate->add_option("--cost-lo", gen_cfg.cost_range.first, "min access cost");
  generate->add_option("--cost-hi", gen_cfg.cost_range.second, "max access cost");
  generate->add_option("--demand-lo", gen_cfg.demand_range.first, "min demand");
  generate->add_option("--demand-hi", gen_cfg.demand_range.second, "max demand");
  generate->add_option("--fee-lo", gen_cfg.fee_range.first, "min fee");
  generate->add_option("--fee-hi", gen_cfg.fee_range.second, "max fee");
  generate->add_option("--cache-lo", gen_cfg.cache_range.first, "min cache size");
  generate->add_option("--cache-hi", gen_cfg.cache_range.second, "max cache size");
  generate->add_option("-o,--out", gen_out, "output path")->required();

  // validate
  auto* validate = app.add_subcommand("validate", "check instance invariants");
  std::string val_in;
  validate->add_option("-i,--input", val_in, "instance file")->required();

  // reduce
  auto* reduce = app.add_subcommand("reduce", "unit-cache reduction");
  std::string red_in, red_out;
  reduce->add_option("-i,--input", red_in, "instance file")->required();
  reduce->add_option("-o,--out", red_out, "output path")->required();

  // eval
  auto* eval = app.add_subcommand("eval", "evaluate an allocation");
  std::string eval_in, eval_alloc;
  eval->add_option("-i,--input", eval_in, "instance file")->required();
  eval->add_option("--alloc", eval_alloc, "comma-separated resources, 1-indexed")
      ->required();

  // brute
  auto* brute = app.add_subcommand("brute", "exhaustive optimum");
  std::string brute_in;
  std::int64_t brute_cap = dp::kDefaultStateCap;
  brute->add_option("-i,--input", brute_in, "instance file")->required();
  brute->add_option("--cap", brute_cap, "state-space cap");

  // chain
  auto* chain = app.add_subcommand("chain", "exact total-variation curve");
  std::string chain_in, chain_out;
  double chain_beta = 0.0;
  int chain_tmax = 0;
  std::int64_t chain_cap = dp::kDefaultStateCap;
  chain->add_option("-i,--input", chain_in, "instance file")->required();
  chain->add_option("--beta", chain_beta, "noise parameter")->required();
  chain->add_option("--tmax", chain_tmax, "horizon")->required();
  chain->add_option("--out", chain_out, "curve CSV path")->required();
  chain->add_option("--cap", chain_cap, "state-space cap");

  // glauber
  auto* glauber = app.add_subcommand("glauber", "simulate the noisy dynamics");
  std::string gl_in, gl_trace;
  double gl_beta = 1.0;
  std::int64_t gl_steps = 0, gl_stride = 1;
  std::uint64_t gl_seed = 0;
  glauber->add_option("-i,--input", gl_in, "instance file")->required();
  glauber->add_option("--beta", gl_beta, "noise parameter")->required();
  glauber->add_option("--steps", gl_steps, "steps")->required();
  glauber->add_option("--seed", gl_seed, "rng seed")->required();
  glauber->add_option("--trace", gl_trace, "trace CSV path");
  glauber->add_option("--stride", gl_stride, "record stride");

  // bestresponse
  auto* bestresponse =
      app.add_subcommand("bestresponse", "best-response dynamics");
  std::string br_in;
  std::uint64_t br_seed = 0;
  std::int64_t br_sweeps = 1 << 20;
  bestresponse->add_option("-i,--input", br_in, "instance file")->required();
  bestresponse->add_option("--seed", br_seed, "seed for the random start")
      ->required();
  bestresponse->add_option("--max-sweeps", br_sweeps, "sweep guard");

  // mix
  auto* mix = app.add_subcommand("mix", "coupling-based mixing estimate");
  std::string mix_in;
  double mix_beta = 0.0, mix_eps = 0.05;
  std::int64_t mix_replicas = 0, mix_horizon = 0;
  std::uint64_t mix_seed = 0;
  std::int64_t mix_cap = dp::kDefaultStateCap;
  mix->add_option("-i,--input", mix_in, "instance file")->required();
  mix->add_option("--beta", mix_beta, "noise parameter")->required();
  mix->add_option("--eps", mix_eps, "target accuracy")->required();
  mix->add_option("--replicas", mix_replicas, "replicas per family")->required();
  mix->add_option("--seed", mix_seed, "rng seed")->required();
  mix->add_option("--horizon", mix_horizon, "max steps (0 = auto)");
  mix->add_option("--cap", mix_cap, "state-space cap for the adversarial pair");

  // dual
  auto* dual = app.add_subcommand("dual", "projected supergradient dual solve");
  std::string dual_in, dual_out;
  int dual_iters = 50000;
  std::uint64_t dual_seed = 0;
  dual->add_option("-i,--input", dual_in, "instance file")->required();
  dual->add_option("--iters", dual_iters, "iteration budget");
  dual->add_option("--seed", dual_seed, "rng seed")->required();
  dual->add_option("--out", dual_out, "solution JSON path");

  // nebound
  auto* nebound = app.add_subcommand("nebound", "equilibrium quality report");
  std::string nb_in, nb_alloc;
  std::int64_t nb_cap = dp::kDefaultStateCap;
  nebound->add_option("-i,--input", nb_in, "instance file")->required();
  nebound->add_option("--alloc", nb_alloc, "equilibrium, 1-indexed")->required();
  nebound->add_option("--cap", nb_cap, "state-space cap");

  // auction
  auto* auction = app.add_subcommand("auction", "first-price auction round");
  std::string auc_in, auc_report;
  int auc_iters = 50000;
  std::uint64_t auc_seed = 0;
  std::int64_t auc_cap = dp::kDefaultStateCap;
  auction->add_option("-i,--input", auc_in, "instance file")->required();
  auction->add_option("--iters", auc_iters, "dual iteration budget");
  auction->add_option("--seed", auc_seed, "rng seed")->required();
  auction->add_option("--report", auc_report, "report JSON path");
  auction->add_option("--cap", auc_cap, "state-space cap");

  // experiment
  auto* experiment = app.add_subcommand("experiment", "run a named suite");
  std::string exp_suite = "acceptance", exp_only, exp_out;
  std::uint64_t exp_seed = 7;
  experiment->add_option("--suite", exp_suite, "suite name (acceptance)");
  experiment->add_option("--seed", exp_seed, "master seed");
  experiment->add_option("--only", exp_only, "comma-separated criterion ids");
  experiment->add_option("--out", exp_out, "summary JSON path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // help/version exit 0, usage errors exit 2
  }

  try {
    if (*generate) return cmd_generate(g, gen_cfg, gen_out);
    if (*validate) return cmd_validate(g, val_in);
    if (*reduce) return cmd_reduce(g, red_in, red_out);
    if (*eval) return cmd_eval(g, eval_in, eval_alloc);
    if (*brute) return cmd_brute(g, brute_in, brute_cap);
    if (*chain)
      return cmd_chain(g, chain_in, chain_beta, chain_tmax, chain_out,
                       chain_cap);
    if (*glauber)
      return cmd_glauber(g, gl_in, gl_beta, gl_steps, gl_seed, gl_trace,
                         gl_stride);
    if (*bestresponse) return cmd_bestresponse(g, br_in, br_seed, br_sweeps);
    if (*mix)
      return cmd_mix(g, mix_in, mix_beta, mix_eps, mix_replicas, mix_seed,
                     mix_horizon, mix_cap);
    if (*dual) return cmd_dual(g, dual_in, dual_iters, dual_seed, dual_out);
    if (*nebound) return cmd_nebound(g, nb_in, nb_alloc, nb_cap);
    if (*auction)
      return cmd_auction(g, auc_in, auc_iters, auc_seed, auc_report, auc_cap);
    if (*experiment)
      return cmd_experiment(g, exp_suite, exp_seed, exp_only, exp_out);
  } catch (const dp::FileError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const dp::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    for (const auto& v : e.violations()) std::cerr << "  " << v << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
