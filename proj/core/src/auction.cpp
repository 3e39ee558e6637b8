#include "dataplace/auction.hpp"

#include <algorithm>
#include <cmath>

namespace dataplace {

namespace {

constexpr double kZeroBidTol = 1e-12;
constexpr double kAuditTol = 1e-9;

double unclamped_bid(const UnitInstance& inst, const Matrix& beta, int i,
                     int l) {
  double total = 0.0;
  for (int j = 0; j < inst.n; ++j) {
    const double w = inst.demands(j, l);
    if (w == 0.0) continue;
    const double margin = beta(j, l) - inst.access_costs(i, j);
    if (margin > 0.0) total += w * margin;
  }
  return total - inst.placement_fees(i, l);
}

}  // namespace

Matrix compute_bids(const UnitInstance& inst, const Matrix& beta) {
  if (beta.rows() != inst.n || beta.cols() != inst.k)
    throw std::invalid_argument("compute_bids: beta must be n x k");
  if (beta.minCoeff() < -1e-12)
    throw std::invalid_argument("compute_bids: beta must be nonnegative");
  Matrix bids(inst.n, inst.k);
  for (int i = 0; i < inst.n; ++i)
    for (int l = 0; l < inst.k; ++l)
      bids(i, l) = std::max(0.0, unclamped_bid(inst, beta, i, l));
  return bids;
}

AuctionOutcome run_auction(const UnitInstance& inst,
                           const DualSolution& dual) {
  const double residual = dual_feasibility_residual(inst, dual);
  if (residual > 1e-9)
    throw std::invalid_argument(
        "run_auction: infeasible dual, residual = " + std::to_string(residual));

  AuctionOutcome out;
  out.beta = dual.beta;
  out.bids = compute_bids(inst, dual.beta);
  out.winner.assign(inst.n, -1);
  out.payments = Vector::Zero(inst.n);
  out.bundles.assign(inst.k, {});

  for (int i = 0; i < inst.n; ++i) {
    int arg = 0;
    for (int l = 1; l < inst.k; ++l)
      if (out.bids(i, l) > out.bids(i, arg)) arg = l;
    if (out.bids(i, arg) > kZeroBidTol) {
      out.winner[i] = arg;
      out.payments[i] = out.bids(i, arg);
      out.bundles[arg].push_back(i);
    }
  }

  out.utilities = Vector::Zero(inst.k);
  for (int l = 0; l < inst.k; ++l) {
    double u = 0.0;
    for (int j = 0; j < inst.n; ++j) u += inst.demands(j, l) * dual.beta(j, l);
    for (int i : out.bundles[l]) u -= unclamped_bid(inst, dual.beta, i, l);
    out.utilities[l] = u;
  }

  out.social_welfare = out.utilities.sum();
  out.revenue = out.payments.sum();
  double raw = 0.0;
  for (int j = 0; j < inst.n; ++j)
    for (int l = 0; l < inst.k; ++l)
      raw += inst.demands(j, l) * dual.beta(j, l);
  out.raw_charge_total = raw;
  out.gamma = raw > 0.0 ? out.revenue / raw : 0.0;
  out.factor = out.gamma < 1.0 ? 1.0 / (1.0 - out.gamma)
                               : std::numeric_limits<double>::infinity();
  return out;
}

PrimalSolution build_primal(const UnitInstance& inst,
                            const AuctionOutcome& outcome) {
  PrimalSolution primal;
  primal.placements = outcome.winner;
  primal.nearest.assign(inst.n, std::vector<int>(inst.k, -1));

  double cost = 0.0;
  for (int i = 0; i < inst.n; ++i)
    if (outcome.winner[i] >= 0)
      cost += inst.placement_fees(i, outcome.winner[i]);

  for (int l = 0; l < inst.k; ++l) {
    const auto& holders = outcome.bundles[l];
    if (holders.empty()) {
      primal.uncovered.push_back(l);
      for (int j = 0; j < inst.n; ++j)
        cost += inst.demands(j, l) * inst.empty_set_distance;
      continue;
    }
    for (int j = 0; j < inst.n; ++j) {
      int arg = holders.front();
      for (int i : holders)
        if (inst.access_costs(i, j) < inst.access_costs(arg, j)) arg = i;
      primal.nearest[j][l] = arg;
      cost += inst.demands(j, l) * inst.access_costs(arg, j);
    }
  }
  primal.cost = cost;
  return primal;
}

BoundCertificate certify_bound(const UnitInstance& inst,
                               const AuctionOutcome& outcome,
                               const PrimalSolution& primal,
                               std::optional<double> phi_opt) {
  BoundCertificate cert;
  cert.cost = primal.cost;
  cert.opt_dual = outcome.social_welfare;
  cert.revenue = outcome.revenue;
  cert.gamma = outcome.gamma;
  cert.factor = outcome.factor;
  cert.theorem_applies = inst.placement_fees.size() == 0 ||
                         inst.placement_fees.maxCoeff() <= 0.0;
  cert.factor_defined = outcome.social_welfare > 0.0;
  cert.additive_bound_holds =
      primal.cost <= outcome.social_welfare + outcome.revenue + kAuditTol;
  cert.factor_identity_residual =
      cert.factor_defined
          ? std::abs(outcome.factor -
                     (1.0 + outcome.revenue / outcome.social_welfare))
          : 0.0;
  if (phi_opt) {
    cert.phi_opt = phi_opt;
    if (*phi_opt > 0.0) {
      cert.ratio = primal.cost / *phi_opt;
      cert.ratio_bound_holds = *cert.ratio <= outcome.factor + 1e-6;
    }
  }
  return cert;
}

CsAuditReport cs_audit(const UnitInstance& inst, const PrimalSolution& primal,
                       const DualSolution& dual) {
  CsAuditReport rep;

  for (int i = 0; i < inst.n; ++i) {
    const int l = primal.placements[i];
    if (l < 0) {
      rep.unsold_items.push_back(i);
      continue;
    }
    if (std::abs(dual.alpha[i] - unclamped_bid(inst, dual.beta, i, l)) >
        kAuditTol)
      rep.winners_pay_tight = false;
  }

  std::vector<std::vector<int>> sets(inst.k);
  for (int i = 0; i < inst.n; ++i)
    if (primal.placements[i] >= 0) sets[primal.placements[i]].push_back(i);
  for (int l = 0; l < inst.k; ++l)
    if (sets[l].empty()) rep.uncovered_resources.push_back(l);

  for (int j = 0; j < inst.n; ++j) {
    for (int l = 0; l < inst.k; ++l) {
      const int serving = primal.nearest[j][l];
      if (serving < 0 || inst.demands(j, l) == 0.0) continue;
      if (dual.beta(j, l) < inst.access_costs(serving, j) - kAuditTol)
        rep.connections_within_charges = false;
    }
  }

  // Aggregate violation of the y >= x block: sum u(i,j,l)(y(i,l) - x(i,j,l)).
  double gap = 0.0;
  for (int i = 0; i < inst.n; ++i) {
    const int l = primal.placements[i];
    if (l < 0) continue;
    for (int j = 0; j < inst.n; ++j) gap += dual.u_var(inst, i, j, l);
  }
  for (int j = 0; j < inst.n; ++j)
    for (int l = 0; l < inst.k; ++l)
      if (primal.nearest[j][l] >= 0)
        gap -= dual.u_var(inst, primal.nearest[j][l], j, l);
  rep.gap = gap;

  rep.cost_minus_dual = primal.cost - dual.objective;
  rep.identity_expected = rep.winners_pay_tight &&
                          rep.connections_within_charges &&
                          rep.unsold_items.empty() &&
                          rep.uncovered_resources.empty();
  rep.identity_holds = std::abs(rep.cost_minus_dual - rep.gap) <= kAuditTol;
  return rep;
}

}  // namespace dataplace
