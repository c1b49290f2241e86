#pragma once

/// @file carbon_ledger/layer2.hpp
/// @brief Layer-2 and token-network footprints.
///
/// A layer-2 inherits its share of the layer-1 transaction pool and adds the
/// energy of its own infrastructure. The total is then allocated inside the
/// layer-2 by running the ordinary engine on a synthetic day, which also
/// makes deeper nesting (L3 on L2) a matter of repetition.

#include <string>
#include <vector>

#include <carbon_ledger/engine.hpp>

namespace carbon_ledger {

struct Layer2Day {
  std::string l2_id;
  Date date;
  /// Share of the layer-1 day's fees (or gas) caused by this layer-2.
  Fraction l1_fee_share;
  Energy infra_energy;
  ConsensusParams internal_params;
  /// The layer-2's own telemetry. Its `energy` is ignored and replaced by
  /// the computed total footprint.
  NetworkDay internal_day;
};

/// Part of the layer-1 transaction pool caused by the layer-2.
inline Energy l2_inherited(const NetworkDay& l1_day, const MethodWeights& l1_weights,
                           const Layer2Day& l2) {
  if (l1_day.date != l2.date) {
    throw AllocationError(AllocationErrorKind::DateMismatch,
                          "layer-2 '" + l2.l2_id + "' dated " + l2.date.to_string() +
                              " applied to day " + l1_day.date.to_string());
  }
  return transaction_pool(l1_day, l1_weights) * l2.l1_fee_share;
}

inline Energy l2_total_footprint(const NetworkDay& l1_day, const MethodWeights& l1_weights,
                                 const Layer2Day& l2) {
  return l2_inherited(l1_day, l1_weights, l2) + l2.infra_energy;
}

/// The layer-2's internal day carrying `total` as its energy.
inline NetworkDay synthetic_l2_day(const Energy& total, const Layer2Day& l2) {
  NetworkDay day = l2.internal_day;
  day.date = l2.date;
  day.energy = total;
  return day;
}

/// Allocates `portfolio` inside the layer-2 for the layer-2's date. Results
/// carry `provenance` extended with the layer-2 id.
inline std::vector<AllocationResult> allocate_within_l2(const Energy& total, const Layer2Day& l2,
                                                        const Portfolio& portfolio, Method method,
                                                        std::vector<std::string> provenance = {}) {
  const NetworkDay day = synthetic_l2_day(total, l2);
  const std::vector<NetworkDay> days{day};
  Portfolio same_day;
  same_day.network_id = l2.l2_id;
  for (const auto& h : portfolio.holdings)
    if (h.date == l2.date) same_day.holdings.push_back(h);
  for (const auto& t : portfolio.transactions)
    if (t.date == l2.date) same_day.transactions.push_back(t);

  auto allocation = allocate_portfolio(days, l2.internal_params, same_day, method, {l2.l2_id, 1});
  provenance.push_back(l2.l2_id);
  for (auto& r : allocation.results) r.audit.provenance = provenance;
  return std::move(allocation.results);
}

}  // namespace carbon_ledger
