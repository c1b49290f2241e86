#pragma once

/// @file carbon_ledger/apps.hpp
/// @brief Allocation to layer-1 applications, fungible tokens and NFTs.
///
/// An application's pool is its share of the host network's transaction
/// pool, so application allocations never touch the holding pool and never
/// double count against each other. Inside the pool an entity is charged
/// by its own transactions, by its share of the token supply, or by a mix
/// of both weighted with the host network's method weights.

#include <string>
#include <vector>

#include <carbon_ledger/engine.hpp>

namespace carbon_ledger {

/// Per-day telemetry of one application on its host network.
struct AppDay {
  std::string app_id;
  Date date;
  /// Share of the day's network fees (PoW) or gas (PoS) paid to the app.
  Fraction app_fee_share;
  /// Absent for applications without a token. NFT collections use the
  /// number of distinct items.
  std::optional<CoinAmount> token_supply;
  std::uint64_t app_tx_count = 0;
};

struct TokenHolding {
  std::string entity_id;
  std::string app_id;
  Date date;
  CoinAmount amount;
};

/// A transaction executed against a specific application.
struct AppTransaction {
  std::string app_id;
  TransactionRecord tx;
};

/// The application's slice of the host transaction pool under `method`.
inline Pool app_pool(const NetworkDay& day, const MethodWeights& w, const AppDay& app,
                     Method method = Method::Hybrid) {
  if (app.date != day.date) {
    throw AllocationError(AllocationErrorKind::DateMismatch,
                          "app '" + app.app_id + "' dated " + app.date.to_string() +
                              " applied to day " + day.date.to_string());
  }
  return activity_pool(day, w, Activity::Transaction, method)
      .scaled("app_fee_share", app.app_fee_share.value());
}

/// Transaction pool left to the network after all registered apps.
inline Energy unattributed_transaction_energy(const NetworkDay& day, const MethodWeights& w,
                                              const std::vector<AppDay>& apps,
                                              Method method = Method::Hybrid) {
  Decimal shares;
  for (const auto& a : apps)
    if (a.date == day.date) shares += a.app_fee_share.value();
  if (shares > Decimal(1)) {
    throw AllocationError(AllocationErrorKind::ShareOverflow,
                          day.date.to_string() + ": app fee shares sum to " + shares.exact_string());
  }
  return activity_pool(day, w, Activity::Transaction, method).energy() * (Decimal(1) - shares);
}

/// App-scoped basis totals: the network basis (fees on PoW, gas on PoS)
/// scaled by the app's share, and the app's own transaction count.
inline BasisTotals app_basis_totals(const NetworkDay& day, ConsensusKind kind, const AppDay& app) {
  BasisTotals t;
  t.count_total = app.app_tx_count;
  if (kind == ConsensusKind::PoW) {
    if (day.tx_fees_total) t.fee_total = day.tx_fees_total->value() * app.app_fee_share.value();
  } else {
    if (day.gas_total) t.gas_total = day.gas_total->value() * app.app_fee_share.value();
  }
  return t;
}

/// Charges a transaction its share of the app's own fee, gas or count
/// total.
inline AllocationResult allocate_app_transaction(const NetworkDay& day, const ConsensusParams& params,
                                                 const AppDay& app, const Pool& pool,
                                                 const TransactionRecord& tx) {
  if (tx.date != app.date) {
    throw AllocationError(AllocationErrorKind::DateMismatch,
                          "app transaction dated " + tx.date.to_string() + " applied to " +
                              app.date.to_string());
  }
  const BasisChoice basis = choose_transaction_basis(params.kind, tx, app_basis_totals(day, params.kind, app));
  auto r = detail::draw_from_pool(pool, tx.entity_id, app.date, Method::TransactionBased,
                                  Activity::Transaction, basis.basis, basis.quantity, basis.total,
                                  day.emission_factor);
  r.scope = app.app_id;
  r.audit.filled = day.filled;
  return r;
}

/// Charges a token holder its share of the token supply applied to `pool`.
inline AllocationResult allocate_token_holding(const NetworkDay& day, const AppDay& app,
                                               const Pool& pool, const TokenHolding& holding) {
  if (!app.token_supply || app.token_supply->is_zero()) {
    throw AllocationError(AllocationErrorKind::NotAToken,
                          "app '" + app.app_id + "' has no token supply on " + app.date.to_string());
  }
  if (holding.date != app.date || holding.app_id != app.app_id) {
    throw AllocationError(AllocationErrorKind::DateMismatch,
                          "token holding for '" + holding.app_id + "' on " +
                              holding.date.to_string() + " applied to app '" + app.app_id +
                              "' on " + app.date.to_string());
  }
  if (holding.amount > *app.token_supply) {
    throw AllocationError(AllocationErrorKind::ShareOverflow,
                          "'" + holding.entity_id + "' holds more than the token supply of '" +
                              app.app_id + "'");
  }
  auto r = detail::draw_from_pool(pool, holding.entity_id, app.date, Method::HoldingBased,
                                  Activity::Holding, Basis::TokenSupply, holding.amount.value(),
                                  app.token_supply->value(), day.emission_factor);
  r.scope = app.app_id;
  r.audit.filled = day.filled;
  return r;
}

/// Splits the app pool by the host network's weights: token holders share
/// the holding slice, app transactions the transaction slice. Apps without
/// a token fall back to pure transaction allocation of the whole pool.
inline std::vector<AllocationResult> allocate_app_hybrid(const NetworkDay& day,
                                                         const ConsensusParams& params,
                                                         const MethodWeights& w, const AppDay& app,
                                                         const Pool& pool,
                                                         const std::vector<TokenHolding>& holdings,
                                                         const std::vector<TransactionRecord>& txs) {
  std::vector<AllocationResult> out;
  if (!app.token_supply || app.token_supply->is_zero()) {
    for (const auto& tx : txs) out.push_back(allocate_app_transaction(day, params, app, pool, tx));
    return out;
  }
  const Pool holding_slice = pool.scaled("holding_weight", w.holding_weight.value());
  const Pool tx_slice = pool.scaled("transaction_weight", w.transaction_weight.value());
  for (const auto& h : holdings) {
    auto r = allocate_token_holding(day, app, holding_slice, h);
    r.method = Method::Hybrid;
    r.audit.weight_source = w.source;
    out.push_back(std::move(r));
  }
  for (const auto& tx : txs) {
    auto r = allocate_app_transaction(day, params, app, tx_slice, tx);
    r.method = Method::Hybrid;
    r.audit.weight_source = w.source;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace carbon_ledger
