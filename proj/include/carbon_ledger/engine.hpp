#pragma once

/// @file carbon_ledger/engine.hpp
/// @brief Holding-based, transaction-based and hybrid allocation for layer-1
/// networks.
///
/// The hybrid method splits each day's energy into a holding pool and a
/// transaction pool. On PoW networks the transaction weight is the share of
/// fees in total miner revenue; on PoS networks it is the share of energy
/// drawn by marginal transaction processing. Holdings take their share of
/// the holding pool by coins held over the lost-coin-adjusted supply;
/// transactions take their share of the transaction pool by fee, gas or
/// count, whichever the day supports first.

#include <algorithm>
#include <cstddef>
#include <future>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <carbon_ledger/errors.hpp>
#include <carbon_ledger/model.hpp>

namespace carbon_ledger {

/// Split of a day's energy between holdings and transactions; the two
/// weights always sum to exactly 1.
struct MethodWeights {
  Date date;
  Fraction holding_weight = Fraction::one();
  Fraction transaction_weight;
  /// "fee_share" (PoW) or "pos_tx_share" (PoS).
  std::string source;

  static MethodWeights from_transaction_weight(Date date, Fraction tx_weight, std::string source) {
    MethodWeights w;
    w.date = date;
    w.holding_weight = tx_weight.complement();
    w.transaction_weight = std::move(tx_weight);
    w.source = std::move(source);
    return w;
  }
};

/// Share of transaction fees in the day's total miner revenue.
inline Fraction fee_share(const NetworkDay& day) {
  if (!day.block_reward || !day.tx_fees_total) {
    throw AllocationError(AllocationErrorKind::MissingColumn,
                          day.date.to_string() + ": PoW day needs block_reward and tx_fees_total");
  }
  const CoinAmount revenue = *day.block_reward + *day.tx_fees_total;
  if (revenue.is_zero()) {
    throw AllocationError(AllocationErrorKind::MalformedDay,
                          day.date.to_string() + ": zero total miner revenue");
  }
  return Fraction(*day.tx_fees_total / revenue);
}

inline MethodWeights method_weights(const NetworkDay& day, const ConsensusParams& params) {
  if (params.kind == ConsensusKind::PoW) {
    return MethodWeights::from_transaction_weight(day.date, fee_share(day), "fee_share");
  }
  if (!day.pos_tx_share) {
    throw AllocationError(AllocationErrorKind::MissingColumn,
                          day.date.to_string() + ": PoS day lacks pos_tx_share");
  }
  return MethodWeights::from_transaction_weight(day.date, *day.pos_tx_share, "pos_tx_share");
}

inline Energy holding_pool(const NetworkDay& day, const MethodWeights& w) {
  return day.energy * w.holding_weight;
}

inline Energy transaction_pool(const NetworkDay& day, const MethodWeights& w) {
  return day.energy * w.transaction_weight;
}

/// The pool `method` draws on for `activity`, with its factor chain. Pure
/// methods use the whole day; the hybrid scales by the matching weight.
/// Throws MethodMismatch when the method does not cover the activity.
inline Pool activity_pool(const NetworkDay& day, const MethodWeights& w, Activity activity,
                          Method method) {
  if (!method_covers(method, activity)) {
    throw AllocationError(AllocationErrorKind::MethodMismatch,
                          std::string(to_string(method)) + " method does not allocate to " +
                              std::string(to_string(activity)) + "s");
  }
  Pool pool{day.energy, {}};
  if (method == Method::Hybrid) {
    if (activity == Activity::Holding) {
      pool = pool.scaled("holding_weight", w.holding_weight.value());
    } else {
      pool = pool.scaled("transaction_weight", w.transaction_weight.value());
    }
  }
  return pool;
}

/// Available totals for the transaction basis hierarchy.
struct BasisTotals {
  std::optional<Decimal> fee_total;
  std::optional<Decimal> gas_total;
  std::uint64_t count_total = 0;
};

struct BasisChoice {
  Basis basis = Basis::Count;
  Decimal quantity;
  Decimal total;
};

/// Picks the transaction basis: fee, gas, count on PoW; gas, fee, count on
/// PoS. A preferred basis is skipped when the record or the totals lack it
/// or the total is zero.
inline BasisChoice choose_transaction_basis(ConsensusKind kind, const TransactionRecord& tx,
                                            const BasisTotals& totals) {
  if (!tx.fee_paid && !tx.gas_used && !tx.tx_count) {
    throw AllocationError(AllocationErrorKind::BasisUnavailable,
                          "transaction record for '" + tx.entity_id + "' on " +
                              tx.date.to_string() + " has no fee, gas or count");
  }
  if (totals.count_total == 0) {
    throw AllocationError(AllocationErrorKind::NoTransactions,
                          tx.date.to_string() + ": transaction record for '" + tx.entity_id +
                              "' but no transactions recorded");
  }

  const auto fee = [&]() -> std::optional<BasisChoice> {
    if (tx.fee_paid && totals.fee_total && !totals.fee_total->is_zero()) {
      return BasisChoice{Basis::Fee, tx.fee_paid->value(), *totals.fee_total};
    }
    return std::nullopt;
  };
  const auto gas = [&]() -> std::optional<BasisChoice> {
    if (tx.gas_used && totals.gas_total && !totals.gas_total->is_zero()) {
      return BasisChoice{Basis::Gas, tx.gas_used->value(), *totals.gas_total};
    }
    return std::nullopt;
  };

  std::optional<BasisChoice> choice =
      kind == ConsensusKind::PoW ? fee() : gas();
  if (!choice) choice = kind == ConsensusKind::PoW ? gas() : fee();
  if (!choice) {
    choice = BasisChoice{Basis::Count, Decimal(static_cast<std::int64_t>(tx.count())),
                         Decimal(static_cast<std::int64_t>(totals.count_total))};
  }
  if (choice->quantity > choice->total) {
    throw AllocationError(AllocationErrorKind::ShareOverflow,
                          "'" + tx.entity_id + "' on " + tx.date.to_string() + ": " +
                              std::string(to_string(choice->basis)) + " " +
                              choice->quantity.exact_string() + " exceeds day total " +
                              choice->total.exact_string());
  }
  return *choice;
}

inline BasisTotals day_basis_totals(const NetworkDay& day) {
  BasisTotals t;
  if (day.tx_fees_total) t.fee_total = day.tx_fees_total->value();
  if (day.gas_total) t.gas_total = day.gas_total->value();
  t.count_total = day.tx_count;
  return t;
}

namespace detail {

inline AllocationResult draw_from_pool(const Pool& pool, std::string entity_id, Date date,
                                       Method method, Activity activity, Basis basis,
                                       const Decimal& quantity, const Decimal& total,
                                       const std::optional<EmissionFactor>& factor) {
  AllocationResult r;
  r.entity_id = std::move(entity_id);
  r.date = date;
  r.method = method;
  r.activity = activity;
  r.audit.base_energy = pool.base;
  r.audit.factors = pool.factors;
  r.audit.pool_energy = pool.energy();
  r.audit.basis = basis;
  r.audit.entity_quantity = quantity;
  r.audit.basis_total = total;
  r.audit.factors.push_back({"entity_share", quantity / total});
  r.energy = r.audit.pool_energy * r.audit.factors.back().value;
  if (factor) r.carbon = carbonize(r.energy, *factor);
  return r;
}

}  // namespace detail

/// Energy attributed to one holding: its share of the effective supply
/// applied to the whole day (HoldingBased) or to the holding pool (Hybrid).
inline AllocationResult allocate_holding(const NetworkDay& day, const MethodWeights& w,
                                         const HoldingRecord& holding, Method method) {
  if (holding.date != day.date || w.date != day.date) {
    throw AllocationError(AllocationErrorKind::DateMismatch,
                          "holding dated " + holding.date.to_string() + " applied to day " +
                              day.date.to_string());
  }
  const Pool pool = activity_pool(day, w, Activity::Holding, method);
  const Decimal effective = day.effective_supply();
  if (holding.amount.value() > effective) {
    throw AllocationError(AllocationErrorKind::ShareOverflow,
                          "'" + holding.entity_id + "' holds " + holding.amount.value().exact_string() +
                              " on " + day.date.to_string() + ", above effective supply " +
                              effective.exact_string());
  }
  auto r = detail::draw_from_pool(pool, holding.entity_id, day.date, method, Activity::Holding,
                                  Basis::Supply, holding.amount.value(), effective,
                                  day.emission_factor);
  if (method == Method::Hybrid) r.audit.weight_source = w.source;
  r.audit.filled = day.filled;
  return r;
}

/// Energy attributed to one transaction record: its share of the day's
/// fee, gas or count total applied to the whole day (TransactionBased) or
/// to the transaction pool (Hybrid).
inline AllocationResult allocate_transaction(const NetworkDay& day, const ConsensusParams& params,
                                             const MethodWeights& w, const TransactionRecord& tx,
                                             Method method) {
  if (tx.date != day.date || w.date != day.date) {
    throw AllocationError(AllocationErrorKind::DateMismatch,
                          "transaction dated " + tx.date.to_string() + " applied to day " +
                              day.date.to_string());
  }
  const Pool pool = activity_pool(day, w, Activity::Transaction, method);
  const BasisChoice basis = choose_transaction_basis(params.kind, tx, day_basis_totals(day));
  auto r = detail::draw_from_pool(pool, tx.entity_id, day.date, method, Activity::Transaction,
                                  basis.basis, basis.quantity, basis.total, day.emission_factor);
  if (method == Method::Hybrid) r.audit.weight_source = w.source;
  r.audit.filled = day.filled;
  return r;
}

/// Period totals for one (scope, activity).
struct SummaryRow {
  std::string scope;
  Activity activity = Activity::Holding;
  Method method = Method::Hybrid;
  std::size_t result_count = 0;
  Energy total;
  /// Average of per-day allocations over the period (total / period days).
  Decimal daily_mean;
  /// Mean pool x mean quantity / mean basis total over the days with
  /// allocations, scaled to the period. Set only when every result in the
  /// row uses the same basis.
  std::optional<Decimal> ratio_of_averages;
  /// Present when every result carries carbon.
  std::optional<Carbon> carbon_total;
};

struct PeriodSummary {
  std::size_t period_days = 0;
  std::vector<SummaryRow> rows;

  const SummaryRow* find(std::string_view scope, Activity activity) const {
    for (const auto& r : rows)
      if (r.scope == scope && r.activity == activity) return &r;
    return nullptr;
  }
};

/// Deterministic output order: (date, entity_id, activity, scope); ties keep
/// input order.
inline void sort_results(std::vector<AllocationResult>& results) {
  std::stable_sort(results.begin(), results.end(), [](const auto& a, const auto& b) {
    return std::tie(a.date, a.entity_id, a.activity, a.scope) <
           std::tie(b.date, b.entity_id, b.activity, b.scope);
  });
}

/// Aggregates results per (scope, activity). `always` lists rows to emit
/// even when no result falls into them.
inline PeriodSummary summarize(const std::vector<AllocationResult>& results, std::size_t period_days,
                               Method method,
                               const std::vector<std::pair<std::string, Activity>>& always = {}) {
  struct Acc {
    SummaryRow row;
    bool all_carbon = true;
    std::optional<Basis> basis;
    bool mixed_basis = false;
    // date -> (pool, quantity sum, basis total)
    std::map<Date, std::tuple<Decimal, Decimal, Decimal>> per_day;
  };
  std::map<std::pair<std::string, Activity>, Acc> acc;
  for (const auto& key : always) {
    auto& a = acc[key];
    a.row.scope = key.first;
    a.row.activity = key.second;
  }
  for (const auto& r : results) {
    auto& a = acc[{r.scope, r.activity}];
    a.row.scope = r.scope;
    a.row.activity = r.activity;
    ++a.row.result_count;
    a.row.total += r.energy;
    if (r.carbon) {
      a.row.carbon_total = a.row.carbon_total.value_or(Carbon{}) + *r.carbon;
    } else {
      a.all_carbon = false;
    }
    if (a.basis && *a.basis != r.audit.basis) a.mixed_basis = true;
    a.basis = r.audit.basis;
    auto [it, inserted] = a.per_day.try_emplace(
        r.date, r.audit.pool_energy.value(), r.audit.entity_quantity, r.audit.basis_total);
    if (!inserted) std::get<1>(it->second) += r.audit.entity_quantity;
  }

  PeriodSummary summary;
  summary.period_days = period_days;
  for (auto& [key, a] : acc) {
    SummaryRow row = std::move(a.row);
    row.method = method;
    if (!a.all_carbon || row.result_count == 0) row.carbon_total.reset();
    if (period_days > 0) {
      row.daily_mean = row.total.value() / Decimal(static_cast<std::int64_t>(period_days));
    }
    if (!a.per_day.empty() && !a.mixed_basis && period_days > 0) {
      Decimal pools, quantities, totals;
      for (const auto& [date, v] : a.per_day) {
        pools += std::get<0>(v);
        quantities += std::get<1>(v);
        totals += std::get<2>(v);
      }
      const auto days_with = Decimal(static_cast<std::int64_t>(a.per_day.size()));
      const auto period = Decimal(static_cast<std::int64_t>(period_days));
      if (!totals.is_zero()) {
        row.ratio_of_averages = (pools / days_with) * quantities / totals * days_with / period;
      }
    }
    summary.rows.push_back(std::move(row));
  }
  return summary;
}

struct PortfolioAllocation {
  std::vector<AllocationResult> results;
  PeriodSummary summary;
};

struct PortfolioOptions {
  /// Scope label stamped on each result (normally the network id).
  std::string scope;
  /// Worker threads evaluating disjoint day ranges; 1 runs inline.
  std::size_t workers = 1;
};

/// Checks that `days` is strictly increasing.
inline void require_ordered(std::span<const NetworkDay> days) {
  for (std::size_t i = 1; i < days.size(); ++i) {
    if (!(days[i - 1].date < days[i].date)) {
      throw AllocationError(AllocationErrorKind::UnorderedDays,
                            "days must be strictly increasing; " + days[i].date.to_string() +
                                " follows " + days[i - 1].date.to_string());
    }
  }
}

inline const NetworkDay* find_day(std::span<const NetworkDay> days, const Date& date) {
  auto it = std::lower_bound(days.begin(), days.end(), date,
                             [](const NetworkDay& d, const Date& x) { return d.date < x; });
  return it != days.end() && it->date == date ? &*it : nullptr;
}

/// Allocates every holding and transaction of `portfolio` over `days`.
/// Records the method does not cover are skipped. Every record date must
/// have a matching day (MissingDayError lists the gaps).
inline PortfolioAllocation allocate_portfolio(std::span<const NetworkDay> days,
                                              const ConsensusParams& params,
                                              const Portfolio& portfolio, Method method,
                                              const PortfolioOptions& options = {}) {
  require_ordered(days);

  std::vector<Date> missing;
  const auto check = [&](const Date& d) {
    if (!find_day(days, d)) missing.push_back(d);
  };
  for (const auto& h : portfolio.holdings) check(h.date);
  for (const auto& t : portfolio.transactions) check(t.date);
  if (!missing.empty()) {
    std::sort(missing.begin(), missing.end());
    missing.erase(std::unique(missing.begin(), missing.end()), missing.end());
    throw MissingDayError(std::move(missing));
  }

  // Index records by day position.
  std::vector<std::vector<const HoldingRecord*>> holdings_by_day(days.size());
  std::vector<std::vector<const TransactionRecord*>> txs_by_day(days.size());
  const auto index_of = [&](const Date& d) {
    return static_cast<std::size_t>(find_day(days, d) - days.data());
  };
  if (method_covers(method, Activity::Holding)) {
    for (const auto& h : portfolio.holdings) holdings_by_day[index_of(h.date)].push_back(&h);
  }
  if (method_covers(method, Activity::Transaction)) {
    for (const auto& t : portfolio.transactions) txs_by_day[index_of(t.date)].push_back(&t);
  }

  const auto run_range = [&](std::size_t begin, std::size_t end) {
    std::vector<AllocationResult> out;
    for (std::size_t i = begin; i < end; ++i) {
      if (holdings_by_day[i].empty() && txs_by_day[i].empty()) continue;
      const NetworkDay& day = days[i];
      const MethodWeights w = method_weights(day, params);
      for (const auto* h : holdings_by_day[i]) {
        out.push_back(allocate_holding(day, w, *h, method));
        out.back().scope = options.scope;
      }
      for (const auto* t : txs_by_day[i]) {
        out.push_back(allocate_transaction(day, params, w, *t, method));
        out.back().scope = options.scope;
      }
    }
    return out;
  };

  PortfolioAllocation allocation;
  const std::size_t workers = std::max<std::size_t>(1, std::min(options.workers, days.size()));
  if (workers <= 1) {
    allocation.results = run_range(0, days.size());
  } else {
    std::vector<std::future<std::vector<AllocationResult>>> parts;
    const std::size_t chunk = (days.size() + workers - 1) / workers;
    for (std::size_t begin = 0; begin < days.size(); begin += chunk) {
      parts.push_back(std::async(std::launch::async, run_range, begin,
                                 std::min(days.size(), begin + chunk)));
    }
    for (auto& p : parts) {
      auto chunk_results = p.get();
      allocation.results.insert(allocation.results.end(),
                                std::make_move_iterator(chunk_results.begin()),
                                std::make_move_iterator(chunk_results.end()));
    }
  }
  sort_results(allocation.results);

  std::vector<std::pair<std::string, Activity>> always;
  for (auto a : {Activity::Holding, Activity::Transaction})
    if (method_covers(method, a)) always.emplace_back(options.scope, a);
  allocation.summary = summarize(allocation.results, days.size(), method, always);
  return allocation;
}

}  // namespace carbon_ledger
