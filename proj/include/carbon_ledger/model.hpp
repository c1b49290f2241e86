#pragma once

/// @file carbon_ledger/model.hpp
/// @brief Network telemetry, portfolios and allocation results.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <carbon_ledger/date.hpp>
#include <carbon_ledger/decimal.hpp>
#include <carbon_ledger/units.hpp>

namespace carbon_ledger {

enum class ConsensusKind { PoW, PoS };

inline std::string_view to_string(ConsensusKind k) { return k == ConsensusKind::PoW ? "pow" : "pos"; }

inline std::optional<ConsensusKind> parse_consensus(std::string_view s) {
  if (s == "pow" || s == "PoW") return ConsensusKind::PoW;
  if (s == "pos" || s == "PoS") return ConsensusKind::PoS;
  return std::nullopt;
}

/// PoW days are weighted by the reward/fee columns, PoS days by the
/// transaction energy share column.
struct ConsensusParams {
  ConsensusKind kind = ConsensusKind::PoW;
};

/// One UTC day of network telemetry.
struct NetworkDay {
  Date date;
  Energy energy;
  std::optional<CoinAmount> block_reward;   // required for PoW
  std::optional<CoinAmount> tx_fees_total;  // required for PoW
  CoinAmount coin_supply;
  std::optional<Fraction> lost_coin_fraction;  // absent means 0
  std::uint64_t tx_count = 0;
  std::optional<Gas> gas_total;
  std::optional<Fraction> pos_tx_share;  // required for PoS
  std::optional<EmissionFactor> emission_factor;
  /// Synthesized by forward fill rather than observed.
  bool filled = false;

  Decimal lost_fraction() const { return lost_coin_fraction ? lost_coin_fraction->value() : Decimal(0); }

  /// Supply net of lost coins.
  Decimal effective_supply() const {
    return coin_supply.value() * (Decimal(1) - lost_fraction());
  }
};

struct ColumnProblem {
  std::string column;
  std::string reason;
};

/// Row-level invariants of a day under `kind`. Empty result means valid.
inline std::vector<ColumnProblem> check_network_day(const NetworkDay& day, ConsensusKind kind) {
  std::vector<ColumnProblem> problems;
  if (day.coin_supply.is_zero()) problems.push_back({"coin_supply", "must be positive"});
  if (day.lost_coin_fraction && day.lost_coin_fraction->value() >= Decimal(1)) {
    problems.push_back({"lost_coin_fraction", "must be below 1"});
  }
  if (day.tx_count == 0) {
    if (day.tx_fees_total && !day.tx_fees_total->is_zero()) {
      problems.push_back({"tx_fees_total", "must be 0 when tx_count is 0"});
    }
    if (day.gas_total && !day.gas_total->is_zero()) {
      problems.push_back({"gas_total", "must be 0 when tx_count is 0"});
    }
  }
  if (kind == ConsensusKind::PoW) {
    if (!day.block_reward) problems.push_back({"block_reward", "required for PoW"});
    if (!day.tx_fees_total) problems.push_back({"tx_fees_total", "required for PoW"});
    if (day.block_reward && day.tx_fees_total &&
        (*day.block_reward + *day.tx_fees_total).is_zero()) {
      problems.push_back({"block_reward",
                          "zero-revenue PoW day: block_reward + tx_fees_total must be positive"});
    }
  } else {
    if (!day.pos_tx_share) {
      problems.push_back({"pos_tx_share", "required for PoS"});
    } else if (day.tx_count == 0 && !day.pos_tx_share->value().is_zero()) {
      problems.push_back({"pos_tx_share", "must be 0 when tx_count is 0"});
    }
  }
  return problems;
}

/// Average balance an entity held over one day.
struct HoldingRecord {
  std::string entity_id;
  Date date;
  CoinAmount amount;
};

/// Transactions an entity executed on one day. At least one basis
/// quantity must be present; the count basis defaults to 1.
struct TransactionRecord {
  std::string entity_id;
  Date date;
  std::optional<CoinAmount> fee_paid;
  std::optional<Gas> gas_used;
  std::optional<std::uint64_t> tx_count;

  std::uint64_t count() const { return tx_count.value_or(1); }
};

struct Portfolio {
  std::string schema_version = "1";
  std::string network_id;
  std::vector<HoldingRecord> holdings;
  std::vector<TransactionRecord> transactions;
};

enum class Method { HoldingBased, TransactionBased, Hybrid };
enum class Activity { Holding, Transaction };

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::HoldingBased: return "holding";
    case Method::TransactionBased: return "transaction";
    case Method::Hybrid: return "hybrid";
  }
  return "hybrid";
}

inline std::optional<Method> parse_method(std::string_view s) {
  if (s == "holding") return Method::HoldingBased;
  if (s == "transaction") return Method::TransactionBased;
  if (s == "hybrid") return Method::Hybrid;
  return std::nullopt;
}

inline std::string_view to_string(Activity a) { return a == Activity::Holding ? "holding" : "transaction"; }

/// Whether `m` attributes anything to activity `a`.
inline bool method_covers(Method m, Activity a) {
  if (m == Method::Hybrid) return true;
  return (m == Method::HoldingBased) == (a == Activity::Holding);
}

/// A named multiplicative step from a base energy to an allocation.
struct Factor {
  std::string name;
  Decimal value;
};

/// An energy pool expressed as base x product(factors), so every
/// allocation drawn from it can be replayed exactly.
struct Pool {
  Energy base;
  std::vector<Factor> factors;

  Energy energy() const {
    Decimal e = base.value();
    for (const auto& f : factors) e *= f.value;
    return Energy(e);
  }

  Pool scaled(std::string name, Decimal value) const {
    Pool p = *this;
    p.factors.push_back({std::move(name), std::move(value)});
    return p;
  }
};

enum class Basis { Supply, Fee, Gas, Count, TokenSupply };

inline std::string_view to_string(Basis b) {
  switch (b) {
    case Basis::Supply: return "supply";
    case Basis::Fee: return "fee";
    case Basis::Gas: return "gas";
    case Basis::Count: return "count";
    case Basis::TokenSupply: return "token_supply";
  }
  return "count";
}

/// Everything needed to recompute an allocation from its inputs.
struct Audit {
  Energy base_energy;
  std::vector<Factor> factors;
  /// Where the hybrid weight came from: "fee_share", "pos_tx_share" or
  /// empty under a pure method.
  std::string weight_source;
  Basis basis = Basis::Supply;
  Decimal entity_quantity;
  Decimal basis_total;
  Energy pool_energy;
  bool filled = false;
  /// Layer chain for nested networks, outermost first.
  std::vector<std::string> provenance;

  /// base_energy x product(factors).
  Energy replay() const {
    Decimal e = base_energy.value();
    for (const auto& f : factors) e *= f.value;
    return Energy(e);
  }
};

struct AllocationResult {
  std::string entity_id;
  Date date;
  Method method = Method::Hybrid;
  Activity activity = Activity::Holding;
  /// Network, application or layer-2 identifier the allocation belongs to.
  std::string scope;
  Energy energy;
  std::optional<Carbon> carbon;
  Audit audit;
};

}  // namespace carbon_ledger
