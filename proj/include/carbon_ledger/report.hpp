#pragma once

/// @file carbon_ledger/report.hpp
/// @brief Methodology comparison tables, weight series and result emitters.

#include <algorithm>
#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include <carbon_ledger/engine.hpp>

namespace carbon_ledger {

enum class OutputFormat { Csv, Json, Text };

inline std::optional<OutputFormat> parse_format(std::string_view s) {
  if (s == "csv") return OutputFormat::Csv;
  if (s == "json") return OutputFormat::Json;
  if (s == "text") return OutputFormat::Text;
  return std::nullopt;
}

/// One daily-mean cell; empty where the method does not cover the activity.
struct ComparisonCell {
  std::optional<Energy> energy;
  std::optional<Carbon> carbon;
};

/// Daily means for one coin held for one day and one average transaction,
/// under each method.
struct ComparisonRow {
  std::string network;
  std::size_t days = 0;
  ComparisonCell holding_based_holding;
  ComparisonCell holding_based_tx;
  ComparisonCell transaction_based_holding;
  ComparisonCell transaction_based_tx;
  ComparisonCell hybrid_holding;
  ComparisonCell hybrid_tx;

  std::array<const ComparisonCell*, 6> cells() const {
    return {&holding_based_holding, &holding_based_tx, &transaction_based_holding,
            &transaction_based_tx,  &hybrid_holding,   &hybrid_tx};
  }
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;
};

inline constexpr std::array<std::string_view, 6> kComparisonColumns = {
    "holding_based_holding", "holding_based_tx", "transaction_based_holding",
    "transaction_based_tx",  "hybrid_holding",   "hybrid_tx"};

namespace detail {

struct MeanAcc {
  Decimal energy;
  Decimal carbon;
  std::size_t n = 0;
  bool all_carbon = true;

  void add(const AllocationResult& r) {
    energy += r.energy.value();
    if (r.carbon) {
      carbon += r.carbon->value();
    } else {
      all_carbon = false;
    }
    ++n;
  }

  ComparisonCell cell(bool with_carbon) const {
    ComparisonCell c;
    if (n == 0) return c;
    const Decimal count(static_cast<std::int64_t>(n));
    c.energy = Energy(energy / count);
    if (with_carbon && all_carbon) c.carbon = Carbon(carbon / count);
    return c;
  }
};

}  // namespace detail

/// Builds a comparison row over `days`. The holding cells charge a 1-coin
/// holding each day; the transaction cells charge a single transaction on
/// the count basis (1 / tx_count) each day. Both are averaged per day; days
/// without transactions do not enter the transaction means.
inline ComparisonRow compare_network(std::span<const NetworkDay> days, const ConsensusParams& params,
                                     std::string network, bool with_carbon = false) {
  require_ordered(days);
  detail::MeanAcc hb_hold, tb_tx, hy_hold, hy_tx;
  for (const auto& day : days) {
    const MethodWeights w = method_weights(day, params);
    const HoldingRecord coin{"one-coin", day.date, CoinAmount(Decimal(1))};
    hb_hold.add(allocate_holding(day, w, coin, Method::HoldingBased));
    hy_hold.add(allocate_holding(day, w, coin, Method::Hybrid));
    if (day.tx_count > 0) {
      TransactionRecord tx;
      tx.entity_id = "average-tx";
      tx.date = day.date;
      tx.tx_count = 1;
      tb_tx.add(allocate_transaction(day, params, w, tx, Method::TransactionBased));
      hy_tx.add(allocate_transaction(day, params, w, tx, Method::Hybrid));
    }
  }
  ComparisonRow row;
  row.network = std::move(network);
  row.days = days.size();
  row.holding_based_holding = hb_hold.cell(with_carbon);
  row.transaction_based_tx = tb_tx.cell(with_carbon);
  row.hybrid_holding = hy_hold.cell(with_carbon);
  row.hybrid_tx = hy_tx.cell(with_carbon);
  return row;
}

/// Per-day transaction weight: fee share (PoW) or transaction energy
/// share (PoS).
inline std::vector<std::pair<Date, Fraction>> weight_series(std::span<const NetworkDay> days,
                                                            const ConsensusParams& params) {
  std::vector<std::pair<Date, Fraction>> out;
  out.reserve(days.size());
  for (const auto& d : days) out.emplace_back(d.date, method_weights(d, params).transaction_weight);
  return out;
}

inline std::string write_series_csv(const std::vector<std::pair<Date, Fraction>>& series, int digits = 6) {
  std::string out = "date,transaction_weight\n";
  for (const auto& [date, w] : series) {
    out += date.to_string() + "," + w.value().format_significant(digits) + "\n";
  }
  return out;
}

namespace detail {

inline std::string render_aligned(const std::vector<std::vector<std::string>>& rows, std::size_t left_columns = 1) {
  std::vector<std::size_t> widths;
  for (const auto& r : rows) {
    if (widths.size() < r.size()) widths.resize(r.size(), 0);
    for (std::size_t c = 0; c < r.size(); ++c) widths[c] = std::max(widths[c], r[c].size());
  }
  std::string out;
  for (const auto& r : rows) {
    std::string line;
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (c) line += "  ";
      // Label columns left-aligned, values right-aligned.
      if (c < left_columns) {
        line += r[c] + std::string(widths[c] - r[c].size(), ' ');
      } else {
        line += std::string(widths[c] - r[c].size(), ' ') + r[c];
      }
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
  }
  return out;
}

inline std::string csv_join(const std::vector<std::string>& fields) {
  std::string s;
  for (std::size_t i = 0; i < fields.size(); ++i) s += (i ? "," : "") + fields[i];
  return s + "\n";
}

}  // namespace detail

inline constexpr std::string_view kNotApplicable = "N/A";

inline std::string write_comparison_csv(const ComparisonTable& table, bool with_carbon, int digits = 6) {
  std::vector<std::string> header{"network", "days"};
  for (auto c : kComparisonColumns) header.push_back(std::string(c) + "_wh");
  if (with_carbon)
    for (auto c : kComparisonColumns) header.push_back(std::string(c) + "_g");
  std::string out = detail::csv_join(header);
  for (const auto& row : table.rows) {
    std::vector<std::string> f{row.network, std::to_string(row.days)};
    for (const auto* cell : row.cells()) {
      f.push_back(cell->energy ? cell->energy->value().format_significant(digits) : std::string(kNotApplicable));
    }
    if (with_carbon) {
      for (const auto* cell : row.cells()) {
        f.push_back(cell->carbon ? cell->carbon->value().format_significant(digits) : std::string(kNotApplicable));
      }
    }
    out += detail::csv_join(f);
  }
  return out;
}

/// Display text of an energy in `unit` (or its natural unit).
inline std::string energy_text(const Energy& e, std::optional<EnergyUnit> unit, int digits) {
  const EnergyUnit u = unit ? *unit : natural_unit(e);
  return convert_energy(e, u, digits) + " " + std::string(to_string(u));
}

/// Aligned text in the layout of a method comparison table.
inline std::string write_comparison_text(const ComparisonTable& table, bool with_carbon,
                                         std::optional<EnergyUnit> unit = std::nullopt, int digits = 4) {
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"", "Holding-based", "", "Transaction-based", "", "Hybrid", ""});
  rows.push_back({"network", "a) Holding", "b) Tx", "a) Holding", "b) Tx", "a) Holding", "b) Tx"});
  for (const auto& row : table.rows) {
    std::vector<std::string> r{row.network};
    for (const auto* cell : row.cells()) {
      r.push_back(cell->energy ? energy_text(*cell->energy, unit, digits) : std::string(kNotApplicable));
    }
    rows.push_back(std::move(r));
    if (with_carbon) {
      std::vector<std::string> c{"  gCO2e"};
      for (const auto* cell : row.cells()) {
        c.push_back(cell->carbon ? cell->carbon->value().format_significant(digits) : std::string(kNotApplicable));
      }
      rows.push_back(std::move(c));
    }
  }
  return detail::render_aligned(rows);
}

inline std::string write_comparison_json(const ComparisonTable& table, bool with_carbon, int digits = 6) {
  nlohmann::ordered_json root;
  root["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json r;
    r["network"] = row.network;
    r["days"] = row.days;
    const auto cells = row.cells();
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const auto* cell = cells[i];
      nlohmann::ordered_json c;
      if (!cell->energy) {
        c = nullptr;
      } else {
        c["energy_wh"] = cell->energy->value().format_significant(digits);
        c["energy_wh_exact"] = cell->energy->value().exact_string();
        if (with_carbon && cell->carbon) c["carbon_g"] = cell->carbon->value().format_significant(digits);
      }
      r[std::string(kComparisonColumns[i])] = c;
    }
    root["rows"].push_back(r);
  }
  return root.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Allocation results

inline std::string provenance_text(const Audit& a) {
  std::string s;
  for (const auto& p : a.provenance) s += (s.empty() ? "" : ">") + p;
  return s;
}

inline std::string write_results_csv(const std::vector<AllocationResult>& results, bool with_carbon,
                                     int digits = 6) {
  std::vector<std::string> header{"date", "entity_id", "scope", "activity", "method", "energy_wh"};
  if (with_carbon) header.push_back("carbon_g");
  for (auto h : {"basis", "entity_quantity", "basis_total", "pool_energy_wh", "weight_source", "filled", "provenance"})
    header.emplace_back(h);
  std::string out = detail::csv_join(header);
  for (const auto& r : results) {
    std::vector<std::string> f{r.date.to_string(), r.entity_id, r.scope, std::string(to_string(r.activity)),
                               std::string(to_string(r.method)), r.energy.value().format_significant(digits)};
    if (with_carbon) f.push_back(r.carbon ? r.carbon->value().format_significant(digits) : "");
    f.push_back(std::string(to_string(r.audit.basis)));
    f.push_back(r.audit.entity_quantity.exact_string());
    f.push_back(r.audit.basis_total.exact_string());
    f.push_back(r.audit.pool_energy.value().format_significant(digits));
    f.push_back(r.audit.weight_source);
    f.push_back(r.audit.filled ? "true" : "false");
    f.push_back(provenance_text(r.audit));
    out += detail::csv_join(f);
  }
  return out;
}

inline std::string write_summary_csv(const PeriodSummary& s, bool with_carbon, int digits = 6) {
  std::vector<std::string> header{"scope", "activity", "method", "period_days", "result_count",
                                  "total_wh", "daily_mean_wh", "ratio_of_averages_wh"};
  if (with_carbon) header.push_back("carbon_total_g");
  std::string out = detail::csv_join(header);
  for (const auto& r : s.rows) {
    std::vector<std::string> f{r.scope,
                               std::string(to_string(r.activity)),
                               std::string(to_string(r.method)),
                               std::to_string(s.period_days),
                               std::to_string(r.result_count),
                               r.total.value().format_significant(digits),
                               r.daily_mean.format_significant(digits),
                               r.ratio_of_averages ? r.ratio_of_averages->format_significant(digits) : ""};
    if (with_carbon) f.push_back(r.carbon_total ? r.carbon_total->value().format_significant(digits) : "");
    out += detail::csv_join(f);
  }
  return out;
}

/// JSON with display values plus exact values and the audit factor chain,
/// so each allocation can be replayed without rounding.
inline std::string write_results_json(const std::vector<AllocationResult>& results, const PeriodSummary& summary,
                                      bool with_carbon, int digits = 6) {
  using oj = nlohmann::ordered_json;
  oj root;
  root["results"] = oj::array();
  for (const auto& r : results) {
    oj j;
    j["date"] = r.date.to_string();
    j["entity_id"] = r.entity_id;
    j["scope"] = r.scope;
    j["activity"] = to_string(r.activity);
    j["method"] = to_string(r.method);
    j["energy_wh"] = r.energy.value().format_significant(digits);
    j["energy_wh_exact"] = r.energy.value().exact_string();
    if (with_carbon && r.carbon) j["carbon_g"] = r.carbon->value().format_significant(digits);
    oj audit;
    audit["base_energy_wh"] = r.audit.base_energy.value().exact_string();
    audit["factors"] = oj::array();
    for (const auto& f : r.audit.factors) audit["factors"].push_back({{"name", f.name}, {"value", f.value.exact_string()}});
    audit["weight_source"] = r.audit.weight_source;
    audit["basis"] = to_string(r.audit.basis);
    audit["entity_quantity"] = r.audit.entity_quantity.exact_string();
    audit["basis_total"] = r.audit.basis_total.exact_string();
    audit["pool_energy_wh"] = r.audit.pool_energy.value().exact_string();
    audit["filled"] = r.audit.filled;
    audit["provenance"] = r.audit.provenance;
    j["audit"] = audit;
    root["results"].push_back(j);
  }
  oj s;
  s["period_days"] = summary.period_days;
  s["rows"] = oj::array();
  for (const auto& r : summary.rows) {
    oj j;
    j["scope"] = r.scope;
    j["activity"] = to_string(r.activity);
    j["method"] = to_string(r.method);
    j["result_count"] = r.result_count;
    j["total_wh"] = r.total.value().format_significant(digits);
    j["daily_mean_wh"] = r.daily_mean.format_significant(digits);
    j["ratio_of_averages_wh"] = r.ratio_of_averages ? oj(r.ratio_of_averages->format_significant(digits)) : oj(nullptr);
    if (with_carbon) j["carbon_total_g"] = r.carbon_total ? oj(r.carbon_total->value().format_significant(digits)) : oj(nullptr);
    s["rows"].push_back(j);
  }
  root["summary"] = s;
  return root.dump(2) + "\n";
}

inline std::string write_results_text(const std::vector<AllocationResult>& results, const PeriodSummary& summary,
                                      bool with_carbon, int digits = 4) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{"date", "entity", "scope", "activity", "method", "energy"};
  if (with_carbon) header.push_back("gCO2e");
  header.push_back("basis");
  rows.push_back(header);
  for (const auto& r : results) {
    std::vector<std::string> row{r.date.to_string(), r.entity_id, r.scope, std::string(to_string(r.activity)),
                                 std::string(to_string(r.method)), energy_text(r.energy, std::nullopt, digits)};
    if (with_carbon) row.push_back(r.carbon ? r.carbon->value().format_significant(digits) : "");
    row.push_back(std::string(to_string(r.audit.basis)) + (r.audit.filled ? " (filled)" : ""));
    rows.push_back(std::move(row));
  }
  std::string out = detail::render_aligned(rows, 5);
  out += "\n";
  std::vector<std::vector<std::string>> srows{{"scope", "activity", "results", "total", "daily mean"}};
  for (const auto& r : summary.rows) {
    srows.push_back({r.scope, std::string(to_string(r.activity)), std::to_string(r.result_count),
                     energy_text(r.total, std::nullopt, digits), energy_text(Energy(r.daily_mean), std::nullopt, digits)});
  }
  out += "period: " + std::to_string(summary.period_days) + " day(s)\n";
  out += detail::render_aligned(srows, 2);
  return out;
}

}  // namespace carbon_ledger
