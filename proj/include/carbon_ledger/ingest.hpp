#pragma once

/// @file carbon_ledger/ingest.hpp
/// @brief Loading, validation and canonical serialization of input files.
///
/// Network telemetry is CSV, everything nested (portfolios, applications,
/// layer-2 descriptors) is JSON with decimals encoded as strings. Loaders
/// collect every row-level problem before failing, one issue per bad row.

#include <algorithm>
#include <array>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include <json.hpp>

#include <carbon_ledger/apps.hpp>
#include <carbon_ledger/errors.hpp>
#include <carbon_ledger/layer2.hpp>
#include <carbon_ledger/model.hpp>

namespace carbon_ledger {

inline constexpr std::string_view kSchemaVersion = "1";

inline constexpr std::array<std::string_view, 10> kNetworkCsvColumns = {
    "date",        "energy_wh", "block_reward", "tx_fees_total", "coin_supply",
    "lost_coin_fraction", "tx_count", "gas_total", "pos_tx_share", "emission_factor_g_per_kwh"};

/// Consensus and smallest denomination of well-known networks.
struct NetworkProfile {
  std::string_view id;
  std::optional<ConsensusKind> consensus;
  int coin_decimals;
};

inline constexpr std::array<NetworkProfile, 9> kKnownNetworks = {{
    {"bitcoin", ConsensusKind::PoW, 8},
    {"litecoin", ConsensusKind::PoW, 8},
    {"bitcoin-cash", ConsensusKind::PoW, 8},
    {"ethereum-pow", ConsensusKind::PoW, 18},
    {"ethereum-pos", ConsensusKind::PoS, 18},
    {"ethereum", std::nullopt, 18},
    {"cardano", ConsensusKind::PoS, 6},
    {"solana", ConsensusKind::PoS, 9},
    {"polygon", ConsensusKind::PoS, 18},
}};

inline std::optional<NetworkProfile> find_network_profile(std::string_view id) {
  for (const auto& p : kKnownNetworks)
    if (p.id == id) return p;
  return std::nullopt;
}

/// How to interpret a network's numeric columns.
struct NetworkSpec {
  std::string network_id;
  ConsensusKind consensus = ConsensusKind::PoW;
  /// Maximum fractional digits of coin amounts; unchecked when absent.
  std::optional<int> coin_decimals;
};

/// A network's validated inputs.
struct Dataset {
  std::string schema_version{kSchemaVersion};
  std::string network_id;
  ConsensusParams consensus;
  std::vector<NetworkDay> days;
  std::vector<AppDay> apps;
  std::vector<TokenHolding> token_holdings;
  std::vector<AppTransaction> app_transactions;
  std::vector<Layer2Day> l2s;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << content;
  if (!out) throw IoError("failed writing '" + path + "'");
}

namespace detail {

// Failure of a single field; converted into a row issue by the caller.
struct FieldError {
  std::string column;
  std::string reason;
};

inline Decimal parse_non_negative(std::string_view column, std::string_view text,
                                  std::optional<int> max_scale = std::nullopt) {
  auto d = Decimal::try_parse(text);
  if (!d) throw FieldError{std::string(column), "not a plain decimal: '" + std::string(text) + "'"};
  if (d->is_negative()) throw FieldError{std::string(column), "negative"};
  if (max_scale && Decimal::written_scale(text) > static_cast<std::size_t>(*max_scale)) {
    // Trailing zeros beyond the denomination still lose nothing, but reject
    // anything finer than the smallest unit.
    if (!d->scale() || *d->scale() > *max_scale) {
      throw FieldError{std::string(column),
                       "precision exceeds " + std::to_string(*max_scale) + " decimal places"};
    }
  }
  return *d;
}

inline std::uint64_t parse_count(std::string_view column, std::string_view text) {
  if (text.empty()) throw FieldError{std::string(column), "required"};
  if (text.front() == '-') throw FieldError{std::string(column), "negative"};
  std::uint64_t v = 0;
  for (char c : text) {
    if (c < '0' || c > '9') {
      throw FieldError{std::string(column), "not a non-negative integer: '" + std::string(text) + "'"};
    }
    if (v > (UINT64_MAX - static_cast<std::uint64_t>(c - '0')) / 10) {
      throw FieldError{std::string(column), "integer out of range"};
    }
    v = v * 10 + static_cast<std::uint64_t>(c - '0');
  }
  return v;
}

inline Fraction parse_fraction(std::string_view column, std::string_view text) {
  const Decimal d = parse_non_negative(column, text);
  if (d > Decimal(1)) throw FieldError{std::string(column), "must lie in [0, 1]"};
  return Fraction(d);
}

inline Date parse_date(std::string_view column, std::string_view text) {
  auto d = Date::try_parse(text);
  if (!d) throw FieldError{std::string(column), "not an ISO date (YYYY-MM-DD): '" + std::string(text) + "'"};
  return *d;
}

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

// Field accessor keyed by CSV column name, shared by the CSV reader and the
// JSON readers (remote days, layer-2 internal days).
using FieldLookup = std::function<std::optional<std::string>(std::string_view column)>;

inline NetworkDay parse_network_day(const FieldLookup& field, const NetworkSpec& spec,
                                    std::optional<Date> date_override = std::nullopt) {
  const auto required = [&](std::string_view col) {
    auto v = field(col);
    if (!v || v->empty()) throw FieldError{std::string(col), "required"};
    return *v;
  };
  const auto optional = [&](std::string_view col) -> std::optional<std::string> {
    auto v = field(col);
    if (!v || v->empty()) return std::nullopt;
    return v;
  };

  NetworkDay day;
  day.date = date_override ? *date_override : parse_date("date", required("date"));
  day.energy = Energy(parse_non_negative("energy_wh", required("energy_wh")));
  if (auto v = optional("block_reward")) {
    day.block_reward = CoinAmount(parse_non_negative("block_reward", *v, spec.coin_decimals));
  }
  if (auto v = optional("tx_fees_total")) {
    day.tx_fees_total = CoinAmount(parse_non_negative("tx_fees_total", *v, spec.coin_decimals));
  }
  day.coin_supply = CoinAmount(parse_non_negative("coin_supply", required("coin_supply"), spec.coin_decimals));
  if (auto v = optional("lost_coin_fraction")) {
    day.lost_coin_fraction = parse_fraction("lost_coin_fraction", *v);
  }
  day.tx_count = parse_count("tx_count", required("tx_count"));
  if (auto v = optional("gas_total")) day.gas_total = Gas(parse_non_negative("gas_total", *v));
  if (auto v = optional("pos_tx_share")) day.pos_tx_share = parse_fraction("pos_tx_share", *v);
  if (auto v = optional("emission_factor_g_per_kwh")) {
    day.emission_factor = EmissionFactor(parse_non_negative("emission_factor_g_per_kwh", *v));
  }

  const auto problems = check_network_day(day, spec.consensus);
  if (!problems.empty()) throw FieldError{problems.front().column, problems.front().reason};
  return day;
}

inline std::string opt_text(const std::optional<Decimal>& d) { return d ? d->to_string() : std::string{}; }

template <class Q>
std::string opt_text(const std::optional<Q>& q) {
  return q ? q->value().to_string() : std::string{};
}

inline std::vector<std::string> network_day_fields(const NetworkDay& d) {
  return {d.date.to_string(),
          d.energy.value().to_string(),
          opt_text(d.block_reward),
          opt_text(d.tx_fees_total),
          d.coin_supply.value().to_string(),
          opt_text(d.lost_coin_fraction),
          std::to_string(d.tx_count),
          opt_text(d.gas_total),
          opt_text(d.pos_tx_share),
          opt_text(d.emission_factor)};
}

// Days must be strictly increasing; reports duplicates and regressions.
inline void check_day_order(const std::vector<std::pair<std::size_t, Date>>& rows, const std::string& source,
                            const std::string& section, std::vector<Issue>& issues,
                            std::set<std::size_t>& bad_rows) {
  std::set<Date> seen;
  std::optional<Date> last;
  for (const auto& [row, date] : rows) {
    if (seen.count(date)) {
      if (bad_rows.insert(row).second) {
        issues.push_back({IssueKind::DuplicateDate, source, section, row, "date",
                          "duplicate date " + date.to_string()});
      }
    } else if (last && date < *last) {
      if (bad_rows.insert(row).second) {
        issues.push_back({IssueKind::RowInvalid, source, section, row, "date",
                          "dates must be strictly increasing; " + date.to_string() + " follows " +
                              last->to_string()});
      }
    }
    seen.insert(date);
    if (!last || *last < date) last = date;
  }
}

}  // namespace detail

/// Parses network CSV text. Throws ValidationError with one issue per bad
/// row (or a single SchemaMismatch for a wrong header).
inline std::vector<NetworkDay> parse_network_csv(std::string_view text, const NetworkSpec& spec,
                                                 const std::string& source = "") {
  std::vector<std::string_view> lines;
  {
    std::size_t start = 0;
    while (start < text.size()) {
      auto nl = text.find('\n', start);
      if (nl == std::string_view::npos) nl = text.size();
      std::string_view line = text.substr(start, nl - start);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      lines.push_back(line);
      start = nl + 1;
    }
  }
  if (lines.empty()) {
    throw ValidationError({{IssueKind::SchemaMismatch, source, "", 1, "", "empty file, header expected"}});
  }
  const auto header = detail::split_csv_line(lines.front());
  if (!std::equal(header.begin(), header.end(), kNetworkCsvColumns.begin(), kNetworkCsvColumns.end())) {
    std::string expected;
    for (auto c : kNetworkCsvColumns) expected += (expected.empty() ? "" : ",") + std::string(c);
    throw ValidationError({{IssueKind::SchemaMismatch, source, "", 1, "",
                            "header must be '" + expected + "'"}});
  }

  std::vector<NetworkDay> days;
  std::vector<Issue> issues;
  std::vector<std::pair<std::size_t, Date>> row_dates;
  std::set<std::size_t> bad_rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t row = i + 1;
    if (lines[i].empty()) continue;
    const auto fields = detail::split_csv_line(lines[i]);
    if (fields.size() != kNetworkCsvColumns.size()) {
      issues.push_back({IssueKind::RowInvalid, source, "", row, "",
                        "expected " + std::to_string(kNetworkCsvColumns.size()) + " fields, got " +
                            std::to_string(fields.size())});
      bad_rows.insert(row);
      continue;
    }
    const detail::FieldLookup lookup = [&](std::string_view col) -> std::optional<std::string> {
      for (std::size_t c = 0; c < kNetworkCsvColumns.size(); ++c)
        if (kNetworkCsvColumns[c] == col) return std::string(fields[c]);
      return std::nullopt;
    };
    try {
      days.push_back(detail::parse_network_day(lookup, spec));
      row_dates.emplace_back(row, days.back().date);
    } catch (const detail::FieldError& e) {
      issues.push_back({IssueKind::RowInvalid, source, "", row, e.column, e.reason});
      bad_rows.insert(row);
    }
  }
  detail::check_day_order(row_dates, source, "", issues, bad_rows);
  if (!issues.empty()) {
    std::stable_sort(issues.begin(), issues.end(), [](const Issue& a, const Issue& b) { return a.row < b.row; });
    throw ValidationError(std::move(issues));
  }
  return days;
}

inline std::vector<NetworkDay> load_network_csv(const std::string& path, const NetworkSpec& spec) {
  return parse_network_csv(read_file(path), spec, path);
}

/// Canonical CSV: fixed header, rows in date order, shortest exact decimals.
/// Every value must have a terminating decimal expansion.
inline std::string write_network_csv(std::vector<NetworkDay> days) {
  std::sort(days.begin(), days.end(), [](const auto& a, const auto& b) { return a.date < b.date; });
  std::string out;
  for (std::size_t c = 0; c < kNetworkCsvColumns.size(); ++c) {
    out += (c ? "," : "") + std::string(kNetworkCsvColumns[c]);
  }
  out += "\n";
  for (const auto& d : days) {
    const auto fields = detail::network_day_fields(d);
    for (std::size_t c = 0; c < fields.size(); ++c) out += (c ? "," : "") + fields[c];
    out += "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON

namespace detail {

using nlohmann::json;

class JsonRow {
 public:
  JsonRow(const json& obj, std::string section, std::size_t row)
      : obj_(obj), section_(std::move(section)), row_(row) {
    if (!obj_.is_object()) throw FieldError{"", "expected an object"};
  }

  bool has(std::string_view key) const {
    auto it = obj_.find(std::string(key));
    return it != obj_.end() && !it->is_null();
  }

  std::string text(std::string_view key) const {
    if (!has(key)) throw FieldError{std::string(key), "required"};
    const json& v = obj_.at(std::string(key));
    if (!v.is_string()) throw FieldError{std::string(key), "must be a string"};
    auto s = v.get<std::string>();
    if (s.empty()) throw FieldError{std::string(key), "must not be empty"};
    return s;
  }

  /// Decimal fields must be strings; JSON integers are accepted, JSON
  /// floats are rejected because their text has already been rounded.
  std::string decimal_text(std::string_view key) const {
    if (!has(key)) throw FieldError{std::string(key), "required"};
    const json& v = obj_.at(std::string(key));
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
    if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
    if (v.is_number_float()) {
      throw FieldError{std::string(key), "decimal given as a JSON float would lose precision; encode it as a string"};
    }
    throw FieldError{std::string(key), "must be a decimal string"};
  }

  Decimal non_negative(std::string_view key, std::optional<int> max_scale = std::nullopt) const {
    return parse_non_negative(key, decimal_text(key), max_scale);
  }

  std::uint64_t count(std::string_view key) const {
    if (!has(key)) throw FieldError{std::string(key), "required"};
    const json& v = obj_.at(std::string(key));
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer()) throw FieldError{std::string(key), "negative"};
    if (v.is_string()) return parse_count(key, v.get<std::string>());
    throw FieldError{std::string(key), "must be a non-negative integer"};
  }

  Fraction fraction(std::string_view key) const { return parse_fraction(key, decimal_text(key)); }
  Date date(std::string_view key) const { return parse_date(key, text(key)); }

  const json& object() const { return obj_; }

 private:
  const json& obj_;
  std::string section_;
  std::size_t row_;
};

inline json parse_json(std::string_view text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError({{IssueKind::SchemaMismatch, source, "", 0, "", std::string("invalid JSON: ") + e.what()}});
  }
}

inline void check_schema_version(const json& root, const std::string& source, bool required,
                                  std::vector<Issue>& issues) {
  if (!root.contains("schema_version")) {
    if (required) issues.push_back({IssueKind::SchemaMismatch, source, "", 0, "schema_version", "required"});
    return;
  }
  const json& v = root["schema_version"];
  if (!v.is_string()) {
    issues.push_back({IssueKind::SchemaMismatch, source, "", 0, "schema_version", "must be a string"});
    return;
  }
  const auto s = v.get<std::string>();
  const auto major = s.substr(0, s.find('.'));
  if (major != kSchemaVersion) {
    issues.push_back({IssueKind::SchemaMismatch, source, "", 0, "schema_version",
                      "unsupported major version '" + s + "' (expected " + std::string(kSchemaVersion) + ")"});
  }
}

inline const json* array_section(const json& root, std::string_view name, const std::string& source,
                                 std::vector<Issue>& issues, bool required = false) {
  if (!root.contains(std::string(name))) {
    if (required) issues.push_back({IssueKind::SchemaMismatch, source, std::string(name), 0, "", "array required"});
    return nullptr;
  }
  const json& arr = root[std::string(name)];
  if (!arr.is_array()) {
    issues.push_back({IssueKind::SchemaMismatch, source, std::string(name), 0, "", "must be an array"});
    return nullptr;
  }
  return &arr;
}

template <class Fn>
void for_each_row(const json* arr, const std::string& source, const std::string& section,
                  std::vector<Issue>& issues, Fn&& fn) {
  if (!arr) return;
  for (std::size_t i = 0; i < arr->size(); ++i) {
    try {
      JsonRow row((*arr)[i], section, i);
      fn(row, i);
    } catch (const FieldError& e) {
      issues.push_back({IssueKind::RowInvalid, source, section, i, e.column, e.reason});
    }
  }
}

inline TransactionRecord parse_transaction(const JsonRow& row, std::optional<int> coin_decimals) {
  TransactionRecord t;
  t.entity_id = row.text("entity_id");
  t.date = row.date("date");
  if (row.has("fee_paid")) t.fee_paid = CoinAmount(row.non_negative("fee_paid", coin_decimals));
  if (row.has("gas_used")) t.gas_used = Gas(row.non_negative("gas_used"));
  if (row.has("tx_count")) {
    t.tx_count = row.count("tx_count");
    if (*t.tx_count == 0) throw FieldError{"tx_count", "must be positive"};
  }
  if (!t.fee_paid && !t.gas_used && !t.tx_count) {
    throw FieldError{"fee_paid", "one of fee_paid, gas_used or tx_count is required"};
  }
  return t;
}

inline json transaction_json(const TransactionRecord& t) {
  json j = {{"entity_id", t.entity_id}, {"date", t.date.to_string()}};
  if (t.fee_paid) j["fee_paid"] = t.fee_paid->value().to_string();
  if (t.gas_used) j["gas_used"] = t.gas_used->value().to_string();
  if (t.tx_count) j["tx_count"] = *t.tx_count;
  return j;
}

inline void fail_if(std::vector<Issue>& issues) {
  if (!issues.empty()) throw ValidationError(std::move(issues));
}

}  // namespace detail

/// Parses a portfolio document. `coin_decimals` bounds fractional digits of
/// holdings and fees.
inline Portfolio parse_portfolio_json(std::string_view text, const std::string& source = "",
                                      std::optional<int> coin_decimals = std::nullopt) {
  using detail::json;
  const json root = detail::parse_json(text, source);
  std::vector<Issue> issues;
  if (!root.is_object()) {
    throw ValidationError({{IssueKind::SchemaMismatch, source, "", 0, "", "top level must be an object"}});
  }
  detail::check_schema_version(root, source, true, issues);

  Portfolio p;
  p.schema_version = root.value("schema_version", std::string(kSchemaVersion));
  if (!root.contains("network_id") || !root["network_id"].is_string() ||
      root["network_id"].get<std::string>().empty()) {
    issues.push_back({IssueKind::SchemaMismatch, source, "", 0, "network_id", "non-empty string required"});
  } else {
    p.network_id = root["network_id"].get<std::string>();
  }

  std::map<std::pair<std::string, Date>, std::size_t> seen;
  detail::for_each_row(detail::array_section(root, "holdings", source, issues), source, "holdings", issues,
                       [&](const detail::JsonRow& row, std::size_t i) {
                         HoldingRecord h;
                         h.entity_id = row.text("entity_id");
                         h.date = row.date("date");
                         h.amount = CoinAmount(row.non_negative("amount", coin_decimals));
                         auto [it, fresh] = seen.try_emplace({h.entity_id, h.date}, i);
                         if (!fresh) {
                           issues.push_back({IssueKind::DuplicateDate, source, "holdings", i, "date",
                                             "duplicate holding for '" + h.entity_id + "' on " +
                                                 h.date.to_string() + " (first at row " +
                                                 std::to_string(it->second) + ")"});
                           return;
                         }
                         p.holdings.push_back(std::move(h));
                       });
  detail::for_each_row(detail::array_section(root, "transactions", source, issues), source, "transactions",
                       issues, [&](const detail::JsonRow& row, std::size_t) {
                         p.transactions.push_back(detail::parse_transaction(row, coin_decimals));
                       });
  detail::fail_if(issues);
  return p;
}

inline Portfolio load_portfolio_json(const std::string& path, std::optional<int> coin_decimals = std::nullopt) {
  return parse_portfolio_json(read_file(path), path, coin_decimals);
}

/// Canonical portfolio JSON: sorted keys, records ordered by (date,
/// entity_id), two-space indent, trailing newline.
inline std::string write_portfolio_json(Portfolio p) {
  using detail::json;
  std::stable_sort(p.holdings.begin(), p.holdings.end(),
                   [](const auto& a, const auto& b) { return std::tie(a.date, a.entity_id) < std::tie(b.date, b.entity_id); });
  std::stable_sort(p.transactions.begin(), p.transactions.end(),
                   [](const auto& a, const auto& b) { return std::tie(a.date, a.entity_id) < std::tie(b.date, b.entity_id); });
  json root = {{"schema_version", p.schema_version}, {"network_id", p.network_id}};
  root["holdings"] = json::array();
  for (const auto& h : p.holdings) {
    root["holdings"].push_back(
        {{"entity_id", h.entity_id}, {"date", h.date.to_string()}, {"amount", h.amount.value().to_string()}});
  }
  root["transactions"] = json::array();
  for (const auto& t : p.transactions) root["transactions"].push_back(detail::transaction_json(t));
  return root.dump(2) + "\n";
}

struct AppsFile {
  std::vector<AppDay> apps;
  std::vector<TokenHolding> token_holdings;
  std::vector<AppTransaction> app_transactions;
};

inline AppsFile parse_apps_json(std::string_view text, const std::string& source = "",
                                std::optional<int> coin_decimals = std::nullopt) {
  using detail::json;
  const json root = detail::parse_json(text, source);
  std::vector<Issue> issues;
  if (!root.is_object()) {
    throw ValidationError({{IssueKind::SchemaMismatch, source, "", 0, "", "top level must be an object"}});
  }
  detail::check_schema_version(root, source, false, issues);
  AppsFile f;
  std::set<std::pair<std::string, Date>> seen;
  detail::for_each_row(detail::array_section(root, "apps", source, issues, true), source, "apps", issues,
                       [&](const detail::JsonRow& row, std::size_t i) {
                         AppDay a;
                         a.app_id = row.text("app_id");
                         a.date = row.date("date");
                         a.app_fee_share = row.fraction("app_fee_share");
                         if (row.has("token_supply")) a.token_supply = CoinAmount(row.non_negative("token_supply"));
                         a.app_tx_count = row.count("app_tx_count");
                         if (!seen.insert({a.app_id, a.date}).second) {
                           issues.push_back({IssueKind::DuplicateDate, source, "apps", i, "date",
                                             "duplicate app day for '" + a.app_id + "' on " + a.date.to_string()});
                           return;
                         }
                         f.apps.push_back(std::move(a));
                       });
  detail::for_each_row(detail::array_section(root, "token_holdings", source, issues), source, "token_holdings",
                       issues, [&](const detail::JsonRow& row, std::size_t) {
                         TokenHolding h;
                         h.entity_id = row.text("entity_id");
                         h.app_id = row.text("app_id");
                         h.date = row.date("date");
                         h.amount = CoinAmount(row.non_negative("amount"));
                         f.token_holdings.push_back(std::move(h));
                       });
  detail::for_each_row(detail::array_section(root, "app_transactions", source, issues), source,
                       "app_transactions", issues, [&](const detail::JsonRow& row, std::size_t) {
                         AppTransaction t;
                         t.app_id = row.text("app_id");
                         t.tx = detail::parse_transaction(row, coin_decimals);
                         f.app_transactions.push_back(std::move(t));
                       });
  detail::fail_if(issues);
  return f;
}

inline AppsFile load_apps_json(const std::string& path, std::optional<int> coin_decimals = std::nullopt) {
  return parse_apps_json(read_file(path), path, coin_decimals);
}

/// Layer-2 descriptors. Each entry names its internal consensus
/// (`"consensus": "pow" | "pos"`) and carries an `internal_day` object with
/// the network CSV field names; its `energy_wh` and `date` may be omitted.
inline std::vector<Layer2Day> parse_l2_json(std::string_view text, const std::string& source = "") {
  using detail::json;
  const json root = detail::parse_json(text, source);
  std::vector<Issue> issues;
  if (!root.is_object()) {
    throw ValidationError({{IssueKind::SchemaMismatch, source, "", 0, "", "top level must be an object"}});
  }
  detail::check_schema_version(root, source, false, issues);
  std::vector<Layer2Day> out;
  std::set<std::pair<std::string, Date>> seen;
  detail::for_each_row(
      detail::array_section(root, "l2s", source, issues, true), source, "l2s", issues,
      [&](const detail::JsonRow& row, std::size_t i) {
        Layer2Day l2;
        l2.l2_id = row.text("l2_id");
        l2.date = row.date("date");
        l2.l1_fee_share = row.fraction("l1_fee_share");
        l2.infra_energy = Energy(row.non_negative("infra_energy_wh"));
        const auto kind = parse_consensus(row.text("consensus"));
        if (!kind) throw detail::FieldError{"consensus", "must be 'pow' or 'pos'"};
        l2.internal_params.kind = *kind;
        if (!row.has("internal_day") || !row.object()["internal_day"].is_object()) {
          throw detail::FieldError{"internal_day", "object required"};
        }
        json internal = row.object()["internal_day"];
        if (!internal.contains("energy_wh")) internal["energy_wh"] = "0";
        const detail::JsonRow inner(internal, "internal_day", i);
        const detail::FieldLookup lookup = [&](std::string_view col) -> std::optional<std::string> {
          if (!inner.has(col)) return std::nullopt;
          if (col == "tx_count") return std::to_string(inner.count(col));
          return inner.decimal_text(col);
        };
        try {
          l2.internal_day = detail::parse_network_day(lookup, {l2.l2_id, *kind, std::nullopt}, l2.date);
        } catch (const detail::FieldError& e) {
          throw detail::FieldError{"internal_day." + e.column, e.reason};
        }
        if (!seen.insert({l2.l2_id, l2.date}).second) {
          issues.push_back({IssueKind::DuplicateDate, source, "l2s", i, "date",
                            "duplicate layer-2 day for '" + l2.l2_id + "' on " + l2.date.to_string()});
          return;
        }
        out.push_back(std::move(l2));
      });
  detail::fail_if(issues);
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return std::tie(a.l2_id, a.date) < std::tie(b.l2_id, b.date); });
  return out;
}

inline std::vector<Layer2Day> load_l2_json(const std::string& path) { return parse_l2_json(read_file(path), path); }

/// Cross-file checks: app and layer-2 dates exist among the days, app fee
/// shares per day sum to at most 1, token holdings fit their supply.
inline std::vector<Issue> check_dataset_joins(const Dataset& ds, const std::string& apps_source = "",
                                              const std::string& l2_source = "") {
  std::vector<Issue> issues;
  const auto has_day = [&](const Date& d) { return find_day(ds.days, d) != nullptr; };
  std::map<Date, Decimal> share_sums;
  std::map<std::pair<std::string, Date>, const AppDay*> app_index;
  for (std::size_t i = 0; i < ds.apps.size(); ++i) {
    const auto& a = ds.apps[i];
    if (!has_day(a.date)) {
      issues.push_back({IssueKind::RowInvalid, apps_source, "apps", i, "date",
                        "no network day " + a.date.to_string()});
    }
    share_sums[a.date] += a.app_fee_share.value();
    app_index[{a.app_id, a.date}] = &a;
  }
  for (const auto& [date, sum] : share_sums) {
    if (sum > Decimal(1)) {
      issues.push_back({IssueKind::RowInvalid, apps_source, "apps", 0, "app_fee_share",
                        "shares on " + date.to_string() + " sum to " + sum.exact_string() + " > 1"});
    }
  }
  for (std::size_t i = 0; i < ds.token_holdings.size(); ++i) {
    const auto& h = ds.token_holdings[i];
    auto it = app_index.find({h.app_id, h.date});
    if (it == app_index.end()) {
      issues.push_back({IssueKind::RowInvalid, apps_source, "token_holdings", i, "app_id",
                        "no app day for '" + h.app_id + "' on " + h.date.to_string()});
    } else if (!it->second->token_supply) {
      issues.push_back({IssueKind::RowInvalid, apps_source, "token_holdings", i, "app_id",
                        "app '" + h.app_id + "' has no token supply"});
    } else if (h.amount > *it->second->token_supply) {
      issues.push_back({IssueKind::RowInvalid, apps_source, "token_holdings", i, "amount",
                        "exceeds token supply"});
    }
  }
  for (std::size_t i = 0; i < ds.app_transactions.size(); ++i) {
    const auto& t = ds.app_transactions[i];
    if (!app_index.count({t.app_id, t.tx.date})) {
      issues.push_back({IssueKind::RowInvalid, apps_source, "app_transactions", i, "app_id",
                        "no app day for '" + t.app_id + "' on " + t.tx.date.to_string()});
    }
  }
  for (std::size_t i = 0; i < ds.l2s.size(); ++i) {
    if (!has_day(ds.l2s[i].date)) {
      issues.push_back({IssueKind::RowInvalid, l2_source, "l2s", i, "date",
                        "no network day " + ds.l2s[i].date.to_string()});
    }
  }
  return issues;
}

/// Checks portfolio records against `days`: each date must exist and each
/// holding must fit that day's supply.
inline std::vector<Issue> check_portfolio_joins(const Portfolio& p, std::span<const NetworkDay> days,
                                                const std::string& source = "") {
  std::vector<Issue> issues;
  for (std::size_t i = 0; i < p.holdings.size(); ++i) {
    const auto& h = p.holdings[i];
    const NetworkDay* day = find_day(days, h.date);
    if (!day) {
      issues.push_back({IssueKind::RowInvalid, source, "holdings", i, "date",
                        "no network data for " + h.date.to_string()});
    } else if (h.amount > day->coin_supply) {
      issues.push_back({IssueKind::RowInvalid, source, "holdings", i, "amount",
                        "exceeds coin_supply " + day->coin_supply.value().to_string()});
    }
  }
  for (std::size_t i = 0; i < p.transactions.size(); ++i) {
    if (!find_day(days, p.transactions[i].date)) {
      issues.push_back({IssueKind::RowInvalid, source, "transactions", i, "date",
                        "no network data for " + p.transactions[i].date.to_string()});
    }
  }
  return issues;
}

/// Restricts days to `range`.
inline std::vector<NetworkDay> select_days(std::span<const NetworkDay> days, const DateRange& range) {
  std::vector<NetworkDay> out;
  for (const auto& d : days)
    if (range.contains(d.date)) out.push_back(d);
  return out;
}

/// Fills calendar gaps by repeating the previous observed day, marking the
/// copies as filled. Extends to `range.to` when given; nothing is
/// synthesized before the first observed day.
inline std::vector<NetworkDay> fill_forward(std::span<const NetworkDay> days, const DateRange& range = {}) {
  require_ordered(days);
  std::vector<NetworkDay> out;
  if (days.empty()) return out;
  Date end = days.back().date;
  if (range.to && end < *range.to) end = *range.to;
  std::size_t next = 0;
  for (Date d = days.front().date; d <= end; d = d.next()) {
    if (next < days.size() && days[next].date == d) {
      out.push_back(days[next++]);
    } else {
      NetworkDay copy = out.back();
      copy.date = d;
      copy.filled = true;
      out.push_back(std::move(copy));
    }
  }
  return select_days(out, range);
}

}  // namespace carbon_ledger
