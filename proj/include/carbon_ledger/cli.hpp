#pragma once

/// @file carbon_ledger/cli.hpp
/// @brief `carbon-ledger` command line: validate, allocate, compare, series.
///
/// Exit codes: 0 success, 1 validation or allocation failure, 2 I/O or
/// usage error.

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <carbon_ledger/ingest.hpp>
#include <carbon_ledger/remote.hpp>
#include <carbon_ledger/report.hpp>

namespace carbon_ledger::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitIo = 2;

/// Usage problem detected after argument parsing.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct Options {
  std::vector<std::string> days_paths;
  std::vector<std::string> networks;
  std::vector<std::string> consensus;
  std::optional<int> coin_decimals;
  std::string from, to;
  std::string remote;
  std::string cache_dir = ".carbon-ledger-cache";
  std::string fill;
  std::string format;
  std::string out;
  int digits = 0;
  std::string portfolio_path, apps_path, l2_path;
  std::string method = "hybrid";
  std::string app_approach;
  std::string unit;
  bool carbon = false;
  std::size_t workers = 1;
};

namespace detail {

inline DateRange parse_range(const Options& o) {
  DateRange r;
  if (!o.from.empty()) {
    r.from = Date::try_parse(o.from);
    if (!r.from) throw UsageError("--from: not an ISO date: " + o.from);
  }
  if (!o.to.empty()) {
    r.to = Date::try_parse(o.to);
    if (!r.to) throw UsageError("--to: not an ISO date: " + o.to);
  }
  return r;
}

inline NetworkSpec resolve_spec(const Options& o, std::size_t index) {
  if (index >= o.networks.size()) throw UsageError("--network is required");
  NetworkSpec spec;
  spec.network_id = o.networks[index];
  const auto profile = find_network_profile(spec.network_id);
  std::optional<ConsensusKind> kind;
  if (index < o.consensus.size()) {
    kind = parse_consensus(o.consensus[index]);
    if (!kind) throw UsageError("--consensus must be 'pow' or 'pos'");
  } else if (profile) {
    kind = profile->consensus;
  }
  if (!kind) throw UsageError("--consensus is required for network '" + spec.network_id + "'");
  spec.consensus = *kind;
  spec.coin_decimals = o.coin_decimals;
  if (!spec.coin_decimals && profile) spec.coin_decimals = profile->coin_decimals;
  return spec;
}

inline std::vector<NetworkDay> load_days(const Options& o, std::size_t index, const NetworkSpec& spec) {
  const DateRange range = parse_range(o);
  std::vector<NetworkDay> days;
  if (!o.remote.empty()) {
    if (!range.from || !range.to) throw UsageError("--remote needs --from and --to");
    RemoteDayClient client({o.remote, o.cache_dir}, spec);
    days = client.fetch(*range.from, *range.to);
  } else {
    if (index >= o.days_paths.size()) throw UsageError("--days (or --remote) is required");
    days = load_network_csv(o.days_paths[index], spec);
  }
  if (o.fill == "forward") return fill_forward(days, range);
  return select_days(days, range);
}

inline void emit(const Options& o, std::ostream& out, const std::string& text) {
  if (o.out.empty()) {
    out << text;
  } else {
    write_file(o.out, text);
  }
}

inline std::string sibling_path(const std::string& path, const std::string& suffix) {
  std::filesystem::path p(path);
  const auto stem = p.stem().string();
  const auto ext = p.extension().string();
  return (p.parent_path() / (stem + suffix + ext)).string();
}

inline void append_issues(std::vector<Issue>& all, const ValidationError& e) {
  all.insert(all.end(), e.issues().begin(), e.issues().end());
}

inline int digits_or(const Options& o, int fallback) { return o.digits > 0 ? o.digits : fallback; }

}  // namespace detail

inline int cmd_validate(const Options& o, std::ostream& out) {
  const NetworkSpec spec = detail::resolve_spec(o, 0);
  std::vector<Issue> issues;
  Dataset ds;
  ds.network_id = spec.network_id;
  ds.consensus.kind = spec.consensus;
  bool days_ok = false;
  try {
    ds.days = detail::load_days(o, 0, spec);
    days_ok = true;
  } catch (const ValidationError& e) {
    detail::append_issues(issues, e);
  }
  std::optional<Portfolio> portfolio;
  if (!o.portfolio_path.empty()) {
    try {
      portfolio = load_portfolio_json(o.portfolio_path, spec.coin_decimals);
    } catch (const ValidationError& e) {
      detail::append_issues(issues, e);
    }
  }
  if (!o.apps_path.empty()) {
    try {
      auto f = load_apps_json(o.apps_path, spec.coin_decimals);
      ds.apps = std::move(f.apps);
      ds.token_holdings = std::move(f.token_holdings);
      ds.app_transactions = std::move(f.app_transactions);
    } catch (const ValidationError& e) {
      detail::append_issues(issues, e);
    }
  }
  if (!o.l2_path.empty()) {
    try {
      ds.l2s = load_l2_json(o.l2_path);
    } catch (const ValidationError& e) {
      detail::append_issues(issues, e);
    }
  }
  if (days_ok) {
    auto joins = check_dataset_joins(ds, o.apps_path, o.l2_path);
    issues.insert(issues.end(), joins.begin(), joins.end());
    if (portfolio && portfolio->network_id == spec.network_id) {
      auto p = check_portfolio_joins(*portfolio, ds.days, o.portfolio_path);
      issues.insert(issues.end(), p.begin(), p.end());
    }
  }

  const auto format = parse_format(o.format.empty() ? "text" : o.format);
  if (!format) throw UsageError("--format must be csv, json or text");
  std::string text;
  if (*format == OutputFormat::Json) {
    nlohmann::ordered_json j;
    j["valid"] = issues.empty();
    j["error_count"] = issues.size();
    j["errors"] = nlohmann::ordered_json::array();
    for (const auto& i : issues) {
      j["errors"].push_back({{"kind", to_string(i.kind)},
                             {"source", i.source},
                             {"section", i.section},
                             {"row", i.row},
                             {"column", i.column},
                             {"reason", i.reason}});
    }
    text = j.dump(2) + "\n";
  } else {
    for (const auto& i : issues) text += i.describe() + "\n";
    text += issues.empty() ? "ok\n" : std::to_string(issues.size()) + " error(s)\n";
  }
  detail::emit(o, out, text);
  return issues.empty() ? kExitOk : kExitInvalid;
}

inline int cmd_allocate(const Options& o, std::ostream& out) {
  const NetworkSpec spec = detail::resolve_spec(o, 0);
  const auto method = parse_method(o.method);
  if (!method) throw UsageError("--method must be holding, transaction or hybrid");
  if (o.portfolio_path.empty()) throw UsageError("--portfolio is required");
  const DateRange range = detail::parse_range(o);

  Dataset ds;
  ds.network_id = spec.network_id;
  ds.consensus.kind = spec.consensus;
  ds.days = detail::load_days(o, 0, spec);
  Portfolio portfolio = load_portfolio_json(o.portfolio_path, spec.coin_decimals);
  if (!o.apps_path.empty()) {
    auto f = load_apps_json(o.apps_path, spec.coin_decimals);
    ds.apps = std::move(f.apps);
    ds.token_holdings = std::move(f.token_holdings);
    ds.app_transactions = std::move(f.app_transactions);
  }
  if (!o.l2_path.empty()) ds.l2s = load_l2_json(o.l2_path);
  {
    // Auxiliary rows outside the evaluated range are ignored.
    std::erase_if(ds.apps, [&](const AppDay& a) { return !range.contains(a.date); });
    std::erase_if(ds.token_holdings, [&](const TokenHolding& h) { return !range.contains(h.date); });
    std::erase_if(ds.app_transactions, [&](const AppTransaction& t) { return !range.contains(t.tx.date); });
    std::erase_if(ds.l2s, [&](const Layer2Day& l) { return !range.contains(l.date); });
    std::erase_if(portfolio.holdings, [&](const HoldingRecord& h) { return !range.contains(h.date); });
    std::erase_if(portfolio.transactions, [&](const TransactionRecord& t) { return !range.contains(t.date); });
  }
  auto joins = check_dataset_joins(ds, o.apps_path, o.l2_path);
  if (!joins.empty()) throw ValidationError(std::move(joins));

  std::vector<AllocationResult> results;
  std::vector<std::pair<std::string, Activity>> always;
  std::size_t period_days = ds.days.size();

  const bool to_l2 = std::any_of(ds.l2s.begin(), ds.l2s.end(),
                                 [&](const Layer2Day& l) { return l.l2_id == portfolio.network_id; });
  if (to_l2) {
    std::vector<const Layer2Day*> l2_days;
    for (const auto& l : ds.l2s)
      if (l.l2_id == portfolio.network_id) l2_days.push_back(&l);
    std::vector<Date> missing;
    const auto covered = [&](const Date& d) {
      return std::any_of(l2_days.begin(), l2_days.end(), [&](const Layer2Day* l) { return l->date == d; });
    };
    for (const auto& h : portfolio.holdings)
      if (!covered(h.date)) missing.push_back(h.date);
    for (const auto& t : portfolio.transactions)
      if (!covered(t.date)) missing.push_back(t.date);
    if (!missing.empty()) {
      std::sort(missing.begin(), missing.end());
      missing.erase(std::unique(missing.begin(), missing.end()), missing.end());
      throw MissingDayError(std::move(missing));
    }
    for (const auto* l2 : l2_days) {
      const NetworkDay* l1 = find_day(ds.days, l2->date);
      const MethodWeights w = method_weights(*l1, ds.consensus);
      Layer2Day effective = *l2;
      effective.internal_day.filled = l1->filled;
      auto part = allocate_within_l2(l2_total_footprint(*l1, w, *l2), effective, portfolio, *method,
                                     {spec.network_id});
      results.insert(results.end(), part.begin(), part.end());
    }
    period_days = l2_days.size();
    for (auto a : {Activity::Holding, Activity::Transaction})
      if (method_covers(*method, a)) always.emplace_back(portfolio.network_id, a);
  } else {
    if (portfolio.network_id != spec.network_id) {
      throw UsageError("portfolio network_id '" + portfolio.network_id + "' matches neither --network '" +
                       spec.network_id + "' nor a layer-2 in --l2");
    }
    auto allocation = allocate_portfolio(ds.days, ds.consensus, portfolio, *method, {spec.network_id, o.workers});
    results = std::move(allocation.results);
    for (auto a : {Activity::Holding, Activity::Transaction})
      if (method_covers(*method, a)) always.emplace_back(spec.network_id, a);
  }

  if (!ds.apps.empty() && method_covers(*method, Activity::Transaction)) {
    std::string approach = o.app_approach;
    if (approach.empty()) approach = *method == Method::Hybrid ? "hybrid" : "transaction";
    if (approach != "hybrid" && approach != "transaction" && approach != "token") {
      throw UsageError("--app-approach must be transaction, token or hybrid");
    }
    for (const auto& app : ds.apps) {
      const NetworkDay* day = find_day(ds.days, app.date);
      const MethodWeights w = method_weights(*day, ds.consensus);
      const Pool pool = app_pool(*day, w, app, *method);
      std::vector<TokenHolding> holdings;
      std::vector<TransactionRecord> txs;
      for (const auto& h : ds.token_holdings)
        if (h.app_id == app.app_id && h.date == app.date) holdings.push_back(h);
      for (const auto& t : ds.app_transactions)
        if (t.app_id == app.app_id && t.tx.date == app.date) txs.push_back(t.tx);
      if (approach == "hybrid") {
        auto part = allocate_app_hybrid(*day, ds.consensus, w, app, pool, holdings, txs);
        results.insert(results.end(), part.begin(), part.end());
      } else if (approach == "transaction") {
        for (const auto& t : txs) results.push_back(allocate_app_transaction(*day, ds.consensus, app, pool, t));
      } else {
        for (const auto& h : holdings) results.push_back(allocate_token_holding(*day, app, pool, h));
      }
    }
  }

  sort_results(results);
  if (!o.carbon)
    for (auto& r : results) r.carbon.reset();
  const PeriodSummary summary = summarize(results, period_days, *method, always);

  const auto format = parse_format(o.format.empty() ? "csv" : o.format);
  if (!format) throw UsageError("--format must be csv, json or text");
  switch (*format) {
    case OutputFormat::Json:
      detail::emit(o, out, write_results_json(results, summary, o.carbon, detail::digits_or(o, 6)));
      break;
    case OutputFormat::Text:
      detail::emit(o, out, write_results_text(results, summary, o.carbon, detail::digits_or(o, 4)));
      break;
    case OutputFormat::Csv: {
      const int digits = detail::digits_or(o, 6);
      const auto results_csv = write_results_csv(results, o.carbon, digits);
      const auto summary_csv = write_summary_csv(summary, o.carbon, digits);
      if (o.out.empty()) {
        out << results_csv << "\n" << summary_csv;
      } else {
        write_file(o.out, results_csv);
        write_file(detail::sibling_path(o.out, ".summary"), summary_csv);
      }
      break;
    }
  }
  return kExitOk;
}

inline int cmd_compare(const Options& o, std::ostream& out) {
  const std::size_t n = std::max<std::size_t>(1, o.networks.size());
  if (o.remote.empty() && o.days_paths.size() != n) {
    throw UsageError("give one --days per --network");
  }
  ComparisonTable table;
  for (std::size_t i = 0; i < n; ++i) {
    const NetworkSpec spec = detail::resolve_spec(o, i);
    const auto days = detail::load_days(o, i, spec);
    table.rows.push_back(compare_network(days, {spec.consensus}, spec.network_id, o.carbon));
  }
  std::optional<EnergyUnit> unit;
  if (!o.unit.empty()) {
    unit = parse_energy_unit(o.unit);
    if (!unit) throw UsageError("--unit must be one of Wh, kWh, MWh, GWh, TWh");
  }
  const auto format = parse_format(o.format.empty() ? "text" : o.format);
  if (!format) throw UsageError("--format must be csv, json or text");
  switch (*format) {
    case OutputFormat::Csv: detail::emit(o, out, write_comparison_csv(table, o.carbon, detail::digits_or(o, 6))); break;
    case OutputFormat::Json: detail::emit(o, out, write_comparison_json(table, o.carbon, detail::digits_or(o, 6))); break;
    case OutputFormat::Text:
      detail::emit(o, out, write_comparison_text(table, o.carbon, unit, detail::digits_or(o, 4)));
      break;
  }
  return kExitOk;
}

inline int cmd_series(const Options& o, std::ostream& out) {
  const NetworkSpec spec = detail::resolve_spec(o, 0);
  const auto days = detail::load_days(o, 0, spec);
  const auto format = parse_format(o.format.empty() ? "csv" : o.format);
  if (!format) throw UsageError("--format must be csv, json or text");
  const auto series = weight_series(days, {spec.consensus});
  if (*format == OutputFormat::Json) {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& [d, w] : series) {
      j.push_back({{"date", d.to_string()}, {"transaction_weight", w.value().format_significant(detail::digits_or(o, 6))}});
    }
    detail::emit(o, out, j.dump(2) + "\n");
  } else {
    detail::emit(o, out, write_series_csv(series, detail::digits_or(o, 6)));
  }
  return kExitOk;
}

/// Parses `args` (without the program name) and runs the subcommand.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Allocate blockchain electricity and carbon to holdings and transactions", "carbon-ledger"};
  app.require_subcommand(1);
  Options o;

  const auto common = [&](CLI::App* sub) {
    sub->add_option("--days", o.days_paths, "Network telemetry CSV (repeat for compare)");
    sub->add_option("--network", o.networks, "Network id (repeat for compare)");
    sub->add_option("--consensus", o.consensus, "pow or pos; defaults for known networks");
    sub->add_option("--coin-decimals", o.coin_decimals, "Smallest denomination as decimal places");
    sub->add_option("--from", o.from, "First day, YYYY-MM-DD");
    sub->add_option("--to", o.to, "Last day, YYYY-MM-DD");
    sub->add_option("--remote", o.remote, "Fetch days from this index base URL");
    sub->add_option("--cache-dir", o.cache_dir, "Cache directory for --remote");
    sub->add_option("--fill", o.fill, "Synthesize missing days")->check(CLI::IsMember({"forward"}));
    sub->add_option("--format", o.format, "csv, json or text");
    sub->add_option("--out", o.out, "Write output to this file");
    sub->add_option("--digits", o.digits, "Significant digits for display values");
  };

  auto* validate = app.add_subcommand("validate", "Validate input files");
  common(validate);
  validate->add_option("--portfolio", o.portfolio_path, "Portfolio JSON");
  validate->add_option("--apps", o.apps_path, "Applications JSON");
  validate->add_option("--l2", o.l2_path, "Layer-2 JSON");

  auto* allocate = app.add_subcommand("allocate", "Allocate a portfolio");
  common(allocate);
  allocate->add_option("--portfolio", o.portfolio_path, "Portfolio JSON");
  allocate->add_option("--apps", o.apps_path, "Applications JSON");
  allocate->add_option("--l2", o.l2_path, "Layer-2 JSON");
  allocate->add_option("--method", o.method, "holding, transaction or hybrid");
  allocate->add_option("--app-approach", o.app_approach, "transaction, token or hybrid");
  allocate->add_flag("--carbon", o.carbon, "Convert to gCO2e where emission factors exist");
  allocate->add_option("--workers", o.workers, "Threads for per-day evaluation");

  auto* compare = app.add_subcommand("compare", "Method comparison table");
  common(compare);
  compare->add_flag("--carbon", o.carbon, "Add carbon columns");
  compare->add_option("--unit", o.unit, "Fixed display unit for text output");

  auto* series = app.add_subcommand("series", "Per-day transaction weight series");
  common(series);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "carbon-ledger: " << e.what() << "\n";
    return kExitIo;
  }

  try {
    if (validate->parsed()) return cmd_validate(o, out);
    if (allocate->parsed()) return cmd_allocate(o, out);
    if (compare->parsed()) return cmd_compare(o, out);
    return cmd_series(o, out);
  } catch (const ValidationError& e) {
    for (const auto& i : e.issues()) err << i.describe() << "\n";
    return kExitInvalid;
  } catch (const AllocationError& e) {
    err << "carbon-ledger: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const RemoteError& e) {
    err << "carbon-ledger: " << e.what() << "\n";
    return e.kind() == RemoteErrorKind::Unreachable ? kExitIo : kExitInvalid;
  } catch (const IoError& e) {
    err << "carbon-ledger: " << e.what() << "\n";
    return kExitIo;
  } catch (const UsageError& e) {
    err << "carbon-ledger: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "carbon-ledger: " << e.what() << "\n";
    return kExitIo;
  }
}

}  // namespace carbon_ledger::cli
