#pragma once

/// @file carbon_ledger/remote.hpp
/// @brief Client for a remote daily index endpoint, with a local file cache.
///
/// Endpoint: `GET {base_url}/v1/networks/{network_id}/days?from=YYYY-MM-DD&to=YYYY-MM-DD`
/// returning `{"network_id": ..., "days": [{<network CSV columns>}, ...]}`
/// with decimals as strings. Rows are validated exactly like file input.
/// Fetched rows are cached under `cache_dir/<network_id>.json`; a request
/// fully covered by the cache never touches the network.
///
/// Define CARBON_LEDGER_HAS_REMOTE=0 to build without HTTP support; cached
/// ranges are still served.

#include <atomic>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <carbon_ledger/ingest.hpp>

#ifndef CARBON_LEDGER_HAS_REMOTE
#define CARBON_LEDGER_HAS_REMOTE 1
#endif

#if CARBON_LEDGER_HAS_REMOTE
#include <httplib.h>
#endif

namespace carbon_ledger {

enum class RemoteErrorKind { Unreachable, MalformedResponse, RangeUnavailable };

inline std::string_view to_string(RemoteErrorKind k) {
  switch (k) {
    case RemoteErrorKind::Unreachable: return "Unreachable";
    case RemoteErrorKind::MalformedResponse: return "MalformedResponse";
    case RemoteErrorKind::RangeUnavailable: return "RangeUnavailable";
  }
  return "RemoteError";
}

class RemoteError : public Error {
 public:
  RemoteError(RemoteErrorKind kind, const std::string& what)
      : Error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  RemoteErrorKind kind() const { return kind_; }

 private:
  RemoteErrorKind kind_;
};

struct RemoteOptions {
  std::string base_url;
  std::string cache_dir = ".carbon-ledger-cache";
  int timeout_seconds = 10;
};

class RemoteDayClient {
 public:
  RemoteDayClient(RemoteOptions options, NetworkSpec spec)
      : options_(std::move(options)), spec_(std::move(spec)) {}

  /// Days in [from, to]. An empty range (from > to) returns nothing.
  std::vector<NetworkDay> fetch(const Date& from, const Date& to) {
    if (to < from) return {};
    auto cache = load_cache();
    if (!covers(cache, from, to)) {
      auto fresh = request(from, to);
      for (auto& [date, row] : fresh) cache[date] = std::move(row);
      store_cache(cache);
    }
    std::vector<NetworkDay> days;
    for (Date d = from; d <= to; d = d.next()) {
      days.push_back(parse_row(cache.at(d.to_string()), "cache"));
    }
    return days;
  }

  /// Number of HTTP requests issued so far.
  std::size_t fetch_count() const { return fetch_count_.load(); }

  std::filesystem::path cache_path() const {
    return std::filesystem::path(options_.cache_dir) / (spec_.network_id + ".json");
  }

 private:
  using Rows = std::map<std::string, nlohmann::json>;

  static bool covers(const Rows& cache, const Date& from, const Date& to) {
    for (Date d = from; d <= to; d = d.next())
      if (!cache.count(d.to_string())) return false;
    return true;
  }

  NetworkDay parse_row(const nlohmann::json& obj, const std::string& where) const {
    try {
      const detail::JsonRow row(obj, "days", 0);
      const detail::FieldLookup lookup = [&](std::string_view col) -> std::optional<std::string> {
        if (!row.has(col)) return std::nullopt;
        if (col == "date") return row.text(col);
        if (col == "tx_count") return std::to_string(row.count(col));
        return row.decimal_text(col);
      };
      return detail::parse_network_day(lookup, spec_);
    } catch (const detail::FieldError& e) {
      throw RemoteError(RemoteErrorKind::MalformedResponse,
                        where + ": column '" + e.column + "': " + e.reason);
    }
  }

  Rows load_cache() const {
    Rows rows;
    const auto path = cache_path();
    if (!std::filesystem::exists(path)) return rows;
    try {
      const auto j = nlohmann::json::parse(read_file(path.string()));
      for (auto it = j.begin(); it != j.end(); ++it) rows[it.key()] = it.value();
    } catch (const nlohmann::json::exception&) {
      // A corrupt cache is discarded and refetched.
      rows.clear();
    }
    return rows;
  }

  void store_cache(const Rows& rows) const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [date, row] : rows) j[date] = row;
    std::filesystem::create_directories(options_.cache_dir);
    const auto path = cache_path();
    const auto tmp = path.string() + ".tmp";
    write_file(tmp, j.dump(2) + "\n");
    std::filesystem::rename(tmp, path);
  }

  Rows request(const Date& from, const Date& to) {
#if CARBON_LEDGER_HAS_REMOTE
    const auto scheme_end = options_.base_url.find("://");
    const auto path_start = options_.base_url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
    const std::string host = options_.base_url.substr(0, path_start);
    std::string prefix = path_start == std::string::npos ? "" : options_.base_url.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();

    httplib::Client client(host);
    client.set_connection_timeout(options_.timeout_seconds, 0);
    client.set_read_timeout(options_.timeout_seconds, 0);
    const std::string path = prefix + "/v1/networks/" + spec_.network_id + "/days?from=" +
                             from.to_string() + "&to=" + to.to_string();
    ++fetch_count_;
    auto res = client.Get(path);
    if (!res) {
      throw RemoteError(RemoteErrorKind::Unreachable,
                        options_.base_url + ": " + httplib::to_string(res.error()));
    }
    if (res->status == 404) {
      throw RemoteError(RemoteErrorKind::RangeUnavailable,
                        from.to_string() + ".." + to.to_string() + " not served for '" + spec_.network_id + "'");
    }
    if (res->status >= 500) {
      throw RemoteError(RemoteErrorKind::Unreachable, "server returned HTTP " + std::to_string(res->status));
    }
    if (res->status != 200) {
      throw RemoteError(RemoteErrorKind::MalformedResponse, "unexpected HTTP " + std::to_string(res->status));
    }
    return parse_response(res->body, from, to);
#else
    (void)from;
    (void)to;
    ++fetch_count_;
    throw RemoteError(RemoteErrorKind::Unreachable, "built without remote support");
#endif
  }

  Rows parse_response(const std::string& body, const Date& from, const Date& to) const {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
      throw RemoteError(RemoteErrorKind::MalformedResponse, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("days") || !j["days"].is_array()) {
      throw RemoteError(RemoteErrorKind::MalformedResponse, "expected an object with a 'days' array");
    }
    Rows rows;
    const auto& days = j["days"];
    for (std::size_t i = 0; i < days.size(); ++i) {
      const std::string where = "days[" + std::to_string(i) + "]";
      const NetworkDay day = parse_row(days[i], where);
      const auto key = day.date.to_string();
      if (rows.count(key)) throw RemoteError(RemoteErrorKind::MalformedResponse, where + ": duplicate date " + key);
      if (from <= day.date && day.date <= to) rows[key] = days[i];
    }
    std::string missing;
    for (Date d = from; d <= to; d = d.next())
      if (!rows.count(d.to_string())) missing += " " + d.to_string();
    if (!missing.empty()) throw RemoteError(RemoteErrorKind::RangeUnavailable, "response lacks" + missing);
    return rows;
  }

  RemoteOptions options_;
  NetworkSpec spec_;
  std::atomic<std::size_t> fetch_count_{0};
};

inline std::vector<NetworkDay> fetch_remote_days(const RemoteOptions& options, const NetworkSpec& spec,
                                                 const Date& from, const Date& to) {
  RemoteDayClient client(options, spec);
  return client.fetch(from, to);
}

}  // namespace carbon_ledger
