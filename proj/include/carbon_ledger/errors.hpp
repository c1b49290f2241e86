#pragma once

/// @file carbon_ledger/errors.hpp
/// @brief Exception hierarchy shared by all modules.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <carbon_ledger/date.hpp>

namespace carbon_ledger {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File missing, unreadable or unwritable.
class IoError : public Error {
 public:
  using Error::Error;
};

enum class AllocationErrorKind {
  MalformedDay,
  MissingColumn,
  ShareOverflow,
  NoTransactions,
  BasisUnavailable,
  MissingDay,
  NotAToken,
  DateMismatch,
  MethodMismatch,
  UnorderedDays,
};

inline std::string_view to_string(AllocationErrorKind k) {
  switch (k) {
    case AllocationErrorKind::MalformedDay: return "MalformedDay";
    case AllocationErrorKind::MissingColumn: return "MissingColumn";
    case AllocationErrorKind::ShareOverflow: return "ShareOverflow";
    case AllocationErrorKind::NoTransactions: return "NoTransactions";
    case AllocationErrorKind::BasisUnavailable: return "BasisUnavailable";
    case AllocationErrorKind::MissingDay: return "MissingDay";
    case AllocationErrorKind::NotAToken: return "NotAToken";
    case AllocationErrorKind::DateMismatch: return "DateMismatch";
    case AllocationErrorKind::MethodMismatch: return "MethodMismatch";
    case AllocationErrorKind::UnorderedDays: return "UnorderedDays";
  }
  return "AllocationError";
}

class AllocationError : public Error {
 public:
  AllocationError(AllocationErrorKind kind, const std::string& what)
      : Error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  AllocationErrorKind kind() const { return kind_; }

 private:
  AllocationErrorKind kind_;
};

/// Portfolio records reference days absent from the dataset.
class MissingDayError : public AllocationError {
 public:
  explicit MissingDayError(std::vector<Date> dates)
      : AllocationError(AllocationErrorKind::MissingDay, describe(dates)), dates_(std::move(dates)) {}

  const std::vector<Date>& dates() const { return dates_; }

 private:
  static std::string describe(const std::vector<Date>& dates) {
    std::string s = "no network data for";
    for (const auto& d : dates) s += " " + d.to_string();
    return s;
  }

  std::vector<Date> dates_;
};

enum class IssueKind { SchemaMismatch, RowInvalid, DuplicateDate };

inline std::string_view to_string(IssueKind k) {
  switch (k) {
    case IssueKind::SchemaMismatch: return "SchemaMismatch";
    case IssueKind::RowInvalid: return "RowInvalid";
    case IssueKind::DuplicateDate: return "DuplicateDate";
  }
  return "RowInvalid";
}

/// One row-addressed validation finding. For CSV input `row` is the 1-based
/// file line (the header is line 1); for JSON it is the 0-based index into
/// the array named by `section`.
struct Issue {
  IssueKind kind = IssueKind::RowInvalid;
  std::string source;
  std::string section;
  std::size_t row = 0;
  std::string column;
  std::string reason;

  std::string describe() const {
    std::string s = source.empty() ? std::string{} : source + ": ";
    if (!section.empty()) s += section + " ";
    s += "row " + std::to_string(row);
    if (!column.empty()) s += ", column '" + column + "'";
    s += ": " + std::string(to_string(kind)) + ": " + reason;
    return s;
  }
};

/// Input failed validation. Carries every finding, not just the first.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<Issue> issues)
      : Error(summarize(issues)), issues_(std::move(issues)) {}

  const std::vector<Issue>& issues() const { return issues_; }

 private:
  static std::string summarize(const std::vector<Issue>& issues) {
    if (issues.empty()) return "validation failed";
    std::string s = std::to_string(issues.size()) + " validation error(s); first: " +
                    issues.front().describe();
    return s;
  }

  std::vector<Issue> issues_;
};

}  // namespace carbon_ledger
