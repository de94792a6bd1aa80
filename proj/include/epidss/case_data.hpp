#pragma once

// Reported case time series: CSV ingestion, validation/repair and the
// derived active-case view.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "epidss/date.hpp"
#include "epidss/error.hpp"

namespace epidss {

struct RegionId {
  std::string code;  // short uppercase token, e.g. "KA"
  std::string name;  // display string

  friend bool operator==(const RegionId&, const RegionId&) = default;
};

struct CaseRecord {
  Date date;
  std::int64_t confirmed = 0;
  std::int64_t recovered = 0;
  std::int64_t deceased = 0;

  friend bool operator==(const CaseRecord&, const CaseRecord&) = default;
};

struct CaseSeries {
  RegionId region;
  std::vector<CaseRecord> records;

  friend bool operator==(const CaseSeries&, const CaseSeries&) = default;
};

struct ActivePoint {
  Date date;
  std::int64_t active = 0;

  friend bool operator==(const ActivePoint&, const ActivePoint&) = default;
};

struct ActiveSeries {
  RegionId region;
  std::vector<ActivePoint> values;
};

// Series of all regions in one file, ordered by region code.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::vector<CaseSeries> series);

  const std::vector<CaseSeries>& series() const { return series_; }
  const CaseSeries* find(std::string_view code) const;
  bool empty() const { return series_.empty(); }
  std::size_t size() const { return series_.size(); }

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::vector<CaseSeries> series_;
};

// Maps the five logical fields onto header names of an input file.
struct CsvSchema {
  std::string date_column = "Date";
  std::string region_column = "State";
  std::string confirmed_column = "Confirmed";
  std::string recovered_column = "Recovered";
  std::string deceased_column = "Deceased";
  // When set, this column carries the display name and `region_column` the code.
  std::optional<std::string> region_name_column;
  DateFormat date_format = DateFormat::automatic;

  // Layout of the covid19india state-level daily file.
  static CsvSchema covid19india() { return {}; }
  // Layout written by serialize_csv.
  static CsvSchema normalized();

  friend bool operator==(const CsvSchema&, const CsvSchema&) = default;
};

class CsvError : public Error {
 public:
  enum class Kind { empty_input, schema, row };

  CsvError(Kind kind, std::string message, std::size_t line = 0, std::string column = {});

  Kind kind() const { return kind_; }
  // 1-based physical line number for row errors, 0 otherwise.
  std::size_t line() const { return line_; }
  const std::string& column() const { return column_; }

 private:
  Kind kind_;
  std::size_t line_;
  std::string column_;
};

class ValidationError : public Error {
 public:
  ValidationError(std::string message, Date date, std::string field);

  Date date() const { return date_; }
  const std::string& field() const { return field_; }

 private:
  Date date_;
  std::string field_;
};

enum class DipPolicy { clamp, reject };

struct RepairPolicy {
  DipPolicy dips = DipPolicy::clamp;
};

std::optional<DipPolicy> dip_policy_from_string(std::string_view name);
std::string to_string(DipPolicy policy);

// Region display name -> covid19india state code ("Karnataka" -> "KA").
// Unknown names fall back to an uppercase alphanumeric token of the name.
RegionId resolve_region(std::string_view cell);

Dataset parse_csv(std::string_view raw, const CsvSchema& schema = CsvSchema::covid19india());

CaseSeries validate_and_repair(const CaseSeries& series, const RepairPolicy& policy = {});
Dataset validate_and_repair(const Dataset& dataset, const RepairPolicy& policy = {});

// Writes the normalized form: ISO dates, one row per (region, date),
// rows ordered by region code then date.
std::string serialize_csv(const Dataset& dataset);

ActiveSeries derive_active(const CaseSeries& series);

// Daily new confirmed cases; the first day reports its cumulative value.
std::vector<std::pair<Date, std::int64_t>> daily_new_confirmed(const CaseSeries& series);

// True when dates are consecutive, cumulatives non-decreasing and
// confirmed >= recovered + deceased everywhere.
bool satisfies_invariants(const CaseSeries& series);

}  // namespace epidss
