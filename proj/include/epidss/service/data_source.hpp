#pragma once

#include <nlohmann/json.hpp>

#include <chrono>
#include <string>
#include <string_view>

#include "epidss/case_data.hpp"
#include "epidss/error.hpp"

namespace epidss::service {

// Immutable dataset as served; replaced wholesale on ingest/refresh.
struct DatasetSnapshot {
  Dataset dataset;
  std::string source;
  std::string digest;  // sha256 of the normalized CSV
  std::chrono::system_clock::time_point retrieved_at;
};

// Network or file failure; retrying may succeed.
class SourceError : public Error {
 public:
  explicit SourceError(std::string message) : Error(std::move(message)) {}
  bool retryable() const { return true; }
};

// The bytes arrived but do not form a valid dataset.
class DataError : public Error {
 public:
  DataError(std::string message, nlohmann::json detail) : Error(std::move(message)), detail_(std::move(detail)) {}
  const nlohmann::json& detail() const { return detail_; }
  bool retryable() const { return false; }

 private:
  nlohmann::json detail_;
};

std::string sha256_hex(std::string_view bytes);

bool is_remote(std::string_view source);

// Reads the raw bytes of a file path or http(s) URL.
std::string read_source(const std::string& source);

// parse_csv + validate_and_repair, wrapping their errors in DataError.
DatasetSnapshot build_snapshot(std::string_view raw, const std::string& source, const CsvSchema& schema,
                               const RepairPolicy& policy);

DatasetSnapshot fetch_dataset(const std::string& source, const CsvSchema& schema, const RepairPolicy& policy);

}  // namespace epidss::service
