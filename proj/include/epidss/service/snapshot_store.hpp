#pragma once

// Append-only decision log: one JSON object per line, fsync'd per append.

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "epidss/error.hpp"

namespace epidss::service {

struct DecisionSnapshot {
  std::uint64_t seq = 0;
  std::string timestamp;  // UTC, ISO-8601 with milliseconds
  std::string kind;       // forecast | allocation | lockdown
  nlohmann::json request;
  nlohmann::json response;  // full envelope as returned
  nlohmann::json config;    // engine config in force, including dataset digest
};

nlohmann::json to_json(const DecisionSnapshot& snapshot);
DecisionSnapshot snapshot_from_json(const nlohmann::json& j);

class StorageError : public Error {
 public:
  using Error::Error;
};

class SnapshotStore {
 public:
  // Opens (creating if needed) the log for appending; throws StorageError.
  explicit SnapshotStore(std::filesystem::path path);
  ~SnapshotStore();

  SnapshotStore(const SnapshotStore&) = delete;
  SnapshotStore& operator=(const SnapshotStore&) = delete;

  // Durable once this returns.
  DecisionSnapshot append(std::string kind, nlohmann::json request, nlohmann::json response,
                          nlohmann::json config);

  std::vector<DecisionSnapshot> list() const;
  std::optional<DecisionSnapshot> find(std::uint64_t seq) const;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  int fd_ = -1;
  std::uint64_t next_seq_ = 1;
  mutable std::mutex mutex_;
};

std::string utc_timestamp_now();

}  // namespace epidss::service
