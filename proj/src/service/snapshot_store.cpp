#include "epidss/service/snapshot_store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <ctime>
#include <fstream>

namespace epidss::service {

using nlohmann::json;

json to_json(const DecisionSnapshot& s) {
  return {{"seq", s.seq},          {"timestamp", s.timestamp}, {"kind", s.kind},
          {"request", s.request},  {"response", s.response},   {"config", s.config}};
}

DecisionSnapshot snapshot_from_json(const json& j) {
  DecisionSnapshot s;
  s.seq = j.at("seq").get<std::uint64_t>();
  s.timestamp = j.at("timestamp").get<std::string>();
  s.kind = j.at("kind").get<std::string>();
  s.request = j.at("request");
  s.response = j.at("response");
  s.config = j.at("config");
  return s;
}

std::string utc_timestamp_now() {
  const auto now = std::chrono::system_clock::now();
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1,
                tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(ms));
  return buffer;
}

SnapshotStore::SnapshotStore(std::filesystem::path path) : path_(std::move(path)) {
  if (path_.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path_.parent_path(), ec);
  }
  fd_ = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd_ < 0) {
    throw StorageError("cannot open snapshot log " + path_.string() + ": " + std::strerror(errno));
  }
  for (const auto& s : list()) {
    next_seq_ = std::max(next_seq_, s.seq + 1);
  }
}

SnapshotStore::~SnapshotStore() {
  if (fd_ >= 0) {
    ::close(fd_);
  }
}

DecisionSnapshot SnapshotStore::append(std::string kind, json request, json response, json config) {
  std::lock_guard<std::mutex> lock(mutex_);
  DecisionSnapshot s;
  s.seq = next_seq_;
  s.timestamp = utc_timestamp_now();
  s.kind = std::move(kind);
  s.request = std::move(request);
  s.response = std::move(response);
  s.config = std::move(config);

  const std::string line = to_json(s).dump() + "\n";
  std::size_t written = 0;
  while (written < line.size()) {
    const auto n = ::write(fd_, line.data() + written, line.size() - written);
    if (n < 0) {
      if (errno == EINTR) {
        continue;
      }
      throw StorageError("snapshot append failed: " + std::string(std::strerror(errno)));
    }
    written += static_cast<std::size_t>(n);
  }
  if (::fsync(fd_) != 0) {
    throw StorageError("snapshot fsync failed: " + std::string(std::strerror(errno)));
  }
  ++next_seq_;
  return s;
}

std::vector<DecisionSnapshot> SnapshotStore::list() const {
  std::ifstream in(path_);
  std::vector<DecisionSnapshot> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) {
      continue;
    }
    try {
      out.push_back(snapshot_from_json(json::parse(line)));
    } catch (const json::exception& err) {
      throw StorageError(path_.string() + ":" + std::to_string(number) + ": corrupt snapshot record: " + err.what());
    }
  }
  return out;
}

std::optional<DecisionSnapshot> SnapshotStore::find(std::uint64_t seq) const {
  for (auto& s : list()) {
    if (s.seq == seq) {
      return s;
    }
  }
  return std::nullopt;
}

}  // namespace epidss::service
