#include "epidss/service/data_source.hpp"

#include <httplib.h>
#include <openssl/evp.h>

#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

namespace epidss::service {

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &length) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  std::ostringstream hex;
  hex << std::hex << std::setfill('0');
  for (unsigned int i = 0; i < length; ++i) {
    hex << std::setw(2) << static_cast<int>(digest[i]);
  }
  return hex.str();
}

bool is_remote(std::string_view source) {
  return source.rfind("http://", 0) == 0 || source.rfind("https://", 0) == 0;
}

std::string read_source(const std::string& source) {
  if (source.empty()) {
    throw SourceError("no data source configured");
  }
  if (!is_remote(source)) {
    std::ifstream in(source, std::ios::binary);
    if (!in) {
      throw SourceError("cannot open " + source);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) {
      throw SourceError("read failure on " + source);
    }
    return buffer.str();
  }

  const auto scheme_end = source.find("://") + 3;
  const auto path_start = source.find('/', scheme_end);
  const std::string origin = source.substr(0, path_start);
  const std::string path = path_start == std::string::npos ? "/" : source.substr(path_start);
  httplib::Client client(origin);
  client.set_connection_timeout(5);
  client.set_read_timeout(30);
  client.set_follow_location(true);
  auto response = client.Get(path);
  if (!response) {
    throw SourceError("cannot reach " + source + ": " + httplib::to_string(response.error()));
  }
  if (response->status != 200) {
    throw SourceError("GET " + source + " returned HTTP " + std::to_string(response->status));
  }
  return response->body;
}

DatasetSnapshot build_snapshot(std::string_view raw, const std::string& source, const CsvSchema& schema,
                               const RepairPolicy& policy) {
  DatasetSnapshot snapshot;
  try {
    snapshot.dataset = validate_and_repair(parse_csv(raw, schema), policy);
  } catch (const CsvError& err) {
    static constexpr const char* kinds[] = {"empty_input", "schema", "row"};
    nlohmann::json detail = {{"kind", kinds[static_cast<int>(err.kind())]}};
    if (err.line() > 0) detail["line"] = err.line();
    if (!err.column().empty()) detail["column"] = err.column();
    throw DataError(err.what(), detail);
  } catch (const ValidationError& err) {
    throw DataError(err.what(), {{"kind", "validation"}, {"date", format_iso(err.date())}, {"field", err.field()}});
  }
  snapshot.source = source;
  snapshot.digest = sha256_hex(serialize_csv(snapshot.dataset));
  snapshot.retrieved_at = std::chrono::system_clock::now();
  return snapshot;
}

DatasetSnapshot fetch_dataset(const std::string& source, const CsvSchema& schema, const RepairPolicy& policy) {
  return build_snapshot(read_source(source), source, schema, policy);
}

}  // namespace epidss::service
