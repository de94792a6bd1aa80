#include "epidss/case_data.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>
#include <utility>

namespace epidss {

namespace {

struct KnownRegion {
  std::string_view code;
  std::string_view name;
};

// covid19india state codes.
constexpr KnownRegion kKnownRegions[] = {
    {"AN", "Andaman and Nicobar Islands"},
    {"AP", "Andhra Pradesh"},
    {"AR", "Arunachal Pradesh"},
    {"AS", "Assam"},
    {"BR", "Bihar"},
    {"CH", "Chandigarh"},
    {"CT", "Chhattisgarh"},
    {"DN", "Dadra and Nagar Haveli and Daman and Diu"},
    {"DL", "Delhi"},
    {"GA", "Goa"},
    {"GJ", "Gujarat"},
    {"HR", "Haryana"},
    {"HP", "Himachal Pradesh"},
    {"JK", "Jammu and Kashmir"},
    {"JH", "Jharkhand"},
    {"KA", "Karnataka"},
    {"KL", "Kerala"},
    {"LA", "Ladakh"},
    {"LD", "Lakshadweep"},
    {"MP", "Madhya Pradesh"},
    {"MH", "Maharashtra"},
    {"MN", "Manipur"},
    {"ML", "Meghalaya"},
    {"MZ", "Mizoram"},
    {"NL", "Nagaland"},
    {"OR", "Odisha"},
    {"PY", "Puducherry"},
    {"PB", "Punjab"},
    {"RJ", "Rajasthan"},
    {"SK", "Sikkim"},
    {"TN", "Tamil Nadu"},
    {"TG", "Telangana"},
    {"TR", "Tripura"},
    {"UP", "Uttar Pradesh"},
    {"UT", "Uttarakhand"},
    {"WB", "West Bengal"},
    {"TT", "India"},
    {"UN", "State Unassigned"},
};

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view trim(std::string_view value) {
  const auto first = value.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = value.find_last_not_of(" \t\r\n");
  return value.substr(first, last - first + 1);
}

struct CsvRow {
  std::size_t line = 0;  // physical line where the record starts
  std::vector<std::string> fields;
};

// RFC 4180 style splitter: quoted fields may hold commas, doubled quotes
// and line breaks. Blank lines are dropped.
std::vector<CsvRow> split_records(std::string_view text) {
  std::vector<CsvRow> rows;
  CsvRow current;
  std::string field;
  bool in_quotes = false;
  bool row_has_content = false;
  std::size_t line = 1;
  current.line = 1;

  auto end_field = [&] {
    current.fields.push_back(std::move(field));
    field.clear();
  };
  auto end_row = [&] {
    end_field();
    if (row_has_content) {
      rows.push_back(std::move(current));
    }
    current = CsvRow{};
    row_has_content = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') {
          ++line;
        }
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        row_has_content = true;
        break;
      case ',':
        row_has_content = true;
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        end_row();
        ++line;
        current.line = line;
        break;
      default:
        if (!std::isspace(static_cast<unsigned char>(c))) {
          row_has_content = true;
        }
        field.push_back(c);
    }
  }
  if (in_quotes) {
    throw CsvError(CsvError::Kind::row, "unterminated quoted field starting on line " +
                                            std::to_string(current.line),
                   current.line);
  }
  end_row();
  return rows;
}

std::int64_t parse_count(std::string_view cell, std::size_t line, const std::string& column) {
  auto text = trim(cell);
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    // Some exports write counts as "1234.0".
    double real = 0.0;
    auto [rptr, rec] = std::from_chars(text.data(), text.data() + text.size(), real);
    if (text.empty() || rec != std::errc() || rptr != text.data() + text.size() ||
        !std::isfinite(real) || real != std::floor(real)) {
      throw CsvError(CsvError::Kind::row,
                     "line " + std::to_string(line) + ": column '" + column +
                         "' is not a whole number: '" + std::string(text) + "'",
                     line, column);
    }
    value = static_cast<std::int64_t>(real);
  }
  if (value < 0) {
    throw CsvError(CsvError::Kind::row,
                   "line " + std::to_string(line) + ": column '" + column + "' is negative",
                   line, column);
  }
  return value;
}

std::string token_from_name(std::string_view name) {
  std::string code;
  for (char c : name) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      code.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    }
  }
  return code;
}

}  // namespace

Dataset::Dataset(std::vector<CaseSeries> series) : series_(std::move(series)) {
  std::sort(series_.begin(), series_.end(),
            [](const CaseSeries& a, const CaseSeries& b) { return a.region.code < b.region.code; });
}

const CaseSeries* Dataset::find(std::string_view code) const {
  auto it = std::lower_bound(series_.begin(), series_.end(), code,
                             [](const CaseSeries& s, std::string_view c) { return s.region.code < c; });
  if (it == series_.end() || it->region.code != code) {
    return nullptr;
  }
  return &*it;
}

CsvSchema CsvSchema::normalized() {
  CsvSchema schema;
  schema.region_column = "Code";
  schema.region_name_column = "Region";
  schema.date_format = DateFormat::iso;
  return schema;
}

CsvError::CsvError(Kind kind, std::string message, std::size_t line, std::string column)
    : Error(std::move(message)), kind_(kind), line_(line), column_(std::move(column)) {}

ValidationError::ValidationError(std::string message, Date date, std::string field)
    : Error(std::move(message)), date_(date), field_(std::move(field)) {}

std::optional<DipPolicy> dip_policy_from_string(std::string_view name) {
  if (name == "clamp") return DipPolicy::clamp;
  if (name == "reject") return DipPolicy::reject;
  return std::nullopt;
}

std::string to_string(DipPolicy policy) { return policy == DipPolicy::clamp ? "clamp" : "reject"; }

RegionId resolve_region(std::string_view cell) {
  auto text = trim(cell);
  const auto key = lower(text);
  for (const auto& known : kKnownRegions) {
    if (lower(known.name) == key || lower(known.code) == key) {
      return {std::string(known.code), std::string(known.name)};
    }
  }
  return {token_from_name(text), std::string(text)};
}

Dataset parse_csv(std::string_view raw, const CsvSchema& schema) {
  if (raw.size() >= 3 && static_cast<unsigned char>(raw[0]) == 0xEF &&
      static_cast<unsigned char>(raw[1]) == 0xBB && static_cast<unsigned char>(raw[2]) == 0xBF) {
    raw.remove_prefix(3);
  }
  auto rows = split_records(raw);
  if (rows.empty()) {
    throw CsvError(CsvError::Kind::empty_input, "input is empty");
  }

  const auto& header = rows.front().fields;
  auto column_index = [&](const std::string& name) -> std::size_t {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (trim(header[i]) == name) {
        return i;
      }
    }
    throw CsvError(CsvError::Kind::schema, "missing column '" + name + "'", 0, name);
  };
  const std::size_t date_col = column_index(schema.date_column);
  const std::size_t region_col = column_index(schema.region_column);
  const std::size_t confirmed_col = column_index(schema.confirmed_column);
  const std::size_t recovered_col = column_index(schema.recovered_column);
  const std::size_t deceased_col = column_index(schema.deceased_column);
  std::optional<std::size_t> name_col;
  if (schema.region_name_column) {
    name_col = column_index(*schema.region_name_column);
  }
  const std::size_t needed =
      std::max({date_col, region_col, confirmed_col, recovered_col, deceased_col, name_col.value_or(0)}) + 1;

  struct Pending {
    RegionId region;
    std::vector<std::pair<CaseRecord, std::size_t>> records;  // record, line
  };
  std::map<std::string, Pending> by_code;

  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.fields.size() < needed) {
      throw CsvError(CsvError::Kind::row,
                     "line " + std::to_string(row.line) + ": expected at least " + std::to_string(needed) +
                         " fields, found " + std::to_string(row.fields.size()),
                     row.line);
    }
    auto date = parse_date(trim(row.fields[date_col]), schema.date_format);
    if (!date) {
      throw CsvError(CsvError::Kind::row,
                     "line " + std::to_string(row.line) + ": unparseable date '" +
                         std::string(trim(row.fields[date_col])) + "'",
                     row.line, schema.date_column);
    }
    RegionId region;
    if (name_col) {
      region.code = std::string(trim(row.fields[region_col]));
      region.name = std::string(trim(row.fields[*name_col]));
    } else {
      region = resolve_region(row.fields[region_col]);
    }
    if (region.code.empty()) {
      throw CsvError(CsvError::Kind::row, "line " + std::to_string(row.line) + ": empty region",
                     row.line, schema.region_column);
    }

    CaseRecord record;
    record.date = *date;
    record.confirmed = parse_count(row.fields[confirmed_col], row.line, schema.confirmed_column);
    record.recovered = parse_count(row.fields[recovered_col], row.line, schema.recovered_column);
    record.deceased = parse_count(row.fields[deceased_col], row.line, schema.deceased_column);

    auto [it, inserted] = by_code.try_emplace(region.code, Pending{region, {}});
    if (!inserted && it->second.region.name != region.name) {
      throw CsvError(CsvError::Kind::row,
                     "line " + std::to_string(row.line) + ": region code '" + region.code +
                         "' already used by '" + it->second.region.name + "'",
                     row.line, schema.region_column);
    }
    it->second.records.emplace_back(record, row.line);
  }

  std::vector<CaseSeries> series;
  series.reserve(by_code.size());
  for (auto& [code, pending] : by_code) {
    auto& recs = pending.records;
    std::stable_sort(recs.begin(), recs.end(),
                     [](const auto& a, const auto& b) { return a.first.date < b.first.date; });
    CaseSeries s{pending.region, {}};
    s.records.reserve(recs.size());
    for (std::size_t i = 0; i < recs.size(); ++i) {
      if (i > 0 && recs[i].first.date == recs[i - 1].first.date) {
        const auto line = std::max(recs[i].second, recs[i - 1].second);
        throw CsvError(CsvError::Kind::row,
                       "line " + std::to_string(line) + ": duplicate date " + format_iso(recs[i].first.date) +
                           " for region " + code,
                       line, schema.date_column);
      }
      s.records.push_back(recs[i].first);
    }
    series.push_back(std::move(s));
  }
  return Dataset(std::move(series));
}

CaseSeries validate_and_repair(const CaseSeries& series, const RepairPolicy& policy) {
  CaseSeries out{series.region, {}};
  if (series.records.empty()) {
    return out;
  }
  out.records.reserve(series.records.size());

  auto fix_field = [&](std::int64_t& value, std::int64_t previous, const char* field, Date date) {
    if (value >= previous) {
      return;
    }
    if (policy.dips == DipPolicy::reject) {
      throw ValidationError(series.region.code + ": " + field + " decreases on " + format_iso(date) + " (" +
                                std::to_string(previous) + " -> " + std::to_string(value) + ")",
                            date, field);
    }
    spdlog::warn("{}: {} decreases on {} ({} -> {}), clamped", series.region.code, field, format_iso(date),
                 previous, value);
    value = previous;
  };

  for (std::size_t i = 0; i < series.records.size(); ++i) {
    CaseRecord record = series.records[i];
    if (!out.records.empty()) {
      const CaseRecord previous = out.records.back();
      if (record.date <= previous.date) {
        throw ValidationError(series.region.code + ": dates not strictly increasing at " +
                                  format_iso(record.date),
                              record.date, "date");
      }
      for (auto day = previous.date + std::chrono::days{1}; day < record.date; day += std::chrono::days{1}) {
        CaseRecord filled = previous;
        filled.date = day;
        out.records.push_back(filled);
      }
      fix_field(record.confirmed, previous.confirmed, "confirmed", record.date);
      fix_field(record.recovered, previous.recovered, "recovered", record.date);
      fix_field(record.deceased, previous.deceased, "deceased", record.date);
    }
    const auto outcomes = record.recovered + record.deceased;
    if (record.confirmed < outcomes) {
      if (policy.dips == DipPolicy::reject) {
        throw ValidationError(series.region.code + ": confirmed below recovered + deceased on " +
                                  format_iso(record.date),
                              record.date, "confirmed");
      }
      spdlog::warn("{}: confirmed {} below recovered + deceased {} on {}, raised", series.region.code,
                   record.confirmed, outcomes, format_iso(record.date));
      record.confirmed = outcomes;
    }
    out.records.push_back(record);
  }
  return out;
}

Dataset validate_and_repair(const Dataset& dataset, const RepairPolicy& policy) {
  std::vector<CaseSeries> repaired;
  repaired.reserve(dataset.size());
  for (const auto& s : dataset.series()) {
    repaired.push_back(validate_and_repair(s, policy));
  }
  return Dataset(std::move(repaired));
}

std::string serialize_csv(const Dataset& dataset) {
  const auto schema = CsvSchema::normalized();
  auto quote = [](const std::string& value) {
    if (value.find_first_of(",\"\n\r") == std::string::npos) {
      return value;
    }
    std::string quoted = "\"";
    for (char c : value) {
      if (c == '"') {
        quoted.push_back('"');
      }
      quoted.push_back(c);
    }
    quoted.push_back('"');
    return quoted;
  };

  std::ostringstream out;
  out << schema.date_column << ',' << schema.region_column << ',' << *schema.region_name_column << ','
      << schema.confirmed_column << ',' << schema.recovered_column << ',' << schema.deceased_column << '\n';
  for (const auto& s : dataset.series()) {
    const auto code = quote(s.region.code);
    const auto name = quote(s.region.name);
    for (const auto& r : s.records) {
      out << format_iso(r.date) << ',' << code << ',' << name << ',' << r.confirmed << ',' << r.recovered << ','
          << r.deceased << '\n';
    }
  }
  return out.str();
}

ActiveSeries derive_active(const CaseSeries& series) {
  ActiveSeries active{series.region, {}};
  active.values.reserve(series.records.size());
  for (const auto& r : series.records) {
    active.values.push_back({r.date, r.confirmed - r.recovered - r.deceased});
  }
  return active;
}

std::vector<std::pair<Date, std::int64_t>> daily_new_confirmed(const CaseSeries& series) {
  std::vector<std::pair<Date, std::int64_t>> out;
  out.reserve(series.records.size());
  std::int64_t previous = 0;
  for (const auto& r : series.records) {
    out.emplace_back(r.date, r.confirmed - previous);
    previous = r.confirmed;
  }
  return out;
}

bool satisfies_invariants(const CaseSeries& series) {
  for (std::size_t i = 0; i < series.records.size(); ++i) {
    const auto& r = series.records[i];
    if (r.confirmed < 0 || r.recovered < 0 || r.deceased < 0 || r.confirmed < r.recovered + r.deceased) {
      return false;
    }
    if (i > 0) {
      const auto& p = series.records[i - 1];
      if (r.date != p.date + std::chrono::days{1} || r.confirmed < p.confirmed || r.recovered < p.recovered ||
          r.deceased < p.deceased) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace epidss
