#include "chokefit/data/csv_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace chokefit::data {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '"' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return out;
}

bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

CsvLoadResult load_csv(const std::filesystem::path& path, const SchemaConfig& schema) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset file: " + path.string());
  std::string line;
  std::size_t line_no = 0;
  std::string header;
  while (std::getline(in, header)) {
    ++line_no;
    if (!trim(header).empty()) break;
  }
  if (trim(header).empty()) throw DataError("dataset file is empty: " + path.string());
  if (header.size() >= 3 && static_cast<unsigned char>(header[0]) == 0xEF) header.erase(0, 3);  // UTF-8 BOM

  const auto names = split_fields(header);
  std::unordered_map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < names.size(); ++i) column.emplace(std::string(names[i]), i);

  const std::array<const std::string*, 7> required = {&schema.p1, &schema.p2, &schema.t1, &schema.u,
                                                      &schema.eta_g, &schema.eta_o, &schema.q_o};
  std::array<std::size_t, 7> idx{};
  for (std::size_t k = 0; k < required.size(); ++k) {
    const auto it = column.find(*required[k]);
    if (it == column.end()) throw SchemaError(*required[k]);
    idx[k] = it->second;
  }
  std::optional<std::size_t> ts_col;
  if (!schema.timestamp.empty()) {
    if (const auto it = column.find(schema.timestamp); it != column.end()) ts_col = it->second;
  }

  CsvLoadResult result;
  result.dataset.provenance = Provenance::ingested;
  std::size_t data_lines = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    ++data_lines;
    const auto fields = split_fields(line);
    if (fields.size() != names.size()) {
      result.issues.push_back({line_no, "expected " + std::to_string(names.size()) + " fields, found " +
                                            std::to_string(fields.size())});
      continue;
    }
    std::array<double, 7> v{};
    bool ok = true;
    for (std::size_t k = 0; k < idx.size() && ok; ++k) {
      if (!parse_double(fields[idx[k]], v[k])) {
        result.issues.push_back({line_no, "cannot parse column '" + *required[k] + "' value '" +
                                              std::string(fields[idx[k]]) + "'"});
        ok = false;
      }
    }
    if (!ok) continue;
    Row row;
    if (ts_col && !fields[*ts_col].empty()) {
      row.timestamp = parse_timestamp(fields[*ts_col]);
      if (!row.timestamp) {
        result.issues.push_back({line_no, "cannot parse timestamp '" + std::string(fields[*ts_col]) + "'"});
        continue;
      }
    }
    row.x.p1 = v[0] * schema.pressure_factor;
    row.x.p2 = v[1] * schema.pressure_factor;
    row.x.t1 = v[2] + schema.temperature_offset;
    row.x.u = v[3] * schema.choke_factor;
    row.x.composition = {v[4], v[5]};
    row.y = v[6] * schema.rate_factor;
    result.dataset.rows.push_back(row);
  }
  if (data_lines > 0 &&
      static_cast<double>(result.issues.size()) > schema.max_bad_row_fraction * static_cast<double>(data_lines)) {
    std::ostringstream os;
    os << "too many unparsable rows in " << path.string() << ": " << result.issues.size() << " of " << data_lines;
    if (!result.issues.empty()) os << " (first: line " << result.issues.front().line << ": " << result.issues.front().message << ")";
    throw DataError(os.str());
  }
  return result;
}

std::string to_csv(const Dataset& ds) {
  const bool with_ts = std::any_of(ds.rows.begin(), ds.rows.end(), [](const Row& r) { return r.timestamp.has_value(); });
  std::ostringstream os;
  if (with_ts) os << "timestamp,";
  os << "p1,p2,t1,u,eta_g,eta_o,q_o\n";
  for (const Row& r : ds.rows) {
    if (with_ts) {
      if (r.timestamp) os << format_timestamp(*r.timestamp);
      os << ',';
    }
    os << format_double(r.x.p1) << ',' << format_double(r.x.p2) << ',' << format_double(r.x.t1) << ','
       << format_double(r.x.u) << ',' << format_double(r.x.composition.eta_g) << ','
       << format_double(r.x.composition.eta_o) << ',' << format_double(r.y) << '\n';
  }
  return os.str();
}

void write_csv(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out << to_csv(ds);
  if (!out) throw DataError("failed writing " + path.string());
}

}  // namespace chokefit::data
