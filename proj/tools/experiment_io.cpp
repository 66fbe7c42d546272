// Copyright 2026 The qht Authors
// SPDX-License-Identifier: Apache-2.0
#include "experiment_io.hpp"

#include <charconv>
#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>

#include "qht/common.hpp"

namespace qht::cli {

namespace {

std::string quote_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) throw ConfigError("unterminated quote in CSV line: " + line);
  cells.push_back(cur);
  return cells;
}

void write_row(std::ostream& os, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) os << ',';
    os << quote_cell(cells[i]);
  }
  os << '\n';
}

Table parse_json(const std::string& text) {
  const Json j = Json::parse(text);
  Table t;
  t.config = j.at("config");
  t.columns = j.at("columns").get<std::vector<std::string>>();
  t.rows = j.at("rows").get<std::vector<std::vector<std::string>>>();
  t.summary = j.at("summary");
  if (j.at("config_hash").get<std::string>() != t.config_hash())
    throw ConfigError("config_hash does not match config");
  return t;
}

Table parse_csv(std::istream& is) {
  Table t;
  std::string line;
  if (!std::getline(is, line) || line.rfind("# ", 0) != 0)
    throw ConfigError("missing config header line");
  const Json head = Json::parse(line.substr(2));
  t.config = head.at("config");
  if (head.at("config_hash").get<std::string>() != t.config_hash())
    throw ConfigError("config_hash does not match config");
  if (!std::getline(is, line)) throw ConfigError("missing column header");
  t.columns = split_csv_line(line);
  bool have_summary = false;
  while (std::getline(is, line)) {
    if (line.rfind("# summary ", 0) == 0) {
      t.summary = Json::parse(line.substr(10));
      have_summary = true;
      continue;
    }
    if (have_summary) throw ConfigError("data after summary line");
    auto cells = split_csv_line(line);
    if (cells.size() != t.columns.size())
      throw ConfigError("row has " + std::to_string(cells.size()) + " cells, expected " +
                        std::to_string(t.columns.size()));
    t.rows.push_back(std::move(cells));
  }
  if (!have_summary) throw ConfigError("missing summary line");
  return t;
}

}  // namespace

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string fmt(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string fmt(long v) { return std::to_string(v); }

std::string Table::config_hash() const { return fnv1a_hex(config.dump()); }

void Table::add_row(std::vector<std::string> row) {
  if (row.size() != columns.size()) throw std::logic_error("row width does not match columns");
  rows.push_back(std::move(row));
}

std::size_t Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  throw ConfigError("no column " + name);
}

void write_table(std::ostream& os, const Table& table, Format format) {
  if (format == Format::kJson) {
    Json j;
    j["config"] = table.config;
    j["config_hash"] = table.config_hash();
    j["columns"] = table.columns;
    j["rows"] = table.rows;
    j["summary"] = table.summary;
    os << j.dump(1) << '\n';
    return;
  }
  Json head;
  head["config"] = table.config;
  head["config_hash"] = table.config_hash();
  os << "# " << head.dump() << '\n';
  write_row(os, table.columns);
  for (const auto& r : table.rows) write_row(os, r);
  os << "# summary " << table.summary.dump() << '\n';
}

Table load_table(std::istream& is) {
  const std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return parse_json(text);
  std::istringstream ss(text);
  return parse_csv(ss);
}

Table load_table_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  return load_table(in);
}

}  // namespace qht::cli
