// Copyright 2026 The qht Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace qht::cli {

using Json = nlohmann::ordered_json;

enum class Format { kCsv, kJson };

/// One experiment output. Cells are kept as the exact strings written to disk so both
/// formats round-trip without reformatting.
struct Table {
  Json config = Json::object();
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  Json summary = Json::object();

  std::string config_hash() const;
  void add_row(std::vector<std::string> row);
  std::size_t column(const std::string& name) const;  // throws if absent
};

/// 64-bit FNV-1a as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

/// Shortest decimal that round-trips.
std::string fmt(double v);
std::string fmt(long v);
inline std::string fmt(int v) { return fmt(static_cast<long>(v)); }

/// CSV: "# {config, config_hash}", header, rows, "# summary {...}".
/// JSON: one object {config, config_hash, columns, rows, summary}.
void write_table(std::ostream& os, const Table& table, Format format);

/// Accepts either format; checks the stored hash against the config.
Table load_table(std::istream& is);
Table load_table_file(const std::string& path);

}  // namespace qht::cli
