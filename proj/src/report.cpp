// Copyright 2026 The embmorph Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "embmorph/report.hpp"

#include <cmath>
#include <cstdio>

#include "embmorph/dataset_io.hpp"
#include "embmorph/error.hpp"

namespace embmorph {

namespace {

std::string csv_cell(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string md_cell(const std::string& cell) {
  std::string out;
  for (char c : cell) {
    if (c == '|') out += '\\';
    out += c;
  }
  return out;
}

void append_row(std::string& out, const std::vector<std::string>& cells, ReportFormat format) {
  if (format == ReportFormat::Csv) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += csv_cell(cells[i]);
    }
  } else {
    out += '|';
    for (const std::string& c : cells) out += ' ' + md_cell(c) + " |";
  }
  out += '\n';
}

}  // namespace

std::optional<ReportFormat> parse_report_format(std::string_view text) noexcept {
  if (text == "csv") return ReportFormat::Csv;
  if (text == "markdown" || text == "md") return ReportFormat::Markdown;
  return std::nullopt;
}

std::string format_fixed(double value, int decimals) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  return buf;
}

std::string format_percent(double fraction) { return format_fixed(100.0 * fraction, 2); }

std::string render_report(const ReportTable& table, ReportFormat format) {
  std::string out;
  append_row(out, table.columns, format);
  if (format == ReportFormat::Markdown) {
    out += '|';
    for (std::size_t i = 0; i < table.columns.size(); ++i) out += " --- |";
    out += '\n';
  }
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) {
      throw Error(ErrorCode::InvalidArgument, "report row has " + std::to_string(row.size()) +
                                                  " cells, table has " + std::to_string(table.columns.size()) +
                                                  " columns");
    }
    append_row(out, row, format);
  }
  if (format == ReportFormat::Markdown && !table.rows.empty() && !table.notes.empty()) {
    out += '\n';
    for (const std::string& note : table.notes) out += note + '\n';
  }
  return out;
}

void write_report(const ReportTable& table, ReportFormat format, const std::filesystem::path& destination) {
  write_file_atomic(destination, render_report(table, format));
}

}  // namespace embmorph
