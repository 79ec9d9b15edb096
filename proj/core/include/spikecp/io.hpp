// Copyright 2026 The spikecp Authors.
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

#pragma once

// CSV data files, JSON reports and tables, SVG charts.
//
// CSV rules: UTF-8, comma separator, '.' decimal point, one header row of
// column names, no quoting (names may not contain commas or quotes). Lines
// starting with '#' are metadata and are skipped on input; blank lines are
// skipped too. Numbers are written with 17 significant digits so a
// write/read cycle is exact.

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "spikecp/change_test.hpp"
#include "spikecp/gp_quantile.hpp"
#include "spikecp/seq_spectrum.hpp"
#include "spikecp/sim_lab.hpp"

namespace spikecp {

/// Ordered key/value pairs written as "# key: value" lines.
using Metadata = std::vector<std::pair<std::string, std::string>>;

struct CsvData {
  std::vector<std::string> columns;
  DataMatrix values;
};

/// Parses numeric CSV; ParseError carries the 1-based line and column.
CsvData read_csv(std::istream& in);
CsvData read_csv_file(const std::string& path);

/// Shortest round-trip-safe rendering ("%.17g").
std::string format_double(double value);

void write_metadata(std::ostream& out, const Metadata& meta);

/// Data file with columns xi_1..xi_M, eta_1..eta_p.
void write_data_csv(std::ostream& out, const DataMatrix& data, std::size_t m,
                    const Metadata& meta);

/// Generic table: header then rows of preformatted cells.
void write_table_csv(std::ostream& out, const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows,
                     const Metadata& meta);

void write_power_csv(std::ostream& out, const std::vector<PowerCurve>& curves,
                     const Metadata& meta);
void write_histogram_csv(std::ostream& out, const Histogram& h, const Metadata& meta);
void write_kernel_validation_csv(std::ostream& out,
                                 const std::vector<KernelValidationRow>& rows,
                                 const Metadata& meta);

/// JSON renderings (2-space indent, keys in a fixed order).
std::string to_json(const TestReport& report);
std::string to_json(const QuantileTable& table, bool include_samples,
                    const Metadata& meta = {});
/// Reads a table written by to_json; throws ParseError on malformed input.
QuantileTable quantile_table_from_json(std::string_view text);

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

std::string line_chart_svg(const std::string& title, const std::string& x_label,
                           const std::string& y_label,
                           const std::vector<Series>& series, const Metadata& meta);
std::string bar_chart_svg(const std::string& title, const std::string& x_label,
                          const Histogram& h, const Metadata& meta);

/// Writes `contents` to `path`, creating parent directories.
void write_file(const std::string& path, std::string_view contents);

}  // namespace spikecp
