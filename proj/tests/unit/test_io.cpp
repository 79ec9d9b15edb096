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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "spikecp/errors.hpp"
#include "spikecp/io.hpp"

namespace spikecp {
namespace {

TEST(Csv, DataRoundTripIsExact) {
  DataMatrix x(3, 3);
  x << 0.1, -1e-300, 1.0 / 3.0, 12345.678901234567, -0.0, 5e300,
      std::nextafter(1.0, 2.0), 2.5, -7.0;
  std::stringstream ss;
  write_data_csv(ss, x, 1, {{"seed", "4"}, {"n", "3"}});
  const CsvData back = read_csv(ss);
  ASSERT_EQ(back.columns.size(), 3u);
  EXPECT_EQ(back.columns[0], "xi_1");
  EXPECT_EQ(back.columns[1], "eta_1");
  EXPECT_EQ(back.columns[2], "eta_2");
  for (Eigen::Index i = 0; i < 3; ++i)
    for (Eigen::Index j = 0; j < 3; ++j) EXPECT_EQ(back.values(i, j), x(i, j));
}

TEST(Csv, SkipsCommentsBlankLinesAndBom) {
  std::istringstream in("\xEF\xBB\xBF# note\nxi_1, eta_1\n\n 1.5 ,+2\n# mid\n3,4e-1\n");
  const CsvData d = read_csv(in);
  ASSERT_EQ(d.values.rows(), 2);
  EXPECT_EQ(d.columns[1], "eta_1");
  EXPECT_DOUBLE_EQ(d.values(0, 0), 1.5);
  EXPECT_DOUBLE_EQ(d.values(0, 1), 2.0);
  EXPECT_DOUBLE_EQ(d.values(1, 1), 0.4);
}

TEST(Csv, BadCellReportsLineColumnAndRow) {
  std::istringstream in("a,b\n1,2\n3,x7\n");
  try {
    read_csv(in);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(e.column(), 3u);
    EXPECT_NE(std::string(e.what()).find("row 2"), std::string::npos);
  }
}

TEST(Csv, RaggedRowsAndNonFiniteRejected) {
  std::istringstream ragged("a,b\n1,2\n3\n");
  EXPECT_THROW(read_csv(ragged), ParseError);
  std::istringstream wide("a,b\n1,2,3\n");
  EXPECT_THROW(read_csv(wide), ParseError);
  std::istringstream nan("a\nnan\n");
  EXPECT_THROW(read_csv(nan), ParseError);
  std::istringstream inf("a\ninf\n");
  EXPECT_THROW(read_csv(inf), ParseError);
  std::istringstream empty("# only a comment\n");
  EXPECT_THROW(read_csv(empty), ParseError);
  std::istringstream header_only("a,b\n");
  EXPECT_THROW(read_csv(header_only), ParseError);
  EXPECT_THROW(read_csv_file("/nonexistent/file.csv"), ParseError);
}

TEST(Csv, FormatDouble) {
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_EQ(std::stod(format_double(0.1)), 0.1);
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Csv, Metadata) {
  std::ostringstream os;
  write_metadata(os, {{"a", "1"}, {"b", "two"}});
  EXPECT_EQ(os.str(), "# a: 1\n# b: two\n");
}

QuantileTable sample_table() {
  QuantileTable t;
  t.levels = {0.9, 0.95};
  t.q_max = {4.5, 6.25};
  t.q_sum = {7.0, 9.125};
  t.replicates = 4;
  t.seed = 11;
  t.kernel_hash = "00ff00ff00ff00ff";
  t.process = "H";
  t.t0 = 0.1;
  t.grid_points = 50;
  t.spikes = 3;
  t.samples_max = {1.0, 2.0, 4.5, 6.25};
  t.samples_sum = {2.0, 3.0, 7.0, 9.125};
  return t;
}

TEST(Json, QuantileTableRoundTrip) {
  const QuantileTable t = sample_table();
  const std::string text = to_json(t, true, {{"tool", "test"}});
  const QuantileTable back = quantile_table_from_json(text);
  EXPECT_EQ(back.levels, t.levels);
  EXPECT_EQ(back.q_max, t.q_max);
  EXPECT_EQ(back.q_sum, t.q_sum);
  EXPECT_EQ(back.replicates, t.replicates);
  EXPECT_EQ(back.seed, t.seed);
  EXPECT_EQ(back.kernel_hash, t.kernel_hash);
  EXPECT_EQ(back.process, t.process);
  EXPECT_EQ(back.t0, t.t0);
  EXPECT_EQ(back.grid_points, t.grid_points);
  EXPECT_EQ(back.spikes, t.spikes);
  EXPECT_EQ(back.samples_max, t.samples_max);
  EXPECT_EQ(to_json(back, true, {{"tool", "test"}}), text);

  const QuantileTable lean = quantile_table_from_json(to_json(t, false));
  EXPECT_TRUE(lean.samples_max.empty());
  EXPECT_TRUE(std::isnan(lean.p_value_max(1.0)));
}

TEST(Json, MalformedTableRejected) {
  EXPECT_THROW(quantile_table_from_json("{"), ParseError);
  EXPECT_THROW(quantile_table_from_json("{\"format\": \"other\"}"), ParseError);
  std::string text = to_json(sample_table(), false);
  text.replace(text.find("spikecp-quantile-table"), 7, "xxxxxxx");
  EXPECT_THROW(quantile_table_from_json(text), ParseError);
}

TEST(Json, ReportHasStableKeys) {
  TestReport r;
  r.mode = "known";
  r.statistic_max = 1.5;
  r.alphas = {10.0, 4.0};
  r.config["seed"] = "3";
  const std::string a = to_json(r);
  EXPECT_EQ(a, to_json(r));
  EXPECT_NE(a.find("\"statistic_max\""), std::string::npos);
  EXPECT_NE(a.find("\"library_version\""), std::string::npos);
  EXPECT_LT(a.find("\"mode\""), a.find("\"statistic_max\""));
}

TEST(Svg, ChartsAreWellFormedAndCarryMetadata) {
  const std::string line =
      line_chart_svg("power", "delta", "rate",
                     {{"max", {0, 1, 2}, {0.05, 0.5, 1.0}}, {"sum", {0, 1, 2}, {0.05, 0.6, 1.0}}},
                     {{"seed", "9"}});
  EXPECT_EQ(line.rfind("<?xml", 0), 0u);
  EXPECT_NE(line.find("<svg"), std::string::npos);
  EXPECT_NE(line.find("</svg>"), std::string::npos);
  EXPECT_NE(line.find("<metadata>"), std::string::npos);
  EXPECT_NE(line.find("seed"), std::string::npos);
  EXPECT_NE(line.find("<polyline"), std::string::npos);

  const Histogram h = make_histogram({1.0, 2.0, 2.5, 3.0}, 3);
  const std::string bars = bar_chart_svg("hist", "log M", h, {});
  EXPECT_NE(bars.find("<svg"), std::string::npos);
  EXPECT_NE(bars.find("<rect"), std::string::npos);
  EXPECT_THROW(line_chart_svg("x", "a", "b", {{"bad", {0, 1}, {0}}}, {}), SpecError);
}

TEST(Files, WriteCreatesDirectories) {
  const auto dir = std::filesystem::temp_directory_path() / "spikecp_io_test" / "nested";
  std::filesystem::remove_all(dir.parent_path());
  write_file((dir / "a.txt").string(), "hello");
  std::ifstream in(dir / "a.txt");
  std::string s;
  std::getline(in, s);
  EXPECT_EQ(s, "hello");
  std::filesystem::remove_all(dir.parent_path());
}

}  // namespace
}  // namespace spikecp
