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

#include "spikecp/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "spikecp/errors.hpp"

namespace spikecp {

using Json = nlohmann::ordered_json;

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

// Splits on commas, recording the 1-based column where each field starts.
std::vector<std::pair<std::string_view, std::size_t>> split(std::string_view line) {
  std::vector<std::pair<std::string_view, std::size_t>> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    const std::size_t end = comma == std::string_view::npos ? line.size() : comma;
    out.emplace_back(line.substr(start, end - start), start + 1);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

[[noreturn]] void fail(std::size_t line, std::size_t column, const std::string& msg) {
  std::ostringstream os;
  os << "line " << line << ", column " << column << ": " << msg;
  throw ParseError(line, column, os.str());
}

}  // namespace

CsvData read_csv(std::istream& in) {
  CsvData out;
  std::vector<double> values;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (line_no == 1 && view.substr(0, 3) == "\xEF\xBB\xBF") view.remove_prefix(3);
    if (trim(view).empty() || trim(view).front() == '#') continue;
    const auto fields = split(view);
    if (!have_header) {
      for (const auto& [f, col] : fields) {
        const auto name = trim(f);
        if (name.empty()) fail(line_no, col, "empty column name in header");
        if (name.find('"') != std::string_view::npos)
          fail(line_no, col, "quoted column names are not supported");
        out.columns.emplace_back(name);
      }
      have_header = true;
      continue;
    }
    if (fields.size() != out.columns.size()) {
      std::ostringstream os;
      os << "row " << rows + 1 << " has " << fields.size() << " fields, header has "
         << out.columns.size();
      fail(line_no, fields.size() < out.columns.size() ? view.size() + 1
                                                       : fields[out.columns.size()].second,
           os.str());
    }
    for (const auto& [f, col] : fields) {
      const auto text = trim(f);
      double v = 0.0;
      const char* begin = text.data();
      const char* end = text.data() + text.size();
      if (!text.empty() && *begin == '+') ++begin;
      const auto res = std::from_chars(begin, end, v);
      if (text.empty() || res.ec != std::errc() || res.ptr != end) {
        std::ostringstream os;
        os << "row " << rows + 1 << ": '" << text << "' is not a number";
        fail(line_no, col, os.str());
      }
      if (!std::isfinite(v)) {
        std::ostringstream os;
        os << "row " << rows + 1 << ": non-finite value '" << text << "'";
        fail(line_no, col, os.str());
      }
      values.push_back(v);
    }
    ++rows;
  }
  if (!have_header) fail(line_no, 0, "no header row");
  if (rows == 0) fail(line_no, 0, "no data rows");
  const auto cols = static_cast<Eigen::Index>(out.columns.size());
  out.values = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                              Eigen::RowMajor>>(
      values.data(), static_cast<Eigen::Index>(rows), cols);
  return out;
}

CsvData read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(0, 0, "cannot open '" + path + "'");
  try {
    return read_csv(in);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), e.column(), path + ": " + e.what());
  }
}

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_metadata(std::ostream& out, const Metadata& meta) {
  for (const auto& [k, v] : meta) out << "# " << k << ": " << v << '\n';
}

void write_data_csv(std::ostream& out, const DataMatrix& data, std::size_t m,
                    const Metadata& meta) {
  if (static_cast<std::size_t>(data.cols()) < m) throw SpecError("M exceeds data width");
  write_metadata(out, meta);
  const std::size_t d = static_cast<std::size_t>(data.cols());
  for (std::size_t j = 0; j < d; ++j) {
    if (j) out << ',';
    if (j < m)
      out << "xi_" << j + 1;
    else
      out << "eta_" << j - m + 1;
  }
  out << '\n';
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.cols(); ++j) {
      if (j) out << ',';
      out << format_double(data(i, j));
    }
    out << '\n';
  }
}

void write_table_csv(std::ostream& out, const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows,
                     const Metadata& meta) {
  write_metadata(out, meta);
  for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << row[j];
    out << '\n';
  }
}

void write_power_csv(std::ostream& out, const std::vector<PowerCurve>& curves,
                     const Metadata& meta) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& c : curves)
    for (std::size_t i = 0; i < c.deltas.size(); ++i)
      rows.push_back({to_string(c.alternative), format_double(c.deltas[i]),
                      format_double(c.rejection_max[i]), format_double(c.rejection_sum[i]),
                      std::to_string(c.replicates), std::to_string(c.inadmissible)});
  write_table_csv(out,
                  {"alternative", "delta", "rejection_max", "rejection_sum", "replicates",
                   "inadmissible"},
                  rows, meta);
}

void write_histogram_csv(std::ostream& out, const Histogram& h, const Metadata& meta) {
  std::vector<std::vector<std::string>> rows;
  for (std::size_t b = 0; b < h.counts.size(); ++b)
    rows.push_back({format_double(h.edges[b]), format_double(h.edges[b + 1]),
                    std::to_string(h.counts[b])});
  write_table_csv(out, {"lower", "upper", "count"}, rows, meta);
}

void write_kernel_validation_csv(std::ostream& out,
                                 const std::vector<KernelValidationRow>& rows,
                                 const Metadata& meta) {
  std::vector<std::vector<std::string>> cells;
  for (const auto& r : rows)
    cells.push_back({std::to_string(r.k), format_double(r.s), format_double(r.t),
                     format_double(r.empirical), format_double(r.analytic),
                     format_double(r.rel_err)});
  write_table_csv(out, {"k", "s", "t", "empirical", "analytic", "rel_err"}, cells, meta);
}

namespace {

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

std::string to_json(const TestReport& r) {
  Json j;
  j["library_version"] = SPIKECP_VERSION;
  j["mode"] = r.mode;
  j["statistic_max"] = r.statistic_max;
  j["statistic_sum"] = r.statistic_sum;
  j["critical_max"] = r.critical_max;
  j["critical_sum"] = r.critical_sum;
  j["reject_max"] = r.reject_max;
  j["reject_sum"] = r.reject_sum;
  j["level"] = r.level;
  j["argmax_t"] = r.argmax_t;
  j["argmax_spike"] = r.argmax_spike;
  j["argmax_t_sum"] = r.argmax_t_sum;
  j["p_value_max"] = number_or_null(r.p_value_max);
  j["p_value_sum"] = number_or_null(r.p_value_sum);
  j["n"] = r.n;
  j["p"] = r.p;
  j["M"] = r.spikes;
  j["t0"] = r.t0;
  j["alphas"] = r.alphas;
  j["kernel_hash"] = r.kernel_hash;
  j["quantile_replicates"] = r.quantile_replicates;
  j["quantile_seed"] = r.seed;
  j["data_digest"] = r.data_digest;
  if (!r.initial_digest.empty()) j["initial_digest"] = r.initial_digest;
  Json cfg = Json::object();
  for (const auto& [k, v] : r.config) cfg[k] = v;
  j["config"] = cfg;
  return j.dump(2) + "\n";
}

std::string to_json(const QuantileTable& t, bool include_samples, const Metadata& meta) {
  Json j;
  j["format"] = "spikecp-quantile-table";
  j["library_version"] = SPIKECP_VERSION;
  j["process"] = t.process;
  j["levels"] = t.levels;
  j["q_max"] = t.q_max;
  j["q_sum"] = t.q_sum;
  j["replicates"] = t.replicates;
  j["seed"] = t.seed;
  j["kernel_hash"] = t.kernel_hash;
  j["t0"] = t.t0;
  j["grid_points"] = t.grid_points;
  j["spikes"] = t.spikes;
  if (!meta.empty()) {
    Json m = Json::object();
    for (const auto& [k, v] : meta) m[k] = v;
    j["metadata"] = m;
  }
  if (include_samples) {
    j["samples_max"] = t.samples_max;
    j["samples_sum"] = t.samples_sum;
  }
  return j.dump(2) + "\n";
}

QuantileTable quantile_table_from_json(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // byte offset only; report it as column 0 of an unknown line
    throw ParseError(0, 0, std::string("quantile table: ") + e.what());
  }
  QuantileTable t;
  try {
    if (j.value("format", std::string()) != "spikecp-quantile-table")
      throw ParseError(0, 0, "quantile table: missing or wrong 'format' field");
    t.process = j.at("process").get<std::string>();
    t.levels = j.at("levels").get<std::vector<double>>();
    t.q_max = j.at("q_max").get<std::vector<double>>();
    t.q_sum = j.at("q_sum").get<std::vector<double>>();
    t.replicates = j.at("replicates").get<std::size_t>();
    t.seed = j.at("seed").get<std::uint64_t>();
    t.kernel_hash = j.at("kernel_hash").get<std::string>();
    t.t0 = j.at("t0").get<double>();
    t.grid_points = j.at("grid_points").get<std::size_t>();
    t.spikes = j.at("spikes").get<std::size_t>();
    if (j.contains("samples_max")) t.samples_max = j["samples_max"].get<std::vector<double>>();
    if (j.contains("samples_sum")) t.samples_sum = j["samples_sum"].get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, 0, std::string("quantile table: ") + e.what());
  }
  if (t.q_max.size() != t.levels.size() || t.q_sum.size() != t.levels.size())
    throw ParseError(0, 0, "quantile table: level and value lists differ in length");
  if (!std::is_sorted(t.samples_max.begin(), t.samples_max.end()) ||
      !std::is_sorted(t.samples_sum.begin(), t.samples_sum.end()))
    throw ParseError(0, 0, "quantile table: samples must be sorted");
  return t;
}

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 150.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 55.0;
const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

struct Frame {
  double x0, x1, y0, y1;
  double px(double x) const {
    return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight);
  }
  double py(double y) const {
    return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom);
  }
};

void header(std::ostringstream& os, const std::string& title, const Metadata& meta) {
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
     << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  if (!meta.empty()) {
    os << "<metadata>\n";
    for (const auto& [k, v] : meta) os << escape(k) << ": " << escape(v) << '\n';
    os << "</metadata>\n";
  }
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << fmt(kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\" "
     << "font-family=\"sans-serif\" font-size=\"15\">" << escape(title) << "</text>\n";
}

void axes(std::ostringstream& os, const Frame& f, const std::string& xl,
          const std::string& yl) {
  const double left = f.px(f.x0), right = f.px(f.x1);
  const double bottom = f.py(f.y0), top = f.py(f.y1);
  os << "<g stroke=\"black\" fill=\"none\">"
     << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(bottom) << "\" x2=\"" << fmt(right)
     << "\" y2=\"" << fmt(bottom) << "\"/>"
     << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(bottom) << "\" x2=\"" << fmt(left)
     << "\" y2=\"" << fmt(top) << "\"/></g>\n";
  os << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = f.x0 + (f.x1 - f.x0) * i / 4.0;
    const double yv = f.y0 + (f.y1 - f.y0) * i / 4.0;
    os << "<text x=\"" << fmt(f.px(xv)) << "\" y=\"" << fmt(bottom + 16)
       << "\" text-anchor=\"middle\">" << tick(xv) << "</text>"
       << "<text x=\"" << fmt(left - 6) << "\" y=\"" << fmt(f.py(yv) + 4)
       << "\" text-anchor=\"end\">" << tick(yv) << "</text>\n";
  }
  os << "<text x=\"" << fmt((left + right) / 2) << "\" y=\"" << fmt(kHeight - 12)
     << "\" text-anchor=\"middle\">" << escape(xl) << "</text>\n"
     << "<text x=\"16\" y=\"" << fmt((top + bottom) / 2)
     << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << fmt((top + bottom) / 2)
     << ")\">" << escape(yl) << "</text>\n</g>\n";
}

void widen(double& lo, double& hi) {
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
}

}  // namespace

std::string line_chart_svg(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<Series>& series,
                           const Metadata& meta) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0;
  double y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) throw SpecError("series x and y differ in length");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  }
  if (!std::isfinite(x0)) throw SpecError("nothing to plot");
  y0 = std::min(y0, 0.0);
  widen(x0, x1);
  widen(y0, y1);
  const Frame f{x0, x1, y0, y1};
  std::ostringstream os;
  header(os, title, meta);
  axes(os, f, x_label, y_label);
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const char* color = kPalette[i % std::size(kPalette)];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t j = 0; j < s.x.size(); ++j)
      os << (j ? " " : "") << fmt(f.px(s.x[j])) << ',' << fmt(f.py(s.y[j]));
    os << "\"/>\n";
    for (std::size_t j = 0; j < s.x.size(); ++j)
      os << "<circle cx=\"" << fmt(f.px(s.x[j])) << "\" cy=\"" << fmt(f.py(s.y[j]))
         << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    const double ly = kTop + 18.0 * static_cast<double>(i);
    os << "<line x1=\"" << fmt(kWidth - kRight + 12) << "\" y1=\"" << fmt(ly) << "\" x2=\""
       << fmt(kWidth - kRight + 32) << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << color
       << "\" stroke-width=\"2\"/><text x=\"" << fmt(kWidth - kRight + 36) << "\" y=\""
       << fmt(ly + 4) << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape(s.name)
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string bar_chart_svg(const std::string& title, const std::string& x_label,
                          const Histogram& h, const Metadata& meta) {
  if (h.counts.empty() || h.edges.size() != h.counts.size() + 1)
    throw SpecError("malformed histogram");
  double top = 0.0;
  for (auto c : h.counts) top = std::max(top, static_cast<double>(c));
  double x0 = h.edges.front(), x1 = h.edges.back(), y0 = 0.0, y1 = top;
  widen(x0, x1);
  widen(y0, y1);
  const Frame f{x0, x1, y0, y1};
  std::ostringstream os;
  header(os, title, meta);
  axes(os, f, x_label, "count");
  os << "<g fill=\"#1f77b4\" stroke=\"white\">\n";
  for (std::size_t b = 0; b < h.counts.size(); ++b) {
    const double left = f.px(h.edges[b]), right = f.px(h.edges[b + 1]);
    const double yt = f.py(static_cast<double>(h.counts[b]));
    os << "<rect x=\"" << fmt(left) << "\" y=\"" << fmt(yt) << "\" width=\""
       << fmt(right - left) << "\" height=\"" << fmt(f.py(0.0) - yt) << "\"/>\n";
  }
  os << "</g>\n</svg>\n";
  return os.str();
}

void write_file(const std::string& path, std::string_view contents) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << contents;
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace spikecp
