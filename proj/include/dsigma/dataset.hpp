//
// Copyright 2026 The dsigma Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Dataset loading and saving (CSV, edge lists) and the synthetic
// two-cluster / crescent / shade generator.

#ifndef DSIGMA_DATASET_HPP_
#define DSIGMA_DATASET_HPP_

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <numbers>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "dsigma/errors.hpp"
#include "dsigma/groups.hpp"
#include "dsigma/ldp.hpp"
#include "dsigma/seeding.hpp"

namespace dsigma {

struct Dataset {
  std::vector<std::string> ids;
  std::vector<Category> x;
  AuxInfo aux;
  std::optional<std::vector<double>> privileged;  // t_p
  std::uint32_t label_arity = 2;                  // k

  std::size_t size() const { return x.size(); }
};

inline void validate(const Dataset& d) {
  const std::size_t n = d.size();
  if (n == 0) throw InvalidArgument("dataset is empty");
  if (d.ids.size() != n || d.aux.size() != n)
    throw DimensionError("dataset columns have different lengths");
  if (d.privileged && d.privileged->size() != n)
    throw DimensionError("privileged column has the wrong length");
  if (d.label_arity < 2) throw InvalidArgument("label arity must be >= 2");
  for (Category c : d.x)
    if (c >= d.label_arity)
      throw InvalidArgument("category " + std::to_string(c) + " >= label arity " +
                            std::to_string(d.label_arity));
}

// ---- CSV ----

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> lines;  // 1-based source line of each row

  std::optional<std::size_t> column(std::string_view name) const {
    for (std::size_t c = 0; c < header.size(); ++c)
      if (header[c] == name) return c;
    return std::nullopt;
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.emplace_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline double parse_double(std::string_view s, std::size_t line) {
  double v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v))
    throw ParseError("not a finite number: '" + std::string(s) + "'", line);
  return v;
}

inline std::uint64_t parse_uint(std::string_view s, std::size_t line) {
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty())
    throw ParseError("not a non-negative integer: '" + std::string(s) + "'", line);
  return v;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  return in;
}

}  // namespace detail

// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw InvalidArgument("cannot format number");
  return {buf, p};
}

inline CsvTable read_csv_table(std::istream& in) {
  CsvTable t;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    auto fields = detail::split_csv_line(line);
    if (!have_header) {
      t.header = std::move(fields);
      std::set<std::string> names;
      for (const auto& h : t.header) {
        if (h.empty()) throw ParseError("empty column name in header", lineno);
        if (!names.insert(h).second) throw ParseError("duplicate column '" + h + "'", lineno);
      }
      have_header = true;
      continue;
    }
    if (fields.size() != t.header.size()) {
      throw ParseError("expected " + std::to_string(t.header.size()) + " fields, found " +
                           std::to_string(fields.size()),
                       lineno);
    }
    t.rows.push_back(std::move(fields));
    t.lines.push_back(lineno);
  }
  if (!have_header) throw ParseError("missing header row", 0);
  return t;
}

inline CsvTable read_csv_table(const std::string& path) {
  auto in = detail::open_input(path);
  return read_csv_table(in);
}

struct CsvSchema {
  std::string value_column = "x";
  std::string privileged_column = "t_p";
  // 0 means max(x) + 1 (at least 2).
  std::uint32_t label_arity = 0;
  bool require_points = true;
};

// Columns: id, <value>, t_1..t_d, optional t_p. Extra columns are ignored.
inline Dataset dataset_from_table(const CsvTable& t, const CsvSchema& schema = {}) {
  const auto id_col = t.column("id");
  if (!id_col) throw ParseError("missing 'id' column", 1);
  const auto x_col = t.column(schema.value_column);
  if (!x_col) throw ParseError("missing '" + schema.value_column + "' column", 1);
  std::vector<std::size_t> t_cols;
  for (std::size_t d = 1;; ++d) {
    const auto c = t.column("t_" + std::to_string(d));
    if (!c) break;
    t_cols.push_back(*c);
  }
  if (schema.require_points && t_cols.empty()) throw ParseError("missing 't_1' column", 1);
  const auto p_col = t.column(schema.privileged_column);

  Dataset d;
  PointAux pts;
  std::set<std::string> seen;
  std::uint64_t max_x = 0;
  if (p_col) d.privileged.emplace();
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const std::size_t line = t.lines[r];
    if (row[*id_col].empty()) throw ParseError("empty id", line);
    if (!seen.insert(row[*id_col]).second)
      throw ParseError("duplicate id '" + row[*id_col] + "'", line);
    d.ids.push_back(row[*id_col]);
    const std::uint64_t xv = detail::parse_uint(row[*x_col], line);
    if (xv > UINT32_MAX) throw ParseError("category out of range", line);
    if (schema.label_arity && xv >= schema.label_arity)
      throw ParseError("category " + std::to_string(xv) + " >= label arity " +
                           std::to_string(schema.label_arity),
                       line);
    max_x = std::max(max_x, xv);
    d.x.push_back(static_cast<Category>(xv));
    std::vector<double> p;
    for (std::size_t c : t_cols) p.push_back(detail::parse_double(row[c], line));
    pts.points.push_back(std::move(p));
    if (p_col) d.privileged->push_back(detail::parse_double(row[*p_col], line));
  }
  if (d.x.empty()) throw ParseError("no data rows", 0);
  d.label_arity = schema.label_arity ? schema.label_arity
                                     : std::max<std::uint32_t>(2, static_cast<std::uint32_t>(max_x + 1));
  d.aux.data = std::move(pts);
  return d;
}

inline Dataset load_csv(const std::string& path, const CsvSchema& schema = {}) {
  return dataset_from_table(read_csv_table(path), schema);
}

// Edge list: two 0-based node ids per line; '#' starts a comment.
inline GraphAux read_edge_list(std::istream& in, std::size_t n) {
  std::vector<std::pair<Index, Index>> edges;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ss(line);
    std::string a, b, extra;
    if (!(ss >> a)) continue;
    if (!(ss >> b)) throw ParseError("edge needs two node ids", lineno);
    if (ss >> extra) throw ParseError("edge has more than two fields", lineno);
    const auto u = detail::parse_uint(a, lineno), v = detail::parse_uint(b, lineno);
    if (u >= n || v >= n)
      throw ParseError("node id out of range for n=" + std::to_string(n), lineno);
    if (u == v) throw ParseError("self-loop", lineno);
    edges.emplace_back(static_cast<Index>(u), static_cast<Index>(v));
  }
  return graph_from_edges(n, edges);
}

inline GraphAux load_edge_list(const std::string& path, std::size_t n) {
  auto in = detail::open_input(path);
  return read_edge_list(in, n);
}

// x-CSV (id, x [, t_p]) plus an edge list over row indices.
inline Dataset load_csv_with_graph(const std::string& csv_path, const std::string& edges_path,
                                   CsvSchema schema = {}) {
  schema.require_points = false;
  Dataset d = load_csv(csv_path, schema);
  d.aux.data = load_edge_list(edges_path, d.size());
  return d;
}

inline void write_csv(const Dataset& d, std::ostream& out) {
  validate(d);
  if (d.aux.is_graph()) throw Unsupported("write_csv writes point datasets only");
  const auto& pts = d.aux.points().points;
  const std::size_t dim = pts.front().size();
  out << "id,x";
  for (std::size_t c = 1; c <= dim; ++c) out << ",t_" << c;
  if (d.privileged) out << ",t_p";
  out << '\n';
  for (std::size_t i = 0; i < d.size(); ++i) {
    out << d.ids[i] << ',' << d.x[i];
    for (double v : pts[i]) out << ',' << format_double(v);
    if (d.privileged) out << ',' << format_double((*d.privileged)[i]);
    out << '\n';
  }
}

inline void write_csv(const Dataset& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path);
  write_csv(d, out);
}

// ---- Synthetic data ----

struct SynConfig {
  double cluster_shift = 4.0;  // x offset of the second cluster
  double radius = 1.0;
  double crescent_offset = 0.5;
  double noise = 0.08;
};

namespace detail {

inline double standard_normal(Rng& rng) {
  // Box-Muller on the 53-bit uniform; 1 - u keeps the log argument positive.
  const double u1 = 1.0 - uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace detail

// Eight labels in three levels: label = 4 * cluster + 2 * crescent + shade.
// Each cluster is a pair of interleaved half-annuli; each crescent is split
// into two halves along its arc. Record i gets label i mod 8. The public
// position is 2-D; t_p is the arc coordinate along the generating curve,
// t + pi * crescent + 2 pi * cluster, so nearby t_p means same shade.
inline Dataset generate_syn(std::size_t n, std::uint64_t seed, const SynConfig& cfg = {}) {
  if (n < 8) throw InvalidArgument("generate_syn: n must be >= 8");
  Rng rng = make_rng(seed, "syn");
  Dataset d;
  PointAux pts;
  d.privileged.emplace();
  d.label_arity = 8;
  const double pi = std::numbers::pi;
  for (std::size_t i = 0; i < n; ++i) {
    const auto label = static_cast<Category>(i % 8);
    const unsigned cluster = label >> 2, crescent = (label >> 1) & 1U, shade = label & 1U;
    const double t = 0.5 * pi * (shade + uniform01(rng));
    double px, py;
    if (crescent == 0) {
      px = cfg.radius * std::cos(t);
      py = cfg.radius * std::sin(t);
    } else {
      px = cfg.radius * (1.0 - std::cos(t));
      py = cfg.crescent_offset - cfg.radius * std::sin(t);
    }
    px += cluster * cfg.cluster_shift + cfg.noise * detail::standard_normal(rng);
    py += cfg.noise * detail::standard_normal(rng);
    d.ids.push_back(std::to_string(i));
    d.x.push_back(label);
    pts.points.push_back({px, py});
    d.privileged->push_back(t + pi * crescent + 2.0 * pi * cluster);
  }
  d.aux.data = std::move(pts);
  return d;
}

}  // namespace dsigma

#endif  // DSIGMA_DATASET_HPP_
