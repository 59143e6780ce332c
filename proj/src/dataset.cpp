#include "pbrf/dataset.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unordered_map>

#include "pbrf/errors.hpp"

namespace pbrf {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  cells.push_back(cur);
  return cells;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

bool is_missing(const std::string& cell) { return cell.empty() || cell == "?"; }

bool parse_double(const std::string& cell, double* out) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') return false;
  *out = v;
  return true;
}

}  // namespace

Dataset load_csv(std::istream& in, const LoadOptions& opts, LoadInfo* info) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("csv: empty file");
  std::vector<std::string> header = split_line(line);
  for (auto& h : header) h = trim(h);
  const std::size_t n_cols_total = header.size();
  if (n_cols_total < 2) throw DataError("csv: need at least one feature and a label column");

  std::size_t label_idx = n_cols_total - 1;
  if (!opts.label_column.empty()) {
    auto it = std::find(header.begin(), header.end(), opts.label_column);
    if (it == header.end())
      throw DataError("csv: label column '" + opts.label_column + "' not found");
    label_idx = static_cast<std::size_t>(it - header.begin());
  }

  std::vector<std::vector<std::string>> rows;
  std::size_t rows_read = 0, dropped = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> cells = split_line(line);
    if (cells.size() != n_cols_total)
      throw DataError("csv line " + std::to_string(line_no) + ": expected " +
                      std::to_string(n_cols_total) + " cells, got " +
                      std::to_string(cells.size()));
    for (auto& c : cells) c = trim(c);
    ++rows_read;
    if (std::any_of(cells.begin(), cells.end(), is_missing)) {
      ++dropped;
      continue;
    }
    rows.push_back(std::move(cells));
  }
  if (rows.empty()) throw DataError("csv: no complete rows after missing-value filtering");

  // Label mapping: the requested positive label gets +1; exactly two
  // distinct values are allowed.
  std::vector<std::string> distinct;
  for (const auto& r : rows) {
    const std::string& v = r[label_idx];
    if (std::find(distinct.begin(), distinct.end(), v) == distinct.end())
      distinct.push_back(v);
  }
  if (distinct.size() != 2) {
    std::string list;
    for (const auto& v : distinct) list += (list.empty() ? "" : ", ") + v;
    throw DataError("csv: label column must be binary, found {" + list + "}");
  }
  std::string positive = opts.positive_label.empty() ? distinct[0] : opts.positive_label;
  if (positive != distinct[0] && positive != distinct[1])
    throw DataError("csv: positive label '" + positive + "' does not occur (labels: " +
                    distinct[0] + ", " + distinct[1] + ")");

  // Column typing: numeric iff every cell parses as a double.
  const std::size_t n_features = n_cols_total - 1;
  std::vector<std::size_t> feature_cols;
  for (std::size_t c = 0; c < n_cols_total; ++c)
    if (c != label_idx) feature_cols.push_back(c);

  std::vector<bool> categorical(n_features, false);
  for (std::size_t f = 0; f < n_features; ++f) {
    double tmp;
    for (const auto& r : rows) {
      if (!parse_double(r[feature_cols[f]], &tmp)) {
        categorical[f] = true;
        break;
      }
    }
  }

  Dataset ds;
  ds.n_rows = rows.size();
  ds.n_cols = n_features;
  ds.features.resize(ds.n_rows * ds.n_cols);
  ds.labels.resize(ds.n_rows);
  for (std::size_t f = 0; f < n_features; ++f)
    ds.feature_names.push_back(header[feature_cols[f]]);

  // Categorical codes follow first appearance, scanning rows top to bottom.
  std::vector<std::unordered_map<std::string, double>> codes(n_features);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t f = 0; f < n_features; ++f) {
      const std::string& cell = rows[r][feature_cols[f]];
      double v;
      if (categorical[f]) {
        auto [it, inserted] = codes[f].try_emplace(cell, static_cast<double>(codes[f].size()));
        v = it->second;
      } else {
        parse_double(cell, &v);
      }
      ds.features[r * n_features + f] = v;
    }
    ds.labels[r] = rows[r][label_idx] == positive ? 1 : -1;
  }

  if (dropped > 0)
    std::cerr << "warning: dropped " << dropped << " of " << rows_read
              << " rows with missing values\n";

  if (info) {
    info->rows_read = rows_read;
    info->rows_dropped = dropped;
    info->label_map = {{distinct[0], distinct[0] == positive ? 1 : -1},
                       {distinct[1], distinct[1] == positive ? 1 : -1}};
    info->categorical = categorical;
  }
  return ds;
}

Dataset load_csv_file(const std::string& path, const LoadOptions& opts, LoadInfo* info) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset file: " + path);
  return load_csv(in, opts, info);
}

Dataset subset(const Dataset& data, std::span<const std::int32_t> rows) {
  Dataset out;
  out.n_rows = rows.size();
  out.n_cols = data.n_cols;
  out.feature_names = data.feature_names;
  out.features.resize(out.n_rows * out.n_cols);
  out.labels.resize(out.n_rows);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = static_cast<std::size_t>(rows[i]);
    std::copy_n(data.row(r), data.n_cols, &out.features[i * out.n_cols]);
    out.labels[i] = data.labels[r];
  }
  return out;
}

}  // namespace pbrf
