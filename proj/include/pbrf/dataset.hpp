#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace pbrf {

// Feature matrix with binary labels in {-1, +1}. Rows with missing values
// are dropped at ingestion; categorical columns are integer-encoded.
struct Dataset {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<double> features;  // row-major, n_rows * n_cols
  std::vector<std::int8_t> labels;
  std::vector<std::string> feature_names;

  double at(std::size_t row, std::size_t col) const {
    return features[row * n_cols + col];
  }
  const double* row(std::size_t r) const { return &features[r * n_cols]; }
};

struct LoadOptions {
  std::string label_column;    // empty -> last column
  std::string positive_label;  // empty -> first distinct label seen
};

struct LoadInfo {
  std::size_t rows_read = 0;
  std::size_t rows_dropped = 0;  // rows with >= 1 missing cell
  std::map<std::string, int> label_map;
  std::vector<bool> categorical;  // per feature column
};

// CSV with header row; comma separated; empty cell or "?" is missing.
// Throws DataError on malformed input, non-binary labels or an empty result.
Dataset load_csv(std::istream& in, const LoadOptions& opts, LoadInfo* info = nullptr);
Dataset load_csv_file(const std::string& path, const LoadOptions& opts,
                      LoadInfo* info = nullptr);

// Materializes the given rows as a new dataset (used for train/test splits).
Dataset subset(const Dataset& data, std::span<const std::int32_t> rows);

}  // namespace pbrf
