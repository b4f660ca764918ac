#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <set>
#include <span>
#include <string>
#include <vector>

// Panel data model: a country-year by feature matrix with an explicit
// missingness mask, plus the ETL steps that turn raw CSVs into labeled,
// split datasets. The mask is authoritative everywhere; a masked cell's
// stored value must never reach downstream math.

namespace outbreak {

struct RowKey {
  std::string country_code;
  int year = 0;

  friend bool operator==(const RowKey&, const RowKey&) = default;
  friend auto operator<=>(const RowKey&, const RowKey&) = default;
};

// Dense row-major matrix of doubles.
struct Matrix {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : n_rows(rows), n_cols(cols), data(rows * cols, fill) {}

  double operator()(std::size_t r, std::size_t c) const {
    return data[r * n_cols + c];
  }
  double& operator()(std::size_t r, std::size_t c) {
    return data[r * n_cols + c];
  }
  std::span<const double> row(std::size_t r) const {
    return {data.data() + r * n_cols, n_cols};
  }
  std::span<double> row(std::size_t r) {
    return {data.data() + r * n_cols, n_cols};
  }
};

// A string-valued column carried alongside the numeric block until
// encode_categoricals turns it into numeric columns.
struct CategoricalColumn {
  std::string name;
  std::vector<std::string> values;  // one per row; meaningless where masked
  std::vector<std::uint8_t> mask;   // 1 = observed
};

struct PanelTable {
  std::vector<RowKey> row_keys;
  std::vector<std::string> feature_names;
  Matrix values;
  std::vector<std::uint8_t> mask;  // row-major, 1 = observed
  std::vector<CategoricalColumn> categoricals;

  std::size_t rows() const { return row_keys.size(); }
  std::size_t cols() const { return feature_names.size(); }

  bool observed(std::size_t r, std::size_t c) const {
    return mask[r * cols() + c] != 0;
  }
  double value(std::size_t r, std::size_t c) const { return values(r, c); }

  void set_value(std::size_t r, std::size_t c, double v) {
    values(r, c) = v;
    mask[r * cols() + c] = 1;
  }
  // Marks a cell missing and plants a NaN sentinel.
  void set_missing(std::size_t r, std::size_t c) {
    values(r, c) = std::numeric_limits<double>::quiet_NaN();
    mask[r * cols() + c] = 0;
  }

  bool fully_observed() const;
  std::size_t missing_count() const;

  static PanelTable make(std::vector<RowKey> keys,
                         std::vector<std::string> features);
};

struct LabeledDataset {
  PanelTable table;
  std::vector<int> labels;  // 0/1, one per row

  std::size_t rows() const { return labels.size(); }
};

struct MissingReport {
  std::vector<double> per_feature;  // fraction missing per feature
  std::vector<double> per_row;      // fraction missing per row
  double overall = 0.0;
};

// --- CSV ingestion -------------------------------------------------------

inline const std::set<std::string>& default_missing_tokens() {
  static const std::set<std::string> tokens = {"", "NA", ".."};
  return tokens;
}

// Reads a panel CSV (header: country_code,year,<feature...>). Cells equal
// to a missing token are masked; columns named in categorical_columns are
// kept as strings, everything else must parse as a number.
PanelTable load_panel_csv(
    const std::filesystem::path& path,
    const std::set<std::string>& missing_tokens = default_missing_tokens(),
    const std::set<std::string>& categorical_columns = {});

// Writes a panel CSV; observed numeric cells use the shortest
// representation that parses back to the same double, missing cells are
// written empty.
void write_panel_csv(const PanelTable& table,
                     const std::filesystem::path& path);

// --- Categorical encoding ------------------------------------------------

enum class EncodePolicy { one_hot, ordinal };

// Level maps fitted on one table, applicable to another (unseen levels
// under the ordinal policy are an error at apply time).
struct CategoricalEncoding {
  EncodePolicy policy = EncodePolicy::one_hot;
  std::vector<std::string> column_names;
  std::vector<std::vector<std::string>> levels;  // lexicographic per column
};

CategoricalEncoding fit_categorical_encoding(const PanelTable& table,
                                             EncodePolicy policy);
PanelTable apply_categorical_encoding(const CategoricalEncoding& enc,
                                      const PanelTable& table);

// Fit-and-apply on the same table.
PanelTable encode_categoricals(const PanelTable& table, EncodePolicy policy);

// --- Labels ---------------------------------------------------------------

struct LabelJoinResult {
  LabeledDataset dataset;
  std::size_t skipped_label_rows = 0;  // label keys absent from the panel
};

// Inner-join on (country_code, year); panel rows without a label row get 0
// (absence of an outbreak report means absence of an outbreak), label rows
// without a panel row are skipped and counted.
LabelJoinResult attach_labels(const PanelTable& table,
                              const std::filesystem::path& labels_csv);

void write_labels_csv(const std::vector<RowKey>& keys,
                      const std::vector<int>& labels,
                      const std::filesystem::path& path);

// --- Splitting -------------------------------------------------------------

struct SplitResult {
  LabeledDataset train;
  LabeledDataset test;
};

// Stratified split: |test| = round(fraction * n), per-class test counts
// within one example of exact proportionality (largest-remainder rule),
// deterministic per seed. Both sides keep the original row order.
SplitResult stratified_split(const LabeledDataset& ds, double test_fraction,
                             std::uint64_t seed);

MissingReport missingness_profile(const PanelTable& table);

// Extracts the subset of rows given by indices (in the given order).
LabeledDataset take_rows(const LabeledDataset& ds,
                         const std::vector<std::size_t>& indices);

}  // namespace outbreak
