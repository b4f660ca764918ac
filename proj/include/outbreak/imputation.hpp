#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "outbreak/panel.hpp"

// The three imputers: k-nearest-neighbor averaging, stochastic multiple
// regression (per-column OLS plus residual-scaled normal noise), and random
// draws from each column's observed values. Every imputer is fit on
// training data and applied to any table with the same schema; observed
// cells always pass through untouched.

namespace outbreak {

enum class DistanceMetric { euclidean };

struct DistanceSpec {
  DistanceMetric metric = DistanceMetric::euclidean;
  int k = 5;
};

struct MaskedRow {
  std::span<const double> values;
  std::span<const std::uint8_t> mask;
};

inline MaskedRow masked_row(const PanelTable& table, std::size_t r) {
  return {table.values.row(r),
          {table.mask.data() + r * table.cols(), table.cols()}};
}

// Euclidean distance over the coordinates observed in both rows, rescaled
// by sqrt(d / |shared|) so distances stay comparable across overlap sizes.
// Equals the plain euclidean distance when both rows are complete; throws
// when the rows share no observed coordinate.
double partial_euclidean_distance(MaskedRow a, MaskedRow b);

// Replaces each missing cell of target with the unweighted mean of its
// column over the spec.k nearest train rows that observe that column.
// When target and train are the same object, a row is never its own
// neighbor. Throws if a train column is fully missing or a cell has no
// eligible donor row.
PanelTable knn_impute(const PanelTable& train, const PanelTable& target,
                      const DistanceSpec& spec = {}, int threads = 1);

// --- Stochastic multiple regression (MSREG) -------------------------------

struct ColumnRegression {
  std::vector<std::size_t> predictors;  // empty for the mean-model fallback
  std::vector<double> coefficients;     // intercept first
  double sigma = 0.0;                   // residual standard error
  bool ridged = false;                  // singular design, ridge fallback
};

struct RegressionImputerModel {
  std::vector<std::string> feature_names;
  std::vector<double> column_means;      // provisional fill values
  std::vector<std::size_t> fit_order;    // increasing missingness
  std::vector<ColumnRegression> columns; // indexed by column
};

// One OLS sweep per column in increasing-missingness order, predictors
// made complete by a provisional column-mean fill. sigma^2 is
// RSS / (n_obs - p - 1); columns with fewer than p + 2 observed rows fall
// back to an intercept-only model with sigma = sample std.
RegressionImputerModel msreg_fit(const PanelTable& train);

// Missing cell (r, c) becomes coef . predictors + sigma * z with z a fresh
// standard-normal draw addressed by the cell's linear index, so results
// are identical regardless of evaluation order. Columns are imputed in
// fit order and later columns see earlier imputed values.
PanelTable msreg_impute(const RegressionImputerModel& model,
                        const PanelTable& target, std::uint64_t seed);

// --- Random draw imputation ------------------------------------------------

struct RandomImputerModel {
  std::vector<std::string> feature_names;
  std::vector<std::vector<double>> observed;  // per column, train row order
};

RandomImputerModel random_fit(const PanelTable& train);

// Each missing cell draws uniformly (probability 1/n) from its column's
// observed values; seeded per cell like msreg_impute.
PanelTable random_impute(const RandomImputerModel& model,
                         const PanelTable& target, std::uint64_t seed);

// --- Uniform front door -----------------------------------------------------

enum class ImputerKind { knn, msreg, random_draw };

const char* imputer_name(ImputerKind kind);
ImputerKind imputer_from_name(const std::string& name);

struct ImputerModel {
  ImputerKind kind = ImputerKind::knn;
  DistanceSpec knn_spec;
  PanelTable knn_train;
  RegressionImputerModel regression;
  RandomImputerModel random;
};

ImputerModel fit_imputer(ImputerKind kind, const PanelTable& train,
                         const DistanceSpec& spec = {});

PanelTable impute(const ImputerModel& model, const PanelTable& target,
                  std::uint64_t seed, int threads = 1);

}  // namespace outbreak
