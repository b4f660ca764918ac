#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "outbreak/classifiers.hpp"
#include "outbreak/imputation.hpp"
#include "outbreak/metrics.hpp"
#include "outbreak/panel.hpp"
#include "outbreak/resampling.hpp"
#include "outbreak/scaling.hpp"

// Evaluation harness: stratified cross-validated hyperparameter search on
// the training split, and the imputer-by-classifier benchmark grid over a
// raw dataset with missing cells. Test rows never touch imputer fitting,
// scaler fitting, resampling, or model fitting.

namespace outbreak {

struct CvOptions {
  ScalerKind scaler = ScalerKind::robust;
  std::pair<double, double> quantile_range{0.25, 0.75};
  ResampleKind resample = ResampleKind::none;
  ResampleConfig resample_cfg;
  int threads = 1;
};

struct SpecCvResult {
  ClassifierSpec spec;
  double mean_f1_weighted = 0.0;
  double mean_accuracy = 0.0;
  std::vector<Metrics> fold_metrics;
};

struct GridSearchResult {
  std::size_t best_index = 0;
  ClassifierSpec best_spec;
  double mean_f1_weighted = 0.0;
  double mean_accuracy = 0.0;
  std::vector<SpecCvResult> per_spec;
};

// Picks the spec with the best mean cross-validated weighted F1 (ties:
// higher accuracy, then earlier grid position). Scaling and resampling are
// refit inside every fold.
GridSearchResult grid_search(const std::vector<ClassifierSpec>& grid,
                             const LabeledDataset& train, int folds,
                             std::uint64_t seed, const CvOptions& options = {});

struct BenchmarkOptions {
  double test_fraction = 0.2;
  ScalerKind scaler = ScalerKind::robust;
  std::pair<double, double> quantile_range{0.25, 0.75};
  ResampleKind resample = ResampleKind::smote_tomek;
  ResampleConfig resample_cfg;
  DistanceSpec knn;
  // Leakage-safe default: imputers see the training split only. The flag
  // reproduces whole-dataset fitting for comparison runs.
  bool fit_imputer_on_full_data = false;
  // Comparison mode: impute the whole dataset, resample it, then split.
  bool resample_before_split = false;
  int threads = 1;
  bool measure_time = false;  // leave false for byte-stable reports
};

struct ResultRow {
  std::string imputer;
  std::string classifier;
  ClassifierSpec spec;
  Metrics metrics;
  double seconds = 0.0;
  std::uint64_t seed = 0;
  bool failed = false;
  std::string error;
};

struct ResultsTable {
  std::vector<ResultRow> rows;

  const ResultRow* find(const std::string& imputer,
                        const std::string& classifier) const;
};

// One row per (imputer, spec): split, fit imputer on train, impute both
// sides, fit scaler on train, transform, resample train, fit, score on the
// untouched test split. Failures are recorded in their row, not thrown.
ResultsTable run_benchmark(const LabeledDataset& raw,
                           const std::vector<ImputerKind>& imputers,
                           const std::vector<ClassifierSpec>& specs,
                           const BenchmarkOptions& options,
                           std::uint64_t seed);

}  // namespace outbreak
