#include "outbreak/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <stdexcept>

#include "outbreak/rng.hpp"

namespace outbreak {

namespace {

// Round-robin deal of the shuffled per-class rows; every fold ends up with
// both classes as long as each class has >= folds examples.
std::vector<std::vector<std::size_t>> stratified_folds(
    const std::vector<int>& labels, int folds, std::uint64_t seed) {
  std::vector<std::vector<std::size_t>> out(folds);
  for (int cls = 0; cls < 2; ++cls) {
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < labels.size(); ++r) {
      if (labels[r] == cls) rows.push_back(r);
    }
    if (rows.size() < static_cast<std::size_t>(folds)) {
      throw std::runtime_error(
          "grid_search: class " + std::to_string(cls) + " has " +
          std::to_string(rows.size()) + " examples, fewer than " +
          std::to_string(folds) + " folds");
    }
    rng::SplitMix64 g(rng::derive(seed, 100 + cls));
    rng::shuffle(rows, g);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      out[i % folds].push_back(rows[i]);
    }
  }
  for (auto& fold : out) std::sort(fold.begin(), fold.end());
  return out;
}

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

}  // namespace

GridSearchResult grid_search(const std::vector<ClassifierSpec>& grid,
                             const LabeledDataset& train, int folds,
                             std::uint64_t seed, const CvOptions& options) {
  if (grid.empty()) {
    throw std::invalid_argument("grid_search: empty grid");
  }
  if (folds < 2) {
    throw std::invalid_argument("grid_search: folds must be >= 2");
  }
  const auto fold_rows = stratified_folds(train.labels, folds, seed);

  // Per-fold train/validation datasets are shared across the grid.
  struct Fold {
    LabeledDataset fit;  // scaled and resampled
    Matrix val_rows;
    std::vector<int> val_labels;
  };
  std::vector<Fold> prepared;
  prepared.reserve(folds);
  for (int f = 0; f < folds; ++f) {
    std::vector<std::size_t> tr_idx;
    for (int g = 0; g < folds; ++g) {
      if (g == f) continue;
      tr_idx.insert(tr_idx.end(), fold_rows[g].begin(), fold_rows[g].end());
    }
    std::sort(tr_idx.begin(), tr_idx.end());
    LabeledDataset tr = take_rows(train, tr_idx);
    LabeledDataset val = take_rows(train, fold_rows[f]);

    const ScalerParams params =
        fit_scaler(tr.table, options.scaler, options.quantile_range);
    tr.table = apply_scaler(params, tr.table);
    val.table = apply_scaler(params, val.table);
    tr = resample(options.resample, tr, options.resample_cfg,
                  rng::derive(seed, 200 + f));
    prepared.push_back(
        {std::move(tr), std::move(val.table.values), std::move(val.labels)});
  }

  GridSearchResult result;
  result.per_spec.reserve(grid.size());
  for (std::size_t s = 0; s < grid.size(); ++s) {
    SpecCvResult cv;
    cv.spec = grid[s];
    for (int f = 0; f < folds; ++f) {
      const auto model =
          fit_classifier(prepared[f].fit, grid[s],
                         rng::derive(seed, 300 + s * folds + f),
                         options.threads);
      const auto pred = predict(model, prepared[f].val_rows);
      const Metrics m = compute_metrics(prepared[f].val_labels, pred);
      cv.mean_f1_weighted += m.f1_weighted;
      cv.mean_accuracy += m.accuracy;
      cv.fold_metrics.push_back(m);
    }
    cv.mean_f1_weighted /= double(folds);
    cv.mean_accuracy /= double(folds);
    result.per_spec.push_back(std::move(cv));
  }

  result.best_index = 0;
  for (std::size_t s = 1; s < grid.size(); ++s) {
    const auto& cur = result.per_spec[s];
    const auto& best = result.per_spec[result.best_index];
    if (cur.mean_f1_weighted > best.mean_f1_weighted ||
        (cur.mean_f1_weighted == best.mean_f1_weighted &&
         cur.mean_accuracy > best.mean_accuracy)) {
      result.best_index = s;
    }
  }
  result.best_spec = result.per_spec[result.best_index].spec;
  result.mean_f1_weighted = result.per_spec[result.best_index].mean_f1_weighted;
  result.mean_accuracy = result.per_spec[result.best_index].mean_accuracy;
  return result;
}

const ResultRow* ResultsTable::find(const std::string& imputer,
                                    const std::string& classifier) const {
  for (const auto& row : rows) {
    if (row.imputer == imputer && row.classifier == classifier) return &row;
  }
  return nullptr;
}

ResultsTable run_benchmark(const LabeledDataset& raw,
                           const std::vector<ImputerKind>& imputers,
                           const std::vector<ClassifierSpec>& specs,
                           const BenchmarkOptions& options,
                           std::uint64_t seed) {
  ResultsTable table;

  for (std::size_t im = 0; im < imputers.size(); ++im) {
    const ImputerKind kind = imputers[im];
    LabeledDataset train, test;
    bool stage_ok = true;
    std::string stage_error;

    try {
      if (options.resample_before_split) {
        // Comparison mode only: impute and resample the whole dataset,
        // then split; synthetic rows may land in the test side.
        const auto model = fit_imputer(kind, raw.table, options.knn);
        LabeledDataset whole = raw;
        whole.table = impute(model, raw.table, rng::derive(seed, 10 + im),
                             options.threads);
        whole = resample(options.resample, whole, options.resample_cfg,
                         rng::derive(seed, 40 + im));
        auto split = stratified_split(whole, options.test_fraction, seed);
        const auto params = fit_scaler(split.train.table, options.scaler,
                                       options.quantile_range);
        split.train.table = apply_scaler(params, split.train.table);
        split.test.table = apply_scaler(params, split.test.table);
        train = std::move(split.train);
        test = std::move(split.test);
      } else {
        auto split = stratified_split(raw, options.test_fraction, seed);
        const auto model = fit_imputer(
            kind, options.fit_imputer_on_full_data ? raw.table
                                                   : split.train.table,
            options.knn);
        split.train.table = impute(model, split.train.table,
                                   rng::derive(seed, 10 + im), options.threads);
        split.test.table = impute(model, split.test.table,
                                  rng::derive(seed, 20 + im), options.threads);
        const auto params = fit_scaler(split.train.table, options.scaler,
                                       options.quantile_range);
        split.train.table = apply_scaler(params, split.train.table);
        split.test.table = apply_scaler(params, split.test.table);
        split.train = resample(options.resample, split.train,
                               options.resample_cfg, rng::derive(seed, 40 + im));
        train = std::move(split.train);
        test = std::move(split.test);
      }
    } catch (const std::exception& e) {
      stage_ok = false;
      stage_error = e.what();
    }

    for (std::size_t s = 0; s < specs.size(); ++s) {
      ResultRow row;
      row.imputer = imputer_name(kind);
      row.classifier = specs[s].name();
      row.spec = specs[s];
      row.seed = seed;
      if (!stage_ok) {
        row.failed = true;
        row.error = stage_error;
        table.rows.push_back(std::move(row));
        continue;
      }
      const auto start = std::chrono::steady_clock::now();
      try {
        const auto model =
            fit_classifier(train, specs[s],
                           rng::derive(seed, 1000 + im * 131 + s),
                           options.threads);
        const auto pred = predict(model, test.table.values);
        row.metrics = compute_metrics(test.labels, pred);
      } catch (const std::exception& e) {
        row.failed = true;
        row.error = e.what();
      }
      if (options.measure_time) row.seconds = elapsed_seconds(start);
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

}  // namespace outbreak
