#include "outbreak/imputation.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "outbreak/parallel.hpp"
#include "outbreak/rng.hpp"

namespace outbreak {

namespace {

void check_no_empty_columns(const PanelTable& train, const char* who) {
  for (std::size_t c = 0; c < train.cols(); ++c) {
    bool any = false;
    for (std::size_t r = 0; r < train.rows(); ++r) {
      if (train.observed(r, c)) {
        any = true;
        break;
      }
    }
    if (!any) {
      throw std::runtime_error(std::string(who) + ": column '" +
                               train.feature_names[c] +
                               "' has no observed values in the training data");
    }
  }
}

void check_schema(const std::vector<std::string>& model_features,
                  const PanelTable& target, const char* who) {
  if (model_features != target.feature_names) {
    throw std::runtime_error(std::string(who) +
                             ": target features do not match the fitted model");
  }
}

std::vector<double> column_means(const PanelTable& table) {
  std::vector<double> means(table.cols(), 0.0);
  for (std::size_t c = 0; c < table.cols(); ++c) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t r = 0; r < table.rows(); ++r) {
      if (table.observed(r, c)) {
        sum += table.values(r, c);
        ++n;
      }
    }
    means[c] = sum / double(n);
  }
  return means;
}

// Missing entries zeroed, plus the mask as doubles: lets the distance loop
// run branch-free over (value, mask) pairs.
struct CleanView {
  std::vector<double> values;
  std::vector<double> mask;

  explicit CleanView(const PanelTable& t)
      : values(t.rows() * t.cols(), 0.0), mask(t.rows() * t.cols(), 0.0) {
    for (std::size_t i = 0; i < t.mask.size(); ++i) {
      if (t.mask[i]) {
        values[i] = t.values.data[i];
        mask[i] = 1.0;
      }
    }
  }
};

}  // namespace

double partial_euclidean_distance(MaskedRow a, MaskedRow b) {
  if (a.values.size() != b.values.size()) {
    throw std::invalid_argument(
        "partial_euclidean_distance: rows differ in length");
  }
  const std::size_t d = a.values.size();
  double sum = 0.0;
  std::size_t shared = 0;
  for (std::size_t i = 0; i < d; ++i) {
    if (a.mask[i] && b.mask[i]) {
      const double diff = a.values[i] - b.values[i];
      sum += diff * diff;
      ++shared;
    }
  }
  if (shared == 0) {
    throw std::runtime_error(
        "partial_euclidean_distance: rows share no observed coordinates");
  }
  return std::sqrt(double(d) / double(shared) * sum);
}

PanelTable knn_impute(const PanelTable& train, const PanelTable& target,
                      const DistanceSpec& spec, int threads) {
  if (spec.k < 1) {
    throw std::invalid_argument("knn_impute: k must be >= 1");
  }
  check_schema(train.feature_names, target, "knn_impute");
  check_no_empty_columns(train, "knn_impute");

  PanelTable out = target;
  if (target.missing_count() == 0) return out;

  const std::size_t d = train.cols();
  const std::size_t n_train = train.rows();
  const bool self = (&train == &target);
  const CleanView tr(train);
  const CleanView tg(target);

  parallel_for(target.rows(), threads, [&](std::size_t r) {
    bool any_missing = false;
    for (std::size_t c = 0; c < d; ++c) {
      if (!target.observed(r, c)) {
        any_missing = true;
        break;
      }
    }
    if (!any_missing) return;

    // One distance pass per target row; donors are then filtered per column.
    const double* qv = tg.values.data() + r * d;
    const double* qm = tg.mask.data() + r * d;
    std::vector<double> dist(n_train);
    for (std::size_t i = 0; i < n_train; ++i) {
      const double* tv = tr.values.data() + i * d;
      const double* tm = tr.mask.data() + i * d;
      double sum = 0.0, shared = 0.0;
      for (std::size_t c = 0; c < d; ++c) {
        const double both = qm[c] * tm[c];
        const double diff = qv[c] - tv[c];
        sum += both * diff * diff;
        shared += both;
      }
      dist[i] = (shared > 0.0 && !(self && i == r))
                    ? std::sqrt(double(d) / shared * sum)
                    : std::numeric_limits<double>::infinity();
    }
    std::vector<std::size_t> order(n_train);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return dist[a] != dist[b] ? dist[a] < dist[b] : a < b;
    });

    for (std::size_t c = 0; c < d; ++c) {
      if (target.observed(r, c)) continue;
      double sum = 0.0;
      int taken = 0;
      for (std::size_t i : order) {
        if (dist[i] == std::numeric_limits<double>::infinity()) break;
        if (!train.observed(i, c)) continue;
        sum += train.values(i, c);
        if (++taken == spec.k) break;
      }
      if (taken == 0) {
        throw std::runtime_error("knn_impute: no eligible neighbor rows for "
                                 "column '" +
                                 train.feature_names[c] + "'");
      }
      out.set_value(r, c, sum / double(taken));
    }
  });
  return out;
}

RegressionImputerModel msreg_fit(const PanelTable& train) {
  if (train.cols() < 2) {
    throw std::runtime_error("msreg_fit: need at least two columns");
  }
  check_no_empty_columns(train, "msreg_fit");

  const std::size_t n = train.rows();
  const std::size_t d = train.cols();

  RegressionImputerModel model;
  model.feature_names = train.feature_names;
  model.column_means = column_means(train);

  std::vector<std::size_t> missing_per_col(d, 0);
  for (std::size_t c = 0; c < d; ++c) {
    for (std::size_t r = 0; r < n; ++r) {
      if (!train.observed(r, c)) ++missing_per_col[c];
    }
  }
  model.fit_order.resize(d);
  std::iota(model.fit_order.begin(), model.fit_order.end(), std::size_t{0});
  std::stable_sort(model.fit_order.begin(), model.fit_order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return missing_per_col[a] < missing_per_col[b];
                   });

  // Provisional mean fill makes every predictor column complete.
  Eigen::MatrixXd filled(n, d);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      filled(r, c) =
          train.observed(r, c) ? train.values(r, c) : model.column_means[c];
    }
  }

  model.columns.resize(d);
  for (std::size_t c = 0; c < d; ++c) {
    ColumnRegression& reg = model.columns[c];
    const std::size_t n_obs = n - missing_per_col[c];
    const std::size_t p = d - 1;

    if (n_obs < p + 2) {
      // Mean model: intercept only, sigma = sample std of observed values.
      reg.coefficients = {model.column_means[c]};
      double ss = 0.0;
      for (std::size_t r = 0; r < n; ++r) {
        if (train.observed(r, c)) {
          const double dv = train.values(r, c) - model.column_means[c];
          ss += dv * dv;
        }
      }
      reg.sigma = n_obs >= 2 ? std::sqrt(ss / double(n_obs - 1)) : 0.0;
      continue;
    }

    reg.predictors.reserve(p);
    for (std::size_t j = 0; j < d; ++j) {
      if (j != c) reg.predictors.push_back(j);
    }

    Eigen::MatrixXd design(n_obs, p + 1);
    Eigen::VectorXd response(n_obs);
    std::size_t row = 0;
    for (std::size_t r = 0; r < n; ++r) {
      if (!train.observed(r, c)) continue;
      design(row, 0) = 1.0;
      for (std::size_t j = 0; j < p; ++j) {
        design(row, j + 1) = filled(r, reg.predictors[j]);
      }
      response(row) = train.values(r, c);
      ++row;
    }

    Eigen::MatrixXd gram = design.transpose() * design;
    Eigen::VectorXd rhs = design.transpose() * response;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    Eigen::VectorXd beta;
    bool ok = ldlt.info() == Eigen::Success && ldlt.rcond() > 1e-12;
    if (ok) {
      beta = ldlt.solve(rhs);
      ok = beta.allFinite();
    }
    if (!ok) {
      // Singular design: ridge with penalty 1e-8 * trace(X'X) / p, the
      // intercept left unpenalized.
      const double lambda =
          1e-8 * (gram.trace() - gram(0, 0)) / double(p);
      Eigen::MatrixXd ridged = gram;
      for (std::size_t j = 1; j <= p; ++j) ridged(j, j) += lambda;
      beta = ridged.ldlt().solve(rhs);
      reg.ridged = true;
    }

    const double rss = (response - design * beta).squaredNorm();
    const double dof = double(n_obs) - double(p) - 1.0;
    reg.sigma = std::sqrt(std::max(0.0, rss / dof));
    reg.coefficients.assign(beta.data(), beta.data() + beta.size());
  }
  return model;
}

PanelTable msreg_impute(const RegressionImputerModel& model,
                        const PanelTable& target, std::uint64_t seed) {
  check_schema(model.feature_names, target, "msreg_impute");
  const std::size_t n = target.rows();
  const std::size_t d = target.cols();
  const rng::CounterStream stream(seed);

  Matrix working = target.values;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      if (!target.observed(r, c)) working(r, c) = model.column_means[c];
    }
  }

  for (std::size_t c : model.fit_order) {
    const ColumnRegression& reg = model.columns[c];
    for (std::size_t r = 0; r < n; ++r) {
      if (target.observed(r, c)) continue;
      double yhat = reg.coefficients[0];
      for (std::size_t j = 0; j < reg.predictors.size(); ++j) {
        yhat += reg.coefficients[j + 1] * working(r, reg.predictors[j]);
      }
      const double z = stream.normal_at(r * d + c);
      working(r, c) = yhat + reg.sigma * z;
    }
  }

  PanelTable out = target;
  out.values = std::move(working);
  std::fill(out.mask.begin(), out.mask.end(), std::uint8_t{1});
  return out;
}

RandomImputerModel random_fit(const PanelTable& train) {
  check_no_empty_columns(train, "random_fit");
  RandomImputerModel model;
  model.feature_names = train.feature_names;
  model.observed.resize(train.cols());
  for (std::size_t c = 0; c < train.cols(); ++c) {
    for (std::size_t r = 0; r < train.rows(); ++r) {
      if (train.observed(r, c)) {
        model.observed[c].push_back(train.values(r, c));
      }
    }
  }
  return model;
}

PanelTable random_impute(const RandomImputerModel& model,
                         const PanelTable& target, std::uint64_t seed) {
  check_schema(model.feature_names, target, "random_impute");
  const std::size_t d = target.cols();
  const rng::CounterStream stream(seed);

  PanelTable out = target;
  for (std::size_t r = 0; r < target.rows(); ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      if (target.observed(r, c)) continue;
      const auto& pool = model.observed[c];
      const auto pick = stream.bounded_at(r * d + c, pool.size());
      out.set_value(r, c, pool[pick]);
    }
  }
  return out;
}

const char* imputer_name(ImputerKind kind) {
  switch (kind) {
    case ImputerKind::knn: return "knn";
    case ImputerKind::msreg: return "msreg";
    case ImputerKind::random_draw: return "random";
  }
  return "?";
}

ImputerKind imputer_from_name(const std::string& name) {
  if (name == "knn") return ImputerKind::knn;
  if (name == "msreg") return ImputerKind::msreg;
  if (name == "random") return ImputerKind::random_draw;
  throw std::invalid_argument("unknown imputer: " + name);
}

ImputerModel fit_imputer(ImputerKind kind, const PanelTable& train,
                         const DistanceSpec& spec) {
  ImputerModel model;
  model.kind = kind;
  switch (kind) {
    case ImputerKind::knn:
      check_no_empty_columns(train, "knn_impute");
      model.knn_spec = spec;
      model.knn_train = train;
      break;
    case ImputerKind::msreg:
      model.regression = msreg_fit(train);
      break;
    case ImputerKind::random_draw:
      model.random = random_fit(train);
      break;
  }
  return model;
}

PanelTable impute(const ImputerModel& model, const PanelTable& target,
                  std::uint64_t seed, int threads) {
  switch (model.kind) {
    case ImputerKind::knn:
      return knn_impute(model.knn_train, target, model.knn_spec, threads);
    case ImputerKind::msreg:
      return msreg_impute(model.regression, target, seed);
    case ImputerKind::random_draw:
      return random_impute(model.random, target, seed);
  }
  throw std::logic_error("impute: bad imputer kind");
}

}  // namespace outbreak
