#include "outbreak/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace outbreak {

const char* scaler_name(ScalerKind kind) {
  switch (kind) {
    case ScalerKind::robust: return "robust";
    case ScalerKind::minmax: return "minmax";
    case ScalerKind::standard: return "standard";
    case ScalerKind::logdev: return "logdev";
  }
  return "?";
}

ScalerKind scaler_from_name(const std::string& name) {
  if (name == "robust") return ScalerKind::robust;
  if (name == "minmax") return ScalerKind::minmax;
  if (name == "standard") return ScalerKind::standard;
  if (name == "logdev") return ScalerKind::logdev;
  throw std::invalid_argument("unknown scaler: " + name);
}

double quantile(std::vector<double> data, double q) {
  if (data.empty()) {
    throw std::invalid_argument("quantile of empty data");
  }
  std::sort(data.begin(), data.end());
  const double h = q * double(data.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, data.size() - 1);
  const double frac = h - double(lo);
  return data[lo] + frac * (data[hi] - data[lo]);
}

ScalerParams fit_scaler(const PanelTable& train, ScalerKind kind,
                        std::pair<double, double> quantile_range) {
  if (train.rows() == 0 || train.cols() == 0) {
    throw std::runtime_error("cannot fit scaler on an empty table");
  }
  if (!train.fully_observed()) {
    throw std::runtime_error(
        "scaler fitting requires a fully observed table (impute first)");
  }
  const auto [lo, hi] = quantile_range;
  if (!(lo < hi && lo > 0.0 && hi < 1.0)) {
    throw std::invalid_argument(
        "quantile range must satisfy 0 < lo < hi < 1");
  }

  ScalerParams params;
  params.kind = kind;
  params.quantile_range = quantile_range;
  params.feature_names = train.feature_names;
  params.center.resize(train.cols());
  params.scale.resize(train.cols());

  std::vector<double> column(train.rows());
  for (std::size_t c = 0; c < train.cols(); ++c) {
    for (std::size_t r = 0; r < train.rows(); ++r) {
      column[r] = train.values(r, c);
    }
    double center = 0.0, scale = 0.0;
    switch (kind) {
      case ScalerKind::robust:
      case ScalerKind::logdev:
        center = quantile(column, 0.5);
        scale = quantile(column, hi) - quantile(column, lo);
        break;
      case ScalerKind::minmax: {
        const auto [mn, mx] = std::minmax_element(column.begin(), column.end());
        center = *mn;
        scale = *mx - *mn;
        break;
      }
      case ScalerKind::standard: {
        double mean = 0.0;
        for (double v : column) mean += v;
        mean /= double(column.size());
        double var = 0.0;
        for (double v : column) var += (v - mean) * (v - mean);
        var /= double(column.size());
        center = mean;
        scale = std::sqrt(var);
        break;
      }
    }
    params.center[c] = center;
    params.scale[c] = (scale > 0.0) ? scale : 1.0;
  }
  return params;
}

PanelTable apply_scaler(const ScalerParams& params, const PanelTable& table) {
  if (params.feature_names != table.feature_names) {
    throw std::runtime_error(
        "scaler feature names do not match the table being transformed");
  }
  if (!table.fully_observed()) {
    throw std::runtime_error(
        "scaler transform requires a fully observed table");
  }
  PanelTable out = table;
  for (std::size_t c = 0; c < table.cols(); ++c) {
    const double center = params.center[c];
    const double scale = params.scale[c];
    for (std::size_t r = 0; r < table.rows(); ++r) {
      const double x = table.values(r, c);
      double y = 0.0;
      switch (params.kind) {
        case ScalerKind::robust:
        case ScalerKind::minmax:
        case ScalerKind::standard:
          y = (x - center) / scale;
          break;
        case ScalerKind::logdev: {
          const double dev = x - center;
          const double mag = std::log1p(std::abs(dev) / scale);
          y = (dev < 0.0) ? -mag : mag;
          break;
        }
      }
      out.values(r, c) = y;
    }
  }
  return out;
}

}  // namespace outbreak
