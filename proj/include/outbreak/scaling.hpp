#pragma once

#include <string>
#include <utility>
#include <vector>

#include "outbreak/panel.hpp"

// Feature scaling fitted on training data and applied, unchanged, to
// held-out data. The robust scaler (the paper's choice) centers on the
// median and divides by a configurable quantile range; "logdev" is the
// sign-preserving log of that robust deviation.

namespace outbreak {

enum class ScalerKind { robust, minmax, standard, logdev };

const char* scaler_name(ScalerKind kind);
ScalerKind scaler_from_name(const std::string& name);

struct ScalerParams {
  ScalerKind kind = ScalerKind::robust;
  std::pair<double, double> quantile_range{0.25, 0.75};
  std::vector<std::string> feature_names;
  // robust/logdev: center = median, scale = IQR; minmax: center = min,
  // scale = max - min; standard: center = mean, scale = std (ddof 0).
  // Zero scales are stored as 1 so constant features map to a constant.
  std::vector<double> center;
  std::vector<double> scale;
};

// Linear interpolation between order statistics; data gets sorted.
double quantile(std::vector<double> data, double q);

ScalerParams fit_scaler(const PanelTable& train, ScalerKind kind,
                        std::pair<double, double> quantile_range = {0.25,
                                                                    0.75});

PanelTable apply_scaler(const ScalerParams& params, const PanelTable& table);

}  // namespace outbreak
