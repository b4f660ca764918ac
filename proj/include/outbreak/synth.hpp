#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "outbreak/panel.hpp"

// Synthetic panel generator with planted ground truth, used to validate
// the whole pipeline: features follow per-country latent level and trend
// factors plus idiosyncratic noise, labels are Bernoulli draws from a
// logistic model over the planted informative features, and missingness
// can be injected MCAR or MAR afterwards.

namespace outbreak {

enum class MissingMechanism { mcar, mar };

const char* mechanism_name(MissingMechanism m);
MissingMechanism mechanism_from_name(const std::string& name);

struct SynthConfig {
  int countries = 200;
  int years = 20;
  int features = 143;
  std::vector<std::size_t> informative;  // feature indices carrying signal
  std::vector<double> effects;           // one coefficient per entry above
  double imbalance = 0.1;                // target positive rate, in (0,1)
  double noise_std = 0.5;                // idiosyncratic noise scale
  double missing_rate = 0.0;
  MissingMechanism mechanism = MissingMechanism::mcar;
};

struct GroundTruth {
  std::vector<std::size_t> informative;
  std::vector<double> effects;
  double bias = 0.0;            // calibrated by bisection
  double positive_rate = 0.0;   // realized label mean
  double bayes_accuracy = 0.0;  // mean of max(p, 1-p) over the sample
};

// Generates the panel (fully observed; apply inject_missingness after if
// wanted). Feature j of country i in year t is
//   lu_j * u_i + lv_j * v_i * t_norm + noise_std * eps
// with all latents and loadings standard normal and t_norm in [-1, 1].
// P(label = 1) = sigmoid(sum_j effect_j * x_j + bias), the bias bisected
// so the mean probability hits cfg.imbalance.
std::pair<LabeledDataset, GroundTruth> generate_synthetic_panel(
    const SynthConfig& cfg, std::uint64_t seed);

// Masks cells of a fully observed table. MCAR masks every cell with the
// given probability; MAR masks features 1.. with probability proportional
// to a logistic function of feature 0 (feature 0 stays complete). The
// original values stay in place under the mask so imputation error can be
// measured against them.
PanelTable inject_missingness(const PanelTable& table,
                              MissingMechanism mechanism, double rate,
                              std::uint64_t seed);

}  // namespace outbreak
