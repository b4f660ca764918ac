#include "outbreak/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "outbreak/rng.hpp"

namespace outbreak {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

std::string country_code(int i) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "C%03d", i);
  return buf;
}

}  // namespace

const char* mechanism_name(MissingMechanism m) {
  return m == MissingMechanism::mcar ? "mcar" : "mar";
}

MissingMechanism mechanism_from_name(const std::string& name) {
  if (name == "mcar") return MissingMechanism::mcar;
  if (name == "mar") return MissingMechanism::mar;
  throw std::invalid_argument("unknown missingness mechanism: " + name);
}

std::pair<LabeledDataset, GroundTruth> generate_synthetic_panel(
    const SynthConfig& cfg, std::uint64_t seed) {
  if (cfg.countries < 1 || cfg.years < 1 || cfg.features < 1) {
    throw std::invalid_argument("generate_synthetic_panel: bad dimensions");
  }
  if (!(cfg.imbalance > 0.0 && cfg.imbalance < 1.0)) {
    throw std::invalid_argument(
        "generate_synthetic_panel: imbalance must lie in (0, 1)");
  }
  if (cfg.informative.size() != cfg.effects.size()) {
    throw std::invalid_argument(
        "generate_synthetic_panel: informative and effects sizes differ");
  }
  for (std::size_t j : cfg.informative) {
    if (j >= static_cast<std::size_t>(cfg.features)) {
      throw std::invalid_argument(
          "generate_synthetic_panel: informative index out of range");
    }
  }

  const std::size_t n = std::size_t(cfg.countries) * std::size_t(cfg.years);
  const std::size_t d = cfg.features;

  std::vector<RowKey> keys;
  keys.reserve(n);
  for (int i = 0; i < cfg.countries; ++i) {
    for (int t = 0; t < cfg.years; ++t) {
      keys.push_back({country_code(i), 2000 + t});
    }
  }
  std::vector<std::string> names;
  names.reserve(d);
  for (std::size_t j = 0; j < d; ++j) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "f%03zu", j);
    names.emplace_back(buf);
  }

  const rng::CounterStream level_stream(rng::derive(seed, 1));
  const rng::CounterStream trend_stream(rng::derive(seed, 2));
  const rng::CounterStream load_level(rng::derive(seed, 3));
  const rng::CounterStream load_trend(rng::derive(seed, 4));
  const rng::CounterStream noise(rng::derive(seed, 5));
  const rng::CounterStream label_stream(rng::derive(seed, 6));

  std::vector<double> lu(d), lv(d);
  for (std::size_t j = 0; j < d; ++j) {
    lu[j] = load_level.normal_at(j);
    lv[j] = load_trend.normal_at(j);
  }

  LabeledDataset ds;
  ds.table = PanelTable::make(std::move(keys), std::move(names));
  const double half_span = cfg.years > 1 ? (cfg.years - 1) / 2.0 : 1.0;
  std::size_t r = 0;
  for (int i = 0; i < cfg.countries; ++i) {
    const double u = level_stream.normal_at(i);
    const double v = trend_stream.normal_at(i);
    for (int t = 0; t < cfg.years; ++t, ++r) {
      const double t_norm = (t - (cfg.years - 1) / 2.0) / half_span;
      for (std::size_t j = 0; j < d; ++j) {
        ds.table.values(r, j) = lu[j] * u + lv[j] * v * t_norm +
                                cfg.noise_std * noise.normal_at(r * d + j);
      }
    }
  }

  // Raw logistic scores, then bisect the bias until the mean probability
  // matches the target positive rate.
  std::vector<double> scores(n, 0.0);
  for (std::size_t row = 0; row < n; ++row) {
    for (std::size_t j = 0; j < cfg.informative.size(); ++j) {
      scores[row] += cfg.effects[j] * ds.table.values(row, cfg.informative[j]);
    }
  }
  const auto mean_prob = [&](double bias) {
    double sum = 0.0;
    for (double s : scores) sum += sigmoid(s + bias);
    return sum / double(n);
  };
  double lo = -60.0, hi = 60.0;
  if (mean_prob(lo) > cfg.imbalance || mean_prob(hi) < cfg.imbalance) {
    throw std::runtime_error(
        "generate_synthetic_panel: target positive rate unreachable under "
        "the given effects");
  }
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (mean_prob(mid) < cfg.imbalance ? lo : hi) = mid;
  }
  const double bias = 0.5 * (lo + hi);

  GroundTruth truth;
  truth.informative = cfg.informative;
  truth.effects = cfg.effects;
  truth.bias = bias;

  ds.labels.resize(n);
  std::size_t positives = 0;
  double bayes = 0.0;
  for (std::size_t row = 0; row < n; ++row) {
    const double p = sigmoid(scores[row] + bias);
    ds.labels[row] = label_stream.uniform_at(row) < p ? 1 : 0;
    positives += ds.labels[row];
    bayes += std::max(p, 1.0 - p);
  }
  truth.positive_rate = double(positives) / double(n);
  truth.bayes_accuracy = bayes / double(n);
  return {std::move(ds), std::move(truth)};
}

PanelTable inject_missingness(const PanelTable& table,
                              MissingMechanism mechanism, double rate,
                              std::uint64_t seed) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw std::invalid_argument("inject_missingness: rate must lie in [0, 1)");
  }
  if (!table.fully_observed()) {
    throw std::invalid_argument(
        "inject_missingness: table must start fully observed");
  }
  if (rate == 0.0) return table;

  const std::size_t n = table.rows();
  const std::size_t d = table.cols();
  const rng::CounterStream stream(rng::derive(seed, 7));

  PanelTable out = table;
  if (mechanism == MissingMechanism::mcar) {
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < d; ++c) {
        if (stream.uniform_at(r * d + c) < rate) {
          out.mask[r * d + c] = 0;  // value retained for error measurement
        }
      }
    }
    return out;
  }

  // MAR: per-row mask probability proportional to sigmoid of standardized
  // feature 0, renormalized so the overall expected rate matches.
  if (d < 2) {
    throw std::invalid_argument(
        "inject_missingness: MAR needs at least two features");
  }
  double mean0 = 0.0;
  for (std::size_t r = 0; r < n; ++r) mean0 += table.values(r, 0);
  mean0 /= double(n);
  double var0 = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const double dv = table.values(r, 0) - mean0;
    var0 += dv * dv;
  }
  const double std0 = std::sqrt(var0 / double(n));
  std::vector<double> weight(n);
  double mean_weight = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const double z = std0 > 0 ? (table.values(r, 0) - mean0) / std0 : 0.0;
    weight[r] = sigmoid(z);
    mean_weight += weight[r];
  }
  mean_weight /= double(n);
  for (std::size_t r = 0; r < n; ++r) {
    const double p = std::min(0.95, rate * weight[r] / mean_weight);
    for (std::size_t c = 1; c < d; ++c) {
      if (stream.uniform_at(r * d + c) < p) {
        out.mask[r * d + c] = 0;
      }
    }
  }
  return out;
}

}  // namespace outbreak
