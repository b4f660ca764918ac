#include "outbreak/resampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "outbreak/rng.hpp"

namespace outbreak {

namespace {

double sq_distance(const PanelTable& t, std::size_t a, std::size_t b) {
  const auto ra = t.values.row(a);
  const auto rb = t.values.row(b);
  double sum = 0.0;
  for (std::size_t c = 0; c < ra.size(); ++c) {
    const double diff = ra[c] - rb[c];
    sum += diff * diff;
  }
  return sum;
}

void require_complete(const LabeledDataset& train, const char* who) {
  if (!train.table.fully_observed()) {
    throw std::runtime_error(std::string(who) +
                             " requires fully observed data (impute first)");
  }
}

// Class with fewer rows is the minority; the outbreak class wins ties.
int minority_class(const std::array<std::size_t, 2>& counts) {
  return counts[1] <= counts[0] ? 1 : 0;
}

std::array<std::size_t, 2> class_counts(const LabeledDataset& ds) {
  std::array<std::size_t, 2> counts{0, 0};
  for (int y : ds.labels) counts[y] += 1;
  return counts;
}

}  // namespace

const char* resample_name(ResampleKind kind) {
  switch (kind) {
    case ResampleKind::none: return "none";
    case ResampleKind::smote: return "smote";
    case ResampleKind::tomek: return "tomek";
    case ResampleKind::smote_tomek: return "smote-tomek";
  }
  return "?";
}

ResampleKind resample_from_name(const std::string& name) {
  if (name == "none") return ResampleKind::none;
  if (name == "smote") return ResampleKind::smote;
  if (name == "tomek") return ResampleKind::tomek;
  if (name == "smote-tomek") return ResampleKind::smote_tomek;
  throw std::invalid_argument("unknown resampling method: " + name);
}

LabeledDataset smote(const LabeledDataset& train, const ResampleConfig& cfg,
                     std::uint64_t seed) {
  if (cfg.smote_k < 1) {
    throw std::invalid_argument("smote: k must be >= 1");
  }
  if (!(cfg.target_ratio > 0.0 && cfg.target_ratio <= 1.0)) {
    throw std::invalid_argument("smote: target_ratio must lie in (0, 1]");
  }
  require_complete(train, "smote");

  const auto counts = class_counts(train);
  const int minority = minority_class(counts);
  const std::size_t n_min = counts[minority];
  const std::size_t n_maj = counts[1 - minority];
  if (n_min < 2) {
    throw std::runtime_error(
        "smote: minority class needs at least two examples to interpolate");
  }

  const auto wanted = static_cast<std::size_t>(
      std::ceil(cfg.target_ratio * double(n_maj)));
  const std::size_t n_new = wanted > n_min ? wanted - n_min : 0;
  if (n_new == 0) return train;

  std::vector<std::size_t> minority_rows;
  for (std::size_t r = 0; r < train.rows(); ++r) {
    if (train.labels[r] == minority) minority_rows.push_back(r);
  }

  // Nearest minority neighbors of each minority row (self excluded),
  // ties broken by lower row index.
  const std::size_t k_eff = std::min<std::size_t>(cfg.smote_k, n_min - 1);
  std::vector<std::vector<std::size_t>> neighbors(n_min);
  std::vector<std::pair<double, std::size_t>> cand;
  for (std::size_t i = 0; i < n_min; ++i) {
    cand.clear();
    for (std::size_t j = 0; j < n_min; ++j) {
      if (j == i) continue;
      cand.emplace_back(
          sq_distance(train.table, minority_rows[i], minority_rows[j]),
          minority_rows[j]);
    }
    std::sort(cand.begin(), cand.end());
    neighbors[i].reserve(k_eff);
    for (std::size_t t = 0; t < k_eff; ++t) {
      neighbors[i].push_back(cand[t].second);
    }
  }

  const std::size_t d = train.table.cols();
  LabeledDataset out = train;
  out.table.row_keys.reserve(train.rows() + n_new);
  out.table.values.data.reserve((train.rows() + n_new) * d);
  out.labels.reserve(train.rows() + n_new);

  for (std::size_t i = 0; i < n_new; ++i) {
    // Bases rotate through the minority rows; the neighbor and the
    // interpolation coefficient come from the draw stream for index i.
    const std::size_t base_pos = i % n_min;
    const std::size_t base = minority_rows[base_pos];
    rng::SplitMix64 g(rng::derive(seed, i));
    const std::size_t nn =
        neighbors[base_pos][rng::bounded(g, neighbors[base_pos].size())];
    const double lambda = rng::uniform01(g);

    const auto xb = train.table.values.row(base);
    const auto xn = train.table.values.row(nn);
    for (std::size_t c = 0; c < d; ++c) {
      out.table.values.data.push_back(xb[c] + lambda * (xn[c] - xb[c]));
    }
    out.table.mask.insert(out.table.mask.end(), d, std::uint8_t{1});
    out.table.row_keys.push_back({"syn-" + std::to_string(i), 0});
    out.labels.push_back(minority);
  }
  out.table.values.n_rows += n_new;
  for (auto& col : out.table.categoricals) {
    col.values.resize(col.values.size() + n_new);
    col.mask.insert(col.mask.end(), n_new, std::uint8_t{0});
  }
  return out;
}

LabeledDataset tomek_links(const LabeledDataset& train) {
  require_complete(train, "tomek_links");
  const std::size_t n = train.rows();
  const auto counts = class_counts(train);
  if (counts[0] == 0 || counts[1] == 0) {
    throw std::runtime_error("tomek_links: both classes must be present");
  }
  const int minority = minority_class(counts);

  // Nearest neighbor of every row, ties broken by lowest row index.
  std::vector<std::size_t> nn(n);
  for (std::size_t i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_j = i;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d2 = sq_distance(train.table, i, j);
      if (d2 < best) {
        best = d2;
        best_j = j;
      }
    }
    nn[i] = best_j;
  }

  std::vector<std::uint8_t> drop(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = nn[i];
    if (j <= i) continue;  // each pair inspected once
    if (nn[j] != i) continue;
    if (train.labels[i] == train.labels[j]) continue;
    drop[train.labels[i] == minority ? j : i] = 1;
  }

  std::vector<std::size_t> keep;
  keep.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!drop[i]) keep.push_back(i);
  }
  if (keep.size() == n) return train;
  return take_rows(train, keep);
}

LabeledDataset smote_tomek(const LabeledDataset& train,
                           const ResampleConfig& cfg, std::uint64_t seed) {
  LabeledDataset oversampled = smote(train, cfg, seed);
  if (!cfg.apply_tomek) return oversampled;
  return tomek_links(oversampled);
}

LabeledDataset resample(ResampleKind kind, const LabeledDataset& train,
                        const ResampleConfig& cfg, std::uint64_t seed) {
  switch (kind) {
    case ResampleKind::none: return train;
    case ResampleKind::smote: return smote(train, cfg, seed);
    case ResampleKind::tomek: return tomek_links(train);
    case ResampleKind::smote_tomek: return smote_tomek(train, cfg, seed);
  }
  throw std::logic_error("resample: bad kind");
}

}  // namespace outbreak
