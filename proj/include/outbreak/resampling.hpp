#pragma once

#include <cstdint>
#include <string>

#include "outbreak/panel.hpp"

// Class-imbalance treatment for the training split: SMOTE synthesizes
// minority rows by interpolating between minority neighbors, Tomek links
// drop the majority member of every cross-class mutual-nearest-neighbor
// pair, and the hybrid runs one after the other.

namespace outbreak {

struct ResampleConfig {
  int smote_k = 5;
  double target_ratio = 1.0;  // desired minority/majority ratio after SMOTE
  bool apply_tomek = true;
};

enum class ResampleKind { none, smote, tomek, smote_tomek };

const char* resample_name(ResampleKind kind);
ResampleKind resample_from_name(const std::string& name);

// Appends ceil(target_ratio * majority) - minority synthetic rows, each on
// the segment between a minority row and one of its smote_k nearest
// minority neighbors. Original rows are retained unchanged. Synthetic rows
// get country code "syn-<i>". Throws when the minority class has fewer
// than two examples.
LabeledDataset smote(const LabeledDataset& train, const ResampleConfig& cfg,
                     std::uint64_t seed);

// Removes the majority member of every Tomek link, in one simultaneous
// pass over links computed on the input. Minority rows are never removed.
LabeledDataset tomek_links(const LabeledDataset& train);

// smote followed by tomek_links (the latter only if cfg.apply_tomek).
LabeledDataset smote_tomek(const LabeledDataset& train,
                           const ResampleConfig& cfg, std::uint64_t seed);

// Dispatch by kind; ResampleKind::none returns the input unchanged.
LabeledDataset resample(ResampleKind kind, const LabeledDataset& train,
                        const ResampleConfig& cfg, std::uint64_t seed);

}  // namespace outbreak
