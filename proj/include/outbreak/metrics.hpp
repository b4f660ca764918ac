#pragma once

#include <array>
#include <cstdint>
#include <vector>

// Binary classification metrics with class 1 as the positive class.
// Weighted F1 averages the per-class F1 scores by class support; a class
// nobody predicts gets precision 0.

namespace outbreak {

struct Metrics {
  double accuracy = 0.0;
  double f1_weighted = 0.0;
  std::array<double, 2> precision{0.0, 0.0};
  std::array<double, 2> recall{0.0, 0.0};
  std::array<double, 2> f1{0.0, 0.0};
  std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;
};

Metrics compute_metrics(const std::vector<int>& y_true,
                        const std::vector<int>& y_pred);

}  // namespace outbreak
