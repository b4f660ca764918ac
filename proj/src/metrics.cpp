#include "outbreak/metrics.hpp"

#include <stdexcept>

namespace outbreak {

Metrics compute_metrics(const std::vector<int>& y_true,
                        const std::vector<int>& y_pred) {
  if (y_true.size() != y_pred.size()) {
    throw std::invalid_argument(
        "compute_metrics: prediction and truth lengths differ");
  }
  if (y_true.empty()) {
    throw std::invalid_argument("compute_metrics: empty input");
  }

  Metrics m;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    if (y_true[i] == 1) {
      (y_pred[i] == 1 ? m.tp : m.fn) += 1;
    } else {
      (y_pred[i] == 1 ? m.fp : m.tn) += 1;
    }
  }
  const double n = double(y_true.size());
  m.accuracy = double(m.tp + m.tn) / n;

  // Per class: 1 is the positive class, 0 mirrors the confusion counts.
  const std::array<std::array<std::int64_t, 2>, 2> pred_true = {{
      {m.tn, m.fn},  // predicted 0: true label 0, true label 1
      {m.fp, m.tp},  // predicted 1
  }};
  for (int cls = 0; cls < 2; ++cls) {
    const std::int64_t predicted = pred_true[cls][0] + pred_true[cls][1];
    const std::int64_t support =
        cls == 1 ? (m.tp + m.fn) : (m.tn + m.fp);
    const std::int64_t correct = pred_true[cls][cls];
    m.precision[cls] = predicted > 0 ? double(correct) / double(predicted) : 0.0;
    m.recall[cls] = support > 0 ? double(correct) / double(support) : 0.0;
    const double pr = m.precision[cls] + m.recall[cls];
    m.f1[cls] = pr > 0.0 ? 2.0 * m.precision[cls] * m.recall[cls] / pr : 0.0;
    m.f1_weighted += double(support) / n * m.f1[cls];
  }
  return m;
}

}  // namespace outbreak
