#pragma once

#include <string>
#include <utility>
#include <vector>

#include "outbreak/evaluation.hpp"
#include "outbreak/metrics.hpp"

// Report rendering: the results grid as CSV/JSON/Markdown (the Markdown
// mirrors the classifier-by-imputer layout of the benchmark table), ranked
// feature importances as CSV, and a horizontal-bar SVG chart of the top-k
// importances. All output is byte-stable: no timestamps, fixed number
// formatting.

namespace outbreak {

std::string results_csv(const ResultsTable& table);
std::string results_json(const ResultsTable& table);
std::string results_markdown(const ResultsTable& table);

std::string metrics_json(const Metrics& metrics);

using RankedImportance = std::vector<std::pair<std::string, double>>;

// Pairs feature names with importances, sorted descending (ties by name).
RankedImportance rank_importances(const std::vector<std::string>& names,
                                  const std::vector<double>& importance);

std::string importance_csv(const RankedImportance& ranked);
std::string importance_svg(const RankedImportance& ranked, int top_k);

}  // namespace outbreak
