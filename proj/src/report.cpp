#include "outbreak/report.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace outbreak {

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

nlohmann::json metrics_to_json(const Metrics& m) {
  return {
      {"accuracy", m.accuracy},
      {"f1_weighted", m.f1_weighted},
      {"precision", {m.precision[0], m.precision[1]}},
      {"recall", {m.recall[0], m.recall[1]}},
      {"f1", {m.f1[0], m.f1[1]}},
      {"confusion", {{"tp", m.tp}, {"fp", m.fp}, {"fn", m.fn}, {"tn", m.tn}}},
  };
}

}  // namespace

std::string results_csv(const ResultsTable& table) {
  std::ostringstream out;
  out << "imputer,classifier,f1,accuracy,seconds,seed\n";
  for (const auto& row : table.rows) {
    out << row.imputer << ',' << row.classifier << ',';
    if (row.failed) {
      out << ",";  // empty metric cells for failed rows
    } else {
      out << fixed(row.metrics.f1_weighted, 6) << ','
          << fixed(row.metrics.accuracy, 6);
    }
    out << ',' << fixed(row.seconds, 3) << ',' << row.seed << '\n';
  }
  return out.str();
}

std::string results_json(const ResultsTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json j = {
        {"imputer", row.imputer},
        {"classifier", row.classifier},
        {"seconds", row.seconds},
        {"seed", row.seed},
    };
    if (row.failed) {
      j["error"] = row.error;
    } else {
      j["metrics"] = metrics_to_json(row.metrics);
    }
    rows.push_back(std::move(j));
  }
  nlohmann::json doc = {{"format", "outbreak.results"},
                        {"version", 1},
                        {"rows", std::move(rows)}};
  return doc.dump(2) + "\n";
}

std::string results_markdown(const ResultsTable& table) {
  std::vector<std::string> imputers, classifiers;
  for (const auto& row : table.rows) {
    if (std::find(imputers.begin(), imputers.end(), row.imputer) ==
        imputers.end()) {
      imputers.push_back(row.imputer);
    }
    if (std::find(classifiers.begin(), classifiers.end(), row.classifier) ==
        classifiers.end()) {
      classifiers.push_back(row.classifier);
    }
  }

  std::ostringstream out;
  out << "| Algorithms |";
  for (const auto& im : imputers) {
    out << ' ' << im << " F1 | " << im << " Accuracy |";
  }
  out << "\n|---|";
  for (std::size_t i = 0; i < imputers.size(); ++i) out << "---|---|";
  out << '\n';
  for (const auto& cls : classifiers) {
    out << "| " << cls << " |";
    for (const auto& im : imputers) {
      const ResultRow* row = table.find(im, cls);
      if (row == nullptr || row->failed) {
        out << " - | - |";
      } else {
        out << ' ' << fixed(row->metrics.f1_weighted, 3) << " | "
            << fixed(row->metrics.accuracy, 3) << " |";
      }
    }
    out << '\n';
  }
  return out.str();
}

std::string metrics_json(const Metrics& metrics) {
  nlohmann::json doc = metrics_to_json(metrics);
  doc["format"] = "outbreak.metrics";
  doc["version"] = 1;
  return doc.dump(2) + "\n";
}

RankedImportance rank_importances(const std::vector<std::string>& names,
                                  const std::vector<double>& importance) {
  RankedImportance ranked;
  ranked.reserve(names.size());
  for (std::size_t i = 0; i < names.size(); ++i) {
    ranked.emplace_back(names[i], importance[i]);
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  return ranked;
}

std::string importance_csv(const RankedImportance& ranked) {
  std::ostringstream out;
  out << "rank,feature,importance\n";
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    out << (i + 1) << ',' << ranked[i].first << ','
        << fixed(ranked[i].second, 6) << '\n';
  }
  return out.str();
}

std::string importance_svg(const RankedImportance& ranked, int top_k) {
  const std::size_t k =
      std::min<std::size_t>(std::max(top_k, 0), ranked.size());
  const int bar_height = 18;
  const int gap = 6;
  const int label_width = 220;
  const int chart_width = 420;
  const int margin = 10;
  const int width = label_width + chart_width + 2 * margin;
  const int height =
      static_cast<int>(k) * (bar_height + gap) + 2 * margin + 20;

  double max_val = 0.0;
  for (std::size_t i = 0; i < k; ++i) max_val = std::max(max_val, ranked[i].second);
  if (max_val <= 0.0) max_val = 1.0;

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\">\n"
      << "  <text x=\"" << margin << "\" y=\"" << margin + 10
      << "\" font-family=\"sans-serif\" font-size=\"13\">Feature importance "
         "(Mean Decrease Gini)</text>\n";
  for (std::size_t i = 0; i < k; ++i) {
    const int y = margin + 20 + static_cast<int>(i) * (bar_height + gap);
    const int bar =
        static_cast<int>(chart_width * (ranked[i].second / max_val));
    out << "  <text x=\"" << label_width - 6 << "\" y=\"" << y + bar_height - 5
        << "\" font-family=\"sans-serif\" font-size=\"11\" "
           "text-anchor=\"end\">"
        << ranked[i].first << "</text>\n"
        << "  <rect x=\"" << label_width << "\" y=\"" << y << "\" width=\""
        << std::max(bar, 1) << "\" height=\"" << bar_height
        << "\" fill=\"#4878a8\"/>\n"
        << "  <text x=\"" << label_width + std::max(bar, 1) + 4 << "\" y=\""
        << y + bar_height - 5
        << "\" font-family=\"sans-serif\" font-size=\"11\">"
        << fixed(ranked[i].second, 4) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace outbreak
