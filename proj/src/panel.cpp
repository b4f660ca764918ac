#include "outbreak/panel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include "outbreak/rng.hpp"

namespace outbreak {

namespace {

// Splits one CSV record. Handles quoted fields ("" escapes a quote) and
// strips a trailing \r left over from CRLF files.
std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (ch != '\r' || i + 1 != line.size()) {
      cur.push_back(ch);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

bool needs_quoting(const std::string& s) {
  return s.find_first_of(",\"\n\r") != std::string::npos;
}

void write_csv_field(std::ostream& out, const std::string& s) {
  if (!needs_quoting(s)) {
    out << s;
    return;
  }
  out << '"';
  for (char ch : s) {
    if (ch == '"') out << '"';
    out << ch;
  }
  out << '"';
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

bool parse_double(const std::string& s, double& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  const auto res = std::from_chars(first, last, out);
  return res.ec == std::errc{} && res.ptr == last;
}

bool parse_int(const std::string& s, int& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  const auto res = std::from_chars(first, last, out);
  return res.ec == std::errc{} && res.ptr == last;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open file: " + path.string());
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

}  // namespace

bool PanelTable::fully_observed() const {
  return std::all_of(mask.begin(), mask.end(),
                     [](std::uint8_t m) { return m != 0; });
}

std::size_t PanelTable::missing_count() const {
  return static_cast<std::size_t>(
      std::count(mask.begin(), mask.end(), std::uint8_t{0}));
}

PanelTable PanelTable::make(std::vector<RowKey> keys,
                            std::vector<std::string> features) {
  PanelTable t;
  t.row_keys = std::move(keys);
  t.feature_names = std::move(features);
  t.values = Matrix(t.row_keys.size(), t.feature_names.size());
  t.mask.assign(t.row_keys.size() * t.feature_names.size(), 1);
  return t;
}

PanelTable load_panel_csv(const std::filesystem::path& path,
                          const std::set<std::string>& missing_tokens,
                          const std::set<std::string>& categorical_columns) {
  const auto lines = read_lines(path);
  if (lines.empty()) {
    throw std::runtime_error(path.string() + ": empty file, header expected");
  }
  const auto header = split_csv_line(lines[0]);
  if (header.size() < 3 || header[0] != "country_code" ||
      header[1] != "year") {
    throw std::runtime_error(
        path.string() +
        ": header must start with country_code,year and list at least one "
        "feature column");
  }

  std::vector<std::string> numeric_names;
  std::vector<std::size_t> numeric_cols;
  std::vector<std::string> categorical_names;
  std::vector<std::size_t> categorical_cols;
  for (std::size_t c = 2; c < header.size(); ++c) {
    if (categorical_columns.count(header[c])) {
      categorical_names.push_back(header[c]);
      categorical_cols.push_back(c);
    } else {
      numeric_names.push_back(header[c]);
      numeric_cols.push_back(c);
    }
  }

  const std::size_t n_rows = lines.size() - 1;
  PanelTable table;
  table.feature_names = numeric_names;
  table.values = Matrix(n_rows, numeric_names.size());
  table.mask.assign(n_rows * numeric_names.size(), 1);
  table.row_keys.reserve(n_rows);
  for (const auto& name : categorical_names) {
    CategoricalColumn col;
    col.name = name;
    col.values.resize(n_rows);
    col.mask.assign(n_rows, 1);
    table.categoricals.push_back(std::move(col));
  }

  std::map<RowKey, std::size_t> seen;
  for (std::size_t r = 0; r < n_rows; ++r) {
    const auto fields = split_csv_line(lines[r + 1]);
    if (fields.size() != header.size()) {
      throw std::runtime_error(path.string() + ": row " + std::to_string(r + 2) +
                               " has " + std::to_string(fields.size()) +
                               " fields, expected " +
                               std::to_string(header.size()));
    }
    RowKey key;
    key.country_code = fields[0];
    if (!parse_int(fields[1], key.year)) {
      throw std::runtime_error(path.string() + ": row " + std::to_string(r + 2) +
                               ": year '" + fields[1] + "' is not an integer");
    }
    if (auto [it, inserted] = seen.emplace(key, r); !inserted) {
      throw std::runtime_error(path.string() + ": duplicate key (" +
                               key.country_code + ", " +
                               std::to_string(key.year) + ")");
    }
    table.row_keys.push_back(key);

    for (std::size_t j = 0; j < numeric_cols.size(); ++j) {
      const std::string& cell = fields[numeric_cols[j]];
      if (missing_tokens.count(cell)) {
        table.set_missing(r, j);
        continue;
      }
      double v;
      if (!parse_double(cell, v)) {
        throw std::runtime_error(
            path.string() + ": row " + std::to_string(r + 2) + ", column '" +
            numeric_names[j] + "': cell '" + cell + "' is not numeric");
      }
      table.values(r, j) = v;
    }
    for (std::size_t j = 0; j < categorical_cols.size(); ++j) {
      const std::string& cell = fields[categorical_cols[j]];
      if (missing_tokens.count(cell)) {
        table.categoricals[j].mask[r] = 0;
      } else {
        table.categoricals[j].values[r] = cell;
      }
    }
  }
  return table;
}

void write_panel_csv(const PanelTable& table,
                     const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write file: " + path.string());
  }
  out << "country_code,year";
  for (const auto& name : table.feature_names) {
    out << ',';
    write_csv_field(out, name);
  }
  for (const auto& col : table.categoricals) {
    out << ',';
    write_csv_field(out, col.name);
  }
  out << '\n';
  for (std::size_t r = 0; r < table.rows(); ++r) {
    write_csv_field(out, table.row_keys[r].country_code);
    out << ',' << table.row_keys[r].year;
    for (std::size_t c = 0; c < table.cols(); ++c) {
      out << ',';
      if (table.observed(r, c)) out << format_double(table.values(r, c));
    }
    for (const auto& col : table.categoricals) {
      out << ',';
      if (col.mask[r]) write_csv_field(out, col.values[r]);
    }
    out << '\n';
  }
}

CategoricalEncoding fit_categorical_encoding(const PanelTable& table,
                                             EncodePolicy policy) {
  CategoricalEncoding enc;
  enc.policy = policy;
  for (const auto& col : table.categoricals) {
    std::set<std::string> levels;
    for (std::size_t r = 0; r < col.values.size(); ++r) {
      if (col.mask[r]) levels.insert(col.values[r]);
    }
    enc.column_names.push_back(col.name);
    enc.levels.emplace_back(levels.begin(), levels.end());
  }
  return enc;
}

PanelTable apply_categorical_encoding(const CategoricalEncoding& enc,
                                      const PanelTable& table) {
  if (enc.column_names.size() != table.categoricals.size()) {
    throw std::runtime_error(
        "categorical encoding does not match table: expected " +
        std::to_string(enc.column_names.size()) + " columns, table has " +
        std::to_string(table.categoricals.size()));
  }
  for (std::size_t j = 0; j < enc.column_names.size(); ++j) {
    if (enc.column_names[j] != table.categoricals[j].name) {
      throw std::runtime_error("categorical column mismatch: expected '" +
                               enc.column_names[j] + "', found '" +
                               table.categoricals[j].name + "'");
    }
  }

  std::vector<std::string> out_names = table.feature_names;
  for (std::size_t j = 0; j < enc.column_names.size(); ++j) {
    if (enc.policy == EncodePolicy::one_hot) {
      for (const auto& level : enc.levels[j]) {
        out_names.push_back(enc.column_names[j] + "=" + level);
      }
    } else {
      out_names.push_back(enc.column_names[j]);
    }
  }

  PanelTable out = PanelTable::make(table.row_keys, std::move(out_names));
  for (std::size_t r = 0; r < table.rows(); ++r) {
    for (std::size_t c = 0; c < table.cols(); ++c) {
      if (table.observed(r, c)) {
        out.values(r, c) = table.values(r, c);
      } else {
        out.set_missing(r, c);
      }
    }
  }

  std::size_t next = table.cols();
  for (std::size_t j = 0; j < enc.column_names.size(); ++j) {
    const auto& col = table.categoricals[j];
    const auto& levels = enc.levels[j];
    if (enc.policy == EncodePolicy::one_hot) {
      for (std::size_t r = 0; r < table.rows(); ++r) {
        if (!col.mask[r]) {
          // Missing category: every derived indicator is missing.
          for (std::size_t l = 0; l < levels.size(); ++l) {
            out.set_missing(r, next + l);
          }
          continue;
        }
        for (std::size_t l = 0; l < levels.size(); ++l) {
          out.values(r, next + l) = (col.values[r] == levels[l]) ? 1.0 : 0.0;
        }
      }
      next += levels.size();
    } else {
      for (std::size_t r = 0; r < table.rows(); ++r) {
        if (!col.mask[r]) {
          out.set_missing(r, next);
          continue;
        }
        const auto it =
            std::lower_bound(levels.begin(), levels.end(), col.values[r]);
        if (it == levels.end() || *it != col.values[r]) {
          throw std::runtime_error("unseen level '" + col.values[r] +
                                   "' in column '" + col.name +
                                   "' under ordinal encoding");
        }
        out.values(r, next) =
            static_cast<double>(std::distance(levels.begin(), it));
      }
      ++next;
    }
  }
  return out;
}

PanelTable encode_categoricals(const PanelTable& table, EncodePolicy policy) {
  return apply_categorical_encoding(fit_categorical_encoding(table, policy),
                                    table);
}

LabelJoinResult attach_labels(const PanelTable& table,
                              const std::filesystem::path& labels_csv) {
  const auto lines = read_lines(labels_csv);
  if (lines.empty()) {
    throw std::runtime_error(labels_csv.string() +
                             ": empty file, header expected");
  }
  const auto header = split_csv_line(lines[0]);
  if (header.size() != 3 || header[0] != "country_code" ||
      header[1] != "year" || header[2] != "outbreak") {
    throw std::runtime_error(labels_csv.string() +
                             ": header must be country_code,year,outbreak");
  }

  std::map<RowKey, int> label_map;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto fields = split_csv_line(lines[r]);
    if (fields.size() != 3) {
      throw std::runtime_error(labels_csv.string() + ": row " +
                               std::to_string(r + 1) + " has " +
                               std::to_string(fields.size()) +
                               " fields, expected 3");
    }
    RowKey key;
    key.country_code = fields[0];
    if (!parse_int(fields[1], key.year)) {
      throw std::runtime_error(labels_csv.string() + ": row " +
                               std::to_string(r + 1) + ": year '" + fields[1] +
                               "' is not an integer");
    }
    int outbreak;
    if (!parse_int(fields[2], outbreak) || (outbreak != 0 && outbreak != 1)) {
      throw std::runtime_error(labels_csv.string() + ": row " +
                               std::to_string(r + 1) + ": outbreak value '" +
                               fields[2] + "' must be 0 or 1");
    }
    if (auto [it, inserted] = label_map.emplace(key, outbreak); !inserted) {
      throw std::runtime_error(labels_csv.string() + ": duplicate label key (" +
                               key.country_code + ", " +
                               std::to_string(key.year) + ")");
    }
  }

  LabelJoinResult result;
  result.dataset.table = table;
  result.dataset.labels.assign(table.rows(), 0);
  std::size_t matched = 0;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    if (const auto it = label_map.find(table.row_keys[r]);
        it != label_map.end()) {
      result.dataset.labels[r] = it->second;
      ++matched;
    }
  }
  result.skipped_label_rows = label_map.size() - matched;
  return result;
}

void write_labels_csv(const std::vector<RowKey>& keys,
                      const std::vector<int>& labels,
                      const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write file: " + path.string());
  }
  out << "country_code,year,outbreak\n";
  for (std::size_t r = 0; r < keys.size(); ++r) {
    write_csv_field(out, keys[r].country_code);
    out << ',' << keys[r].year << ',' << labels[r] << '\n';
  }
}

LabeledDataset take_rows(const LabeledDataset& ds,
                         const std::vector<std::size_t>& indices) {
  LabeledDataset out;
  out.table.feature_names = ds.table.feature_names;
  out.table.values = Matrix(indices.size(), ds.table.cols());
  out.table.mask.assign(indices.size() * ds.table.cols(), 1);
  out.table.row_keys.reserve(indices.size());
  out.labels.reserve(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const std::size_t r = indices[i];
    out.table.row_keys.push_back(ds.table.row_keys[r]);
    for (std::size_t c = 0; c < ds.table.cols(); ++c) {
      out.table.values(i, c) = ds.table.values(r, c);
      out.table.mask[i * ds.table.cols() + c] = ds.table.mask[r * ds.table.cols() + c];
    }
    out.labels.push_back(ds.labels[r]);
  }
  for (const auto& col : ds.table.categoricals) {
    CategoricalColumn sub;
    sub.name = col.name;
    for (std::size_t r : indices) {
      sub.values.push_back(col.values[r]);
      sub.mask.push_back(col.mask[r]);
    }
    out.table.categoricals.push_back(std::move(sub));
  }
  return out;
}

SplitResult stratified_split(const LabeledDataset& ds, double test_fraction,
                             std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw std::invalid_argument("test_fraction must lie in (0, 1)");
  }
  const std::size_t n = ds.rows();
  std::vector<std::size_t> class_rows[2];
  for (std::size_t r = 0; r < n; ++r) {
    class_rows[ds.labels[r]].push_back(r);
  }
  if (class_rows[0].empty() || class_rows[1].empty()) {
    throw std::runtime_error(
        "stratified split needs at least one example of each class");
  }

  // Largest-remainder allocation: per-class test counts stay within one
  // example of exact proportionality and sum to round(fraction * n).
  const auto total_test =
      static_cast<std::size_t>(std::llround(test_fraction * double(n)));
  std::size_t take[2];
  double remainder[2];
  std::size_t assigned = 0;
  for (int c = 0; c < 2; ++c) {
    const double exact = test_fraction * double(class_rows[c].size());
    take[c] = static_cast<std::size_t>(std::floor(exact));
    remainder[c] = exact - double(take[c]);
    assigned += take[c];
  }
  while (assigned < total_test) {
    const int c = (remainder[0] >= remainder[1]) ? 0 : 1;
    ++take[c];
    remainder[c] = -1.0;
    ++assigned;
  }
  while (assigned > total_test) {
    const int c = (remainder[0] <= remainder[1]) ? 0 : 1;
    if (take[c] == 0) break;
    --take[c];
    remainder[c] = 2.0;
    --assigned;
  }

  std::vector<std::size_t> test_idx, train_idx;
  for (int c = 0; c < 2; ++c) {
    auto rows = class_rows[c];
    rng::SplitMix64 g(rng::derive(seed, static_cast<std::uint64_t>(c)));
    rng::shuffle(rows, g);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      (i < take[c] ? test_idx : train_idx).push_back(rows[i]);
    }
  }
  std::sort(test_idx.begin(), test_idx.end());
  std::sort(train_idx.begin(), train_idx.end());

  SplitResult out;
  out.train = take_rows(ds, train_idx);
  out.test = take_rows(ds, test_idx);
  return out;
}

MissingReport missingness_profile(const PanelTable& table) {
  MissingReport report;
  const std::size_t rows = table.rows();
  const std::size_t cols = table.cols();
  report.per_feature.assign(cols, 0.0);
  report.per_row.assign(rows, 0.0);
  std::size_t total_missing = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    std::size_t row_missing = 0;
    for (std::size_t c = 0; c < cols; ++c) {
      if (!table.observed(r, c)) {
        ++row_missing;
        report.per_feature[c] += 1.0;
      }
    }
    total_missing += row_missing;
    report.per_row[r] = cols ? double(row_missing) / double(cols) : 0.0;
  }
  for (auto& f : report.per_feature) f /= rows ? double(rows) : 1.0;
  report.overall =
      (rows * cols) ? double(total_missing) / double(rows * cols) : 0.0;
  return report;
}

}  // namespace outbreak
