// Copyright 2025 The dperm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dperm/dataset_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <vector>

namespace dperm {

namespace {

std::vector<std::string> split_line(const std::string& line, char delimiter) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, delimiter)) {
    // Trim surrounding whitespace and optional quotes.
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    std::string trimmed = b == std::string::npos ? "" : cell.substr(b, e - b + 1);
    if (trimmed.size() >= 2 && trimmed.front() == '"' && trimmed.back() == '"') {
      trimmed = trimmed.substr(1, trimmed.size() - 2);
    }
    cells.push_back(trimmed);
  }
  if (!line.empty() && line.back() == delimiter) cells.push_back("");
  return cells;
}

bool try_parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  try {
    std::size_t pos = 0;
    out = std::stod(s, &pos);
    return pos == s.size();
  } catch (const std::exception&) {
    return false;
  }
}

struct RawTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

RawTable read_table(const std::string& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw DataError("ingest_csv: cannot open file: " + path);
  RawTable table;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') continue;
    auto cells = split_line(line, schema.delimiter);
    if (first && schema.has_header) {
      table.header = std::move(cells);
      first = false;
      continue;
    }
    first = false;
    table.rows.push_back(std::move(cells));
  }
  if (table.rows.empty()) throw DataError("ingest_csv: no data rows in " + path);
  return table;
}

std::size_t resolve_label_index(const RawTable& table, const CsvSchema& schema) {
  if (schema.has_header) {
    const auto it = std::find(table.header.begin(), table.header.end(), schema.label_column);
    if (it == table.header.end()) {
      throw DataError("ingest_csv: label column '" + schema.label_column + "' not found");
    }
    return static_cast<std::size_t>(it - table.header.begin());
  }
  try {
    return static_cast<std::size_t>(std::stoul(schema.label_column));
  } catch (const std::exception&) {
    throw DataError("ingest_csv: headerless files need a numeric label column index");
  }
}

// Maps raw label strings to +/-1. Two distinct values map the smaller one
// (numeric order when both parse, lexicographic otherwise) to -1. With
// one-vs-rest enabled, the smallest class becomes +1 and the rest -1.
Eigen::VectorXd encode_labels(const std::vector<std::string>& raw, const CsvSchema& schema) {
  const Eigen::Index n = static_cast<Eigen::Index>(raw.size());
  Eigen::VectorXd labels(n);
  if (schema.task == Task::kRegression) {
    for (Eigen::Index i = 0; i < n; ++i) {
      double v = 0.0;
      if (!try_parse_double(raw[static_cast<std::size_t>(i)], v)) {
        throw DataError("ingest_csv: unparseable label in row " + std::to_string(i));
      }
      labels[i] = v;
    }
    return labels;
  }

  std::vector<std::string> distinct;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (std::find(distinct.begin(), distinct.end(), raw[i]) == distinct.end()) {
      distinct.push_back(raw[i]);
      if (!schema.one_vs_rest && distinct.size() > 2) {
        throw DataError("ingest_csv: non-binary label column for classification, value '" +
                        raw[i] + "' in row " + std::to_string(i));
      }
    }
  }
  if (distinct.size() < 2) {
    throw DataError("ingest_csv: label column has a single class");
  }

  const auto numeric_less = [](const std::string& a, const std::string& b) {
    double da = 0.0;
    double db = 0.0;
    const bool na = try_parse_double(a, da);
    const bool nb = try_parse_double(b, db);
    if (na && nb) return da < db;
    return a < b;
  };
  std::sort(distinct.begin(), distinct.end(), numeric_less);

  if (schema.one_vs_rest) {
    const std::string& positive = distinct.front();
    for (Eigen::Index i = 0; i < n; ++i) {
      labels[i] = raw[static_cast<std::size_t>(i)] == positive ? 1.0 : -1.0;
    }
    return labels;
  }
  const std::string& negative = distinct[0];
  for (Eigen::Index i = 0; i < n; ++i) {
    labels[i] = raw[static_cast<std::size_t>(i)] == negative ? -1.0 : 1.0;
  }
  return labels;
}

}  // namespace

Dataset ingest_csv(const std::string& path, const CsvSchema& schema) {
  const RawTable table = read_table(path, schema);
  const std::size_t label_index = resolve_label_index(table, schema);
  const std::size_t width = schema.has_header ? table.header.size() : table.rows.front().size();
  if (label_index >= width) throw DataError("ingest_csv: label column index out of range");

  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    if (table.rows[i].size() != width) {
      throw DataError("ingest_csv: row " + std::to_string(i) + " has " +
                      std::to_string(table.rows[i].size()) + " cells, expected " +
                      std::to_string(width));
    }
  }

  // Column is numeric only if every cell parses; otherwise one-hot over its
  // sorted category set.
  std::vector<std::size_t> feature_columns;
  for (std::size_t c = 0; c < width; ++c) {
    if (c != label_index) feature_columns.push_back(c);
  }
  std::vector<bool> numeric(width, true);
  for (const std::size_t c : feature_columns) {
    for (const auto& row : table.rows) {
      double v = 0.0;
      if (!try_parse_double(row[c], v)) {
        numeric[c] = false;
        break;
      }
    }
  }
  std::map<std::size_t, std::vector<std::string>> categories;
  for (const std::size_t c : feature_columns) {
    if (numeric[c]) continue;
    std::set<std::string> values;
    for (const auto& row : table.rows) {
      if (row[c].empty()) {
        throw DataError("ingest_csv: empty categorical cell in column " + std::to_string(c));
      }
      values.insert(row[c]);
    }
    categories[c] = std::vector<std::string>(values.begin(), values.end());
  }

  Eigen::Index p = 0;
  for (const std::size_t c : feature_columns) {
    p += numeric[c] ? 1 : static_cast<Eigen::Index>(categories[c].size());
  }
  const Eigen::Index n = static_cast<Eigen::Index>(table.rows.size());

  Dataset data;
  data.task = schema.task;
  data.name = path;
  data.features.setZero(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = table.rows[static_cast<std::size_t>(i)];
    Eigen::Index out = 0;
    for (const std::size_t c : feature_columns) {
      if (numeric[c]) {
        double v = 0.0;
        if (!try_parse_double(row[c], v)) {
          throw DataError("ingest_csv: unparseable cell in row " + std::to_string(i) +
                          ", column " + std::to_string(c));
        }
        data.features(i, out++) = v;
      } else {
        const auto& cats = categories[c];
        const auto it = std::find(cats.begin(), cats.end(), row[c]);
        data.features(i, out + static_cast<Eigen::Index>(it - cats.begin())) = 1.0;
        out += static_cast<Eigen::Index>(cats.size());
      }
    }
  }

  std::vector<std::string> raw_labels;
  raw_labels.reserve(static_cast<std::size_t>(n));
  for (const auto& row : table.rows) raw_labels.push_back(row[label_index]);
  data.labels = encode_labels(raw_labels, schema);

  // Standardize columns, then cap row norms at 1.
  data.feature_scale.resize(static_cast<std::size_t>(p));
  for (Eigen::Index c = 0; c < p; ++c) {
    const double mean = data.features.col(c).mean();
    const double var =
        (data.features.col(c).array() - mean).square().sum() / static_cast<double>(n);
    const double stddev = var > 0.0 ? std::sqrt(var) : 1.0;
    data.feature_scale[static_cast<std::size_t>(c)] = {mean, stddev};
    data.features.col(c) = (data.features.col(c).array() - mean) / stddev;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const double norm = data.features.row(i).norm();
    if (norm > 1.0) data.features.row(i) /= norm;
  }

  data.validate();
  return data;
}

Dataset pad_dimensions(const Dataset& data, Eigen::Index target_p) {
  if (target_p < data.dim()) {
    throw ConfigError("pad_dimensions: target dimension below current dimension");
  }
  if (target_p == data.dim()) return data;
  Dataset out = data;
  out.features.setZero(data.size(), target_p);
  out.features.leftCols(data.dim()) = data.features;
  out.feature_scale.resize(static_cast<std::size_t>(target_p), ColumnScale{0.0, 1.0});
  return out;
}

namespace {

std::vector<Eigen::Index> shuffled_indices(Eigen::Index n, uint64_t seed, uint64_t stream) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  Rng rng(seed, stream);
  for (Eigen::Index i = n - 1; i > 0; --i) {
    const auto j = static_cast<Eigen::Index>(rng.next_u64() % static_cast<uint64_t>(i + 1));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  return idx;
}

Dataset take_rows(const Dataset& data, const std::vector<Eigen::Index>& rows) {
  Dataset out;
  out.name = data.name;
  out.task = data.task;
  out.feature_scale = data.feature_scale;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), data.dim());
  out.labels.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.features.row(static_cast<Eigen::Index>(i)) = data.features.row(rows[i]);
    out.labels[static_cast<Eigen::Index>(i)] = data.labels[rows[i]];
  }
  return out;
}

}  // namespace

Dataset subsample(const Dataset& data, Eigen::Index count, uint64_t seed) {
  if (count < 2 || count > data.size()) {
    throw ConfigError("subsample: count out of range");
  }
  const auto idx = shuffled_indices(data.size(), seed, streams::kDataShuffle);
  return take_rows(data, std::vector<Eigen::Index>(idx.begin(), idx.begin() + count));
}

std::pair<Dataset, Dataset> train_test_split(const Dataset& data, double test_fraction,
                                             uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ConfigError("train_test_split: fraction must lie in (0,1)");
  }
  const auto idx = shuffled_indices(data.size(), seed, streams::kTrainTestSplit);
  const auto n_test = static_cast<Eigen::Index>(
      std::llround(test_fraction * static_cast<double>(data.size())));
  if (n_test < 1 || data.size() - n_test < 2) {
    throw ConfigError("train_test_split: split leaves too few rows");
  }
  const std::vector<Eigen::Index> train_rows(idx.begin(), idx.end() - n_test);
  const std::vector<Eigen::Index> test_rows(idx.end() - n_test, idx.end());
  return {take_rows(data, train_rows), take_rows(data, test_rows)};
}

void write_dataset_cache(const Dataset& data, const std::string& path) {
  std::string out = "# dperm-cache task=";
  out += data.task == Task::kClassification ? "classification" : "regression";
  out += " name=" + data.name + "\n";
  for (Eigen::Index c = 0; c < data.dim(); ++c) {
    out += "f" + std::to_string(c) + ",";
  }
  out += "label\n";
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    for (Eigen::Index c = 0; c < data.dim(); ++c) {
      out += format_double(data.features(i, c));
      out += ',';
    }
    out += format_double(data.labels[i]);
    out += '\n';
  }
  write_file_atomic(path, out);
}

Dataset load_dataset_cache(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("load_dataset_cache: cannot open " + path);
  std::string marker;
  std::getline(in, marker);
  if (marker.rfind("# dperm-cache", 0) != 0) {
    throw DataError("load_dataset_cache: not a cache file: " + path);
  }
  Task task = marker.find("task=regression") != std::string::npos ? Task::kRegression
                                                                  : Task::kClassification;
  std::string name;
  const auto name_pos = marker.find("name=");
  if (name_pos != std::string::npos) name = marker.substr(name_pos + 5);

  std::string header;
  std::getline(in, header);
  const auto cols = split_line(header, ',');
  if (cols.empty() || cols.back() != "label") {
    throw DataError("load_dataset_cache: malformed header in " + path);
  }
  const Eigen::Index p = static_cast<Eigen::Index>(cols.size()) - 1;

  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_line(line, ',');
    if (static_cast<Eigen::Index>(cells.size()) != p + 1) {
      throw DataError("load_dataset_cache: malformed row in " + path);
    }
    std::vector<double> vals(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (!try_parse_double(cells[c], vals[c])) {
        throw DataError("load_dataset_cache: unparseable cell in " + path);
      }
    }
    rows.push_back(std::move(vals));
  }

  Dataset data;
  data.task = task;
  data.name = name;
  data.features.resize(static_cast<Eigen::Index>(rows.size()), p);
  data.labels.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (Eigen::Index c = 0; c < p; ++c) {
      data.features(static_cast<Eigen::Index>(i), c) = rows[i][static_cast<std::size_t>(c)];
    }
    data.labels[static_cast<Eigen::Index>(i)] = rows[i].back();
  }
  data.validate();
  return data;
}

}  // namespace dperm
