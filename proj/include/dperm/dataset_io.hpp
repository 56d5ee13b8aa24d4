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

#ifndef DPERM_DATASET_IO_HPP_
#define DPERM_DATASET_IO_HPP_

#include <string>
#include <utility>

#include "dperm/rng.hpp"
#include "dperm/types.hpp"

namespace dperm {

// Column layout of a CSV source. Feature columns that fail numeric parsing
// anywhere are one-hot encoded over their sorted category set.
struct CsvSchema {
  std::string label_column;  // header name, or 0-based index when no header
  char delimiter = ',';
  bool has_header = true;
  Task task = Task::kClassification;
  // Reduce a multiclass label column to one-vs-rest on its smallest class.
  // Off by default: a third label value is then a parse error.
  bool one_vs_rest = false;
};

// Parses, one-hot encodes, standardizes columns, rescales rows to unit norm
// and maps binary labels to +/-1. Deterministic.
Dataset ingest_csv(const std::string& path, const CsvSchema& schema);

// Extends the feature matrix with zero columns up to target_p.
Dataset pad_dimensions(const Dataset& data, Eigen::Index target_p);

// First `count` rows of a seeded shuffle.
Dataset subsample(const Dataset& data, Eigen::Index count, uint64_t seed);

// Seeded shuffle followed by a tail split; returns (train, test).
std::pair<Dataset, Dataset> train_test_split(const Dataset& data, double test_fraction,
                                             uint64_t seed);

// Normalized-dataset cache: a CSV of preprocessed rows next to the label
// column. Round-trips through ingest-with-identity-preprocessing.
void write_dataset_cache(const Dataset& data, const std::string& path);
Dataset load_dataset_cache(const std::string& path);

}  // namespace dperm

#endif  // DPERM_DATASET_IO_HPP_
