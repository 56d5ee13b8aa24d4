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

#include "dperm/types.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "dperm/rng.hpp"

namespace dperm {

namespace {
constexpr double kRowNormSlack = 1e-9;
}

void Dataset::validate() const {
  if (features.rows() < 2) throw DataError("Dataset: need at least 2 examples");
  if (features.cols() < 1) throw DataError("Dataset: need at least 1 feature");
  if (labels.size() != features.rows()) {
    throw DataError("Dataset: label count does not match row count");
  }
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    if (!features.row(i).allFinite()) {
      throw DataError("Dataset: non-finite feature in row " + std::to_string(i));
    }
    if (features.row(i).norm() > 1.0 + kRowNormSlack) {
      throw DataError("Dataset: row " + std::to_string(i) + " exceeds unit norm");
    }
  }
  if (task == Task::kClassification) {
    for (Eigen::Index i = 0; i < labels.size(); ++i) {
      if (labels[i] != 1.0 && labels[i] != -1.0) {
        throw DataError("Dataset: classification label at row " + std::to_string(i) +
                        " is not +/-1");
      }
    }
  } else {
    if (!labels.allFinite()) throw DataError("Dataset: non-finite label");
  }
}

uint64_t Dataset::content_hash() const {
  uint64_t h = fnv1a64(features.data(), sizeof(double) * static_cast<std::size_t>(features.size()));
  h = fnv1a64(labels.data(), sizeof(double) * static_cast<std::size_t>(labels.size()), h);
  const char tag = task == Task::kClassification ? 'c' : 'r';
  return fnv1a64(&tag, 1, h);
}

ParamVector project_to_ball(const ParamVector& theta, double radius) {
  if (!(radius > 0.0)) throw ConfigError("project_to_ball: radius must be positive");
  const double norm = theta.norm();
  if (norm <= radius) return theta;
  return theta * (radius / norm);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string TrainTrace::to_csv() const {
  std::string out = "t,risk,grad_norm,noise_norm,step_norm\n";
  for (const TraceEntry& e : entries) {
    out += std::to_string(e.t);
    out += ',';
    out += format_double(e.empirical_risk);
    out += ',';
    out += format_double(e.grad_norm);
    out += ',';
    out += format_double(e.noise_norm);
    out += ',';
    out += format_double(e.step_norm);
    out += '\n';
  }
  return out;
}

void TrainTrace::write_csv(const std::string& path) const {
  write_file_atomic(path, to_csv());
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error("short write to " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace dperm
