// Copyright 2026 The dlogic Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

namespace dlogic {

enum class Split { Train, Test };

/// Labelled feature rows (one sample per row).
struct Dataset {
  Eigen::MatrixXd features;
  std::vector<int> labels;
  std::size_t n_classes = 0;
  Split split = Split::Train;

  std::size_t size() const { return labels.size(); }
  std::size_t dims() const { return static_cast<std::size_t>(features.cols()); }

  /// Rows at `indices`, in that order.
  Dataset select(const std::vector<std::size_t>& indices) const;
};

struct SyntheticSpec {
  std::uint64_t seed = 0;
  std::size_t n_train = 5000;
  std::size_t n_test = 1000;
  std::size_t n_classes = 10;
  std::size_t dims = 20;
  double noise_frac = 0.1;
  /// Radius of the ring the class means lie on.
  double radius = 4.0;
  /// Per-coordinate standard deviation of every blob.
  double spread = 1.0;
};

struct SyntheticData {
  Dataset train;
  Dataset test;
  /// Training rows whose label was replaced (sorted).
  std::vector<std::size_t> noisy;
};

/// One isotropic Gaussian blob per class. Class c has its mean at angle
/// 2 pi c / n_classes on a ring in the first two coordinates; the other
/// coordinates are pure noise. floor(noise_frac * n_train) training labels
/// are replaced by a different class drawn uniformly; test labels are never
/// touched. Deterministic in `seed`.
SyntheticData gen_synthetic(const SyntheticSpec& spec);

class IdxError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads an IDX image file (magic 0x00000803, big-endian dimensions,
/// unsigned bytes) and its label file (magic 0x00000801). Pixels are scaled
/// to [0, 1] and flattened row-major. The class count is max label + 1.
Dataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels);

/// Stratified subsample: every class keeps round(fraction * count) of its
/// samples, chosen by a seeded shuffle; the result keeps the original
/// order. fraction must lie in (0, 1].
Dataset subsample(const Dataset& d, double fraction, std::uint64_t seed);

}  // namespace dlogic
