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

#include "dlogic/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

namespace dlogic {

Dataset Dataset::select(const std::vector<std::size_t>& indices) const {
  Dataset out;
  out.features.resize(static_cast<Eigen::Index>(indices.size()), features.cols());
  out.labels.reserve(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    out.features.row(static_cast<Eigen::Index>(i)) = features.row(static_cast<Eigen::Index>(indices[i]));
    out.labels.push_back(labels.at(indices[i]));
  }
  out.n_classes = n_classes;
  out.split = split;
  return out;
}

namespace {

Dataset sample_blobs(std::mt19937_64& rng, const SyntheticSpec& spec, std::size_t n, Split split) {
  std::normal_distribution<double> noise(0.0, spec.spread);
  Dataset d;
  d.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(spec.dims));
  d.labels.resize(n);
  d.n_classes = spec.n_classes;
  d.split = split;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = i % spec.n_classes;
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(c) / static_cast<double>(spec.n_classes);
    for (std::size_t k = 0; k < spec.dims; ++k) {
      double mean = 0.0;
      if (k == 0) mean = spec.radius * std::cos(angle);
      if (k == 1) mean = spec.radius * std::sin(angle);
      d.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = mean + noise(rng);
    }
    d.labels[i] = static_cast<int>(c);
  }
  return d;
}

std::uint32_t read_be32(std::istream& in, const std::string& what) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw IdxError(what + ": truncated header");
  return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) | std::uint32_t{b[3]};
}

struct IdxFile {
  std::vector<std::uint32_t> dims;
  std::vector<unsigned char> data;
};

IdxFile read_idx(const std::filesystem::path& path, std::uint32_t expected_magic) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IdxError("cannot open " + path.string());
  const std::uint32_t magic = read_be32(in, path.string());
  if (magic != expected_magic) {
    char buf[11];
    std::snprintf(buf, sizeof buf, "0x%08x", magic);
    throw IdxError(path.string() + ": bad magic number " + buf);
  }
  IdxFile f;
  std::size_t total = 1;
  for (std::uint32_t k = 0; k < (magic & 0xffu); ++k) {
    f.dims.push_back(read_be32(in, path.string()));
    total *= f.dims.back();
  }
  f.data.resize(total);
  in.read(reinterpret_cast<char*>(f.data.data()), static_cast<std::streamsize>(total));
  if (static_cast<std::size_t>(in.gcount()) != total)
    throw IdxError(path.string() + ": length mismatch, header promises " + std::to_string(total) + " bytes but only " +
                   std::to_string(in.gcount()) + " present");
  return f;
}

}  // namespace

SyntheticData gen_synthetic(const SyntheticSpec& spec) {
  if (spec.n_classes < 3) throw std::invalid_argument("synthetic data needs at least three classes");
  if (spec.n_train == 0 || spec.n_test == 0) throw std::invalid_argument("synthetic data needs non-empty splits");
  if (spec.dims < 2) throw std::invalid_argument("synthetic data needs at least two dimensions");
  if (!(spec.noise_frac >= 0.0 && spec.noise_frac < 1.0)) throw std::invalid_argument("noise fraction must lie in [0, 1)");
  if (!(spec.spread > 0.0)) throw std::invalid_argument("blob spread must be positive");

  std::mt19937_64 rng(spec.seed);
  SyntheticData out;
  out.train = sample_blobs(rng, spec, spec.n_train, Split::Train);
  out.test = sample_blobs(rng, spec, spec.n_test, Split::Test);

  const auto n_noisy = static_cast<std::size_t>(std::floor(spec.noise_frac * static_cast<double>(spec.n_train)));
  std::vector<std::size_t> order(spec.n_train);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  order.resize(n_noisy);
  std::sort(order.begin(), order.end());
  std::uniform_int_distribution<std::size_t> shift(1, spec.n_classes - 1);
  for (auto i : order) {
    const auto c = static_cast<std::size_t>(out.train.labels[i]);
    out.train.labels[i] = static_cast<int>((c + shift(rng)) % spec.n_classes);
  }
  out.noisy = std::move(order);
  return out;
}

Dataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels) {
  const IdxFile img = read_idx(images, 0x00000803);
  const IdxFile lbl = read_idx(labels, 0x00000801);
  if (img.dims[0] != lbl.dims[0])
    throw IdxError("length mismatch: " + std::to_string(img.dims[0]) + " images but " + std::to_string(lbl.dims[0]) +
                   " labels");
  const std::size_t n = img.dims[0];
  const std::size_t pixels = n == 0 ? 0 : img.data.size() / n;
  Dataset d;
  d.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(std::size_t{img.dims[1]} * img.dims[2]));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < pixels; ++k)
      d.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = img.data[i * pixels + k] / 255.0;
  d.labels.assign(lbl.data.begin(), lbl.data.end());
  d.n_classes = d.labels.empty() ? 0 : static_cast<std::size_t>(*std::max_element(d.labels.begin(), d.labels.end())) + 1;
  return d;
}

Dataset subsample(const Dataset& d, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw std::invalid_argument("subsample fraction must lie in (0, 1]");
  if (fraction == 1.0) {
    std::vector<std::size_t> all(d.size());
    std::iota(all.begin(), all.end(), 0);
    return d.select(all);
  }
  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::size_t>> by_class(d.n_classes);
  for (std::size_t i = 0; i < d.size(); ++i) by_class.at(static_cast<std::size_t>(d.labels[i])).push_back(i);
  std::vector<std::size_t> keep;
  for (auto& members : by_class) {
    std::shuffle(members.begin(), members.end(), rng);
    const auto k = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(members.size())));
    keep.insert(keep.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(k));
  }
  std::sort(keep.begin(), keep.end());
  return d.select(keep);
}

}  // namespace dlogic
