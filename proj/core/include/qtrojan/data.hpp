// Copyright 2026 The qtrojan-sim Authors
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

// Dataset ingestion: IDX parsing, PCA down-sampling, feature scaling, class
// filtering and the sin-sequence regression set.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace qtrojan::data {

inline constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

/// An unsigned-byte IDX tensor.
struct IdxArray {
  std::vector<std::uint32_t> dims;
  std::vector<std::uint8_t> data;

  std::uint32_t magic() const { return 0x00000800u | static_cast<std::uint32_t>(dims.size()); }
};

/// Parses an unsigned-byte IDX stream (magic 0x000008NN). The payload length must
/// equal the product of the dimensions exactly.
IdxArray parse_idx(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> serialize_idx(const IdxArray& array);

struct ImageSet {
  std::size_t count = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> pixels;  // count * rows * cols, row-major

  std::span<const std::uint8_t> image(std::size_t i) const {
    return std::span(pixels).subspan(i * rows * cols, rows * cols);
  }
};

/// Requires magic 0x00000803 and 28x28 images.
ImageSet parse_idx_images(std::span<const std::uint8_t> bytes);
/// Requires magic 0x00000801 and every label <= 9.
std::vector<std::uint8_t> parse_idx_labels(std::span<const std::uint8_t> bytes);

/// Whole file, transparently gunzipped when it starts with the gzip magic.
std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);

struct Dataset {
  std::vector<std::vector<double>> features;
  std::vector<int> labels;      // classification
  std::vector<double> targets;  // regression
  std::string meta;

  std::size_t size() const { return features.size(); }
  bool empty() const { return features.empty(); }
  bool is_regression() const { return !targets.empty(); }
  std::size_t n_features() const { return features.empty() ? 0 : features.front().size(); }
  /// Throws ValidationError when the invariants (equal lengths, one label per row) fail.
  void validate() const;
};

Dataset make_image_dataset(const ImageSet& images, std::span<const std::uint8_t> labels);

/// Keeps samples whose label is in `classes` and relabels them 0..C-1 in the given order.
Dataset filter_classes(const Dataset& ds, std::span<const int> classes);

/// First n samples of a seeded permutation (all samples when n >= size).
Dataset take_subset(const Dataset& ds, std::size_t n, std::uint64_t seed);

struct JacobiResult {
  std::vector<double> eigenvalues;                // unsorted, one per row of eigenvectors
  std::vector<std::vector<double>> eigenvectors;  // eigenvectors[i] pairs with eigenvalues[i]
  int sweeps = 0;
  double off_norm = 0.0;
};

/// Cyclic Jacobi on a symmetric n x n row-major matrix. Sweeps until the off-diagonal
/// Frobenius norm is <= rel_tol * ||A||_F.
JacobiResult jacobi_eigen(std::vector<double> matrix, std::size_t n, double rel_tol = 1e-10, int max_sweeps = 100);

struct PcaModel {
  std::vector<double> mean;                     // input units
  std::vector<std::vector<double>> components;  // k orthonormal rows
  std::vector<double> explained_variance;       // eigenvalue per component
  double total_variance = 0.0;                  // trace of the covariance
  std::vector<double> feature_min;              // per component, over the fit set
  std::vector<double> feature_max;

  std::size_t k() const { return components.size(); }
  std::size_t dim() const { return mean.size(); }
};

/// Mean-centred (population) covariance, Jacobi eigendecomposition, top-k components
/// by eigenvalue with each sign-normalised so its largest-magnitude entry is positive.
PcaModel pca_fit(const std::vector<std::vector<double>>& rows, std::size_t k);

/// components^T (x - mean)
std::vector<double> pca_project(const PcaModel& model, std::span<const double> x);

/// Per-component min-max scaling into [0, pi/2], clipping out-of-range values.
std::vector<double> scale_features(std::span<const double> projected, const PcaModel& model);

/// Projects and scales every row of `ds`.
Dataset transform(const Dataset& ds, const PcaModel& model);

/// Windows over sin(start + j * step): features are window_len consecutive samples
/// mapped to [0, 1] by (v + 1) / 2; the target is the following raw sample.
Dataset gen_sin_sequences(int n_windows, int window_len, double step, double start = 0.0);

/// Train/test pair plus the fitted projection, as stored in the dataset cache file.
struct PreparedData {
  Dataset train;
  Dataset test;
  PcaModel pca;  // empty for regression tasks
  std::string meta;
};

std::string prepared_to_json(const PreparedData& prepared);
PreparedData prepared_from_json(const std::string& text);
/// FNV-1a over the JSON body; recorded in `meta` fields and reports.
std::string content_hash(const std::string& text);

}  // namespace qtrojan::data
