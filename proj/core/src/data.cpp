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

#include "qtrojan/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <numeric>

#include <nlohmann/json.hpp>
#include <zlib.h>

#include "qtrojan/error.hpp"
#include "qtrojan/rng.hpp"

namespace qtrojan::data {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2;
// 2^31 bytes is far beyond any IDX file this tool reads; anything larger is a corrupt header.
constexpr std::uint64_t kMaxIdxPayload = std::uint64_t{1} << 31;

std::uint32_t read_be32(std::span<const std::uint8_t> b, std::size_t at) {
  return (std::uint32_t{b[at]} << 24) | (std::uint32_t{b[at + 1]} << 16) | (std::uint32_t{b[at + 2]} << 8) |
         std::uint32_t{b[at + 3]};
}

void write_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

}  // namespace

IdxArray parse_idx(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4) throw DataError("idx: truncated header (" + std::to_string(bytes.size()) + " bytes)");
  if (bytes[0] != 0 || bytes[1] != 0 || bytes[2] != 0x08 || bytes[3] == 0) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "idx: bad magic 0x%08x", read_be32(bytes, 0));
    throw DataError(buf);
  }
  const std::size_t ndims = bytes[3];
  const std::size_t header = 4 + 4 * ndims;
  if (bytes.size() < header) throw DataError("idx: truncated header");
  IdxArray out;
  std::uint64_t total = 1;
  for (std::size_t d = 0; d < ndims; ++d) {
    const std::uint32_t dim = read_be32(bytes, 4 + 4 * d);
    out.dims.push_back(dim);
    total *= dim;
    if (total > kMaxIdxPayload) throw DataError("idx: dimension overflow");
  }
  const std::uint64_t payload = bytes.size() - header;
  if (payload < total) {
    throw DataError("idx: truncated payload, expected " + std::to_string(total) + " bytes, got " +
                    std::to_string(payload));
  }
  if (payload > total) {
    throw DataError("idx: " + std::to_string(payload - total) + " trailing bytes after payload");
  }
  out.data.assign(bytes.begin() + static_cast<std::ptrdiff_t>(header), bytes.end());
  return out;
}

std::vector<std::uint8_t> serialize_idx(const IdxArray& array) {
  std::vector<std::uint8_t> out;
  out.reserve(4 + 4 * array.dims.size() + array.data.size());
  write_be32(out, array.magic());
  for (auto d : array.dims) write_be32(out, d);
  out.insert(out.end(), array.data.begin(), array.data.end());
  return out;
}

ImageSet parse_idx_images(std::span<const std::uint8_t> bytes) {
  IdxArray a = parse_idx(bytes);
  if (a.magic() != kIdxImagesMagic) throw DataError("idx: expected image magic 0x00000803");
  if (a.dims[1] != 28 || a.dims[2] != 28) {
    throw DataError("idx: expected 28x28 images, got " + std::to_string(a.dims[1]) + "x" + std::to_string(a.dims[2]));
  }
  return ImageSet{a.dims[0], a.dims[1], a.dims[2], std::move(a.data)};
}

std::vector<std::uint8_t> parse_idx_labels(std::span<const std::uint8_t> bytes) {
  IdxArray a = parse_idx(bytes);
  if (a.magic() != kIdxLabelsMagic) throw DataError("idx: expected label magic 0x00000801");
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    if (a.data[i] > 9) throw DataError("idx: label " + std::to_string(a.data[i]) + " at index " + std::to_string(i));
  }
  return std::move(a.data);
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  gzFile f = gzopen(path.string().c_str(), "rb");
  if (f == nullptr) throw DataError("cannot open " + path.string());
  std::vector<std::uint8_t> out;
  std::uint8_t buf[1 << 16];
  int got;
  while ((got = gzread(f, buf, sizeof buf)) > 0) out.insert(out.end(), buf, buf + got);
  int errnum = 0;
  const char* msg = gzerror(f, &errnum);
  gzclose(f);
  if (got < 0 || errnum < 0) throw DataError("read error in " + path.string() + ": " + msg);
  return out;
}

void Dataset::validate() const {
  const bool regression = !targets.empty();
  const std::size_t n = features.size();
  if (regression ? targets.size() != n || !labels.empty() : labels.size() != n) {
    throw ValidationError("dataset: label count does not match sample count");
  }
  for (const auto& row : features) {
    if (row.size() != features.front().size()) throw ValidationError("dataset: ragged feature rows");
  }
}

Dataset make_image_dataset(const ImageSet& images, std::span<const std::uint8_t> labels) {
  if (labels.size() != images.count) {
    throw DataError("idx: " + std::to_string(images.count) + " images but " + std::to_string(labels.size()) +
                    " labels");
  }
  Dataset ds;
  ds.features.reserve(images.count);
  for (std::size_t i = 0; i < images.count; ++i) {
    const auto img = images.image(i);
    ds.features.emplace_back(img.begin(), img.end());
    ds.labels.push_back(labels[i]);
  }
  ds.meta = "idx:" + std::to_string(images.count);
  return ds;
}

Dataset filter_classes(const Dataset& ds, std::span<const int> classes) {
  if (classes.empty()) throw ValidationError("filter_classes: no classes given");
  Dataset out;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto it = std::find(classes.begin(), classes.end(), ds.labels[i]);
    if (it == classes.end()) continue;
    out.features.push_back(ds.features[i]);
    out.labels.push_back(static_cast<int>(it - classes.begin()));
  }
  if (out.empty()) throw ValidationError("filter_classes: no samples match the requested classes");
  out.meta = ds.meta + "|classes:";
  for (std::size_t i = 0; i < classes.size(); ++i) out.meta += (i ? "," : "") + std::to_string(classes[i]);
  return out;
}

Dataset take_subset(const Dataset& ds, std::size_t n, std::uint64_t seed) {
  const auto perm = permutation(ds.size(), seed);
  n = std::min(n, ds.size());
  Dataset out;
  out.meta = ds.meta + "|subset:" + std::to_string(n) + "@" + std::to_string(seed);
  for (std::size_t i = 0; i < n; ++i) {
    out.features.push_back(ds.features[perm[i]]);
    if (ds.is_regression()) {
      out.targets.push_back(ds.targets[perm[i]]);
    } else {
      out.labels.push_back(ds.labels[perm[i]]);
    }
  }
  return out;
}

JacobiResult jacobi_eigen(std::vector<double> a, std::size_t n, double rel_tol, int max_sweeps) {
  if (a.size() != n * n) throw ValidationError("jacobi: matrix is not n x n");
  auto at = [&](std::size_t r, std::size_t c) -> double& { return a[r * n + c]; };

  double frob = 0.0;
  for (double v : a) frob += v * v;
  frob = std::sqrt(frob);

  std::vector<std::vector<double>> vec(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) vec[i][i] = 1.0;

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) s += at(p, q) * at(p, q);
    return std::sqrt(2.0 * s);
  };

  JacobiResult res;
  double off = off_norm();
  while (off > rel_tol * frob && res.sweeps < max_sweeps) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = at(p, q);
        if (apq == 0.0) continue;
        const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);
        at(p, p) -= t * apq;
        at(q, q) += t * apq;
        at(p, q) = at(q, p) = 0.0;
        double* rp = &a[p * n];
        double* rq = &a[q * n];
        for (std::size_t k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = rp[k];
          const double akq = rq[k];
          rp[k] = akp - s * (akq + tau * akp);
          rq[k] = akq + s * (akp - tau * akq);
          a[k * n + p] = rp[k];
          a[k * n + q] = rq[k];
        }
        auto& vp = vec[p];
        auto& vq = vec[q];
        for (std::size_t k = 0; k < n; ++k) {
          const double x = vp[k];
          const double y = vq[k];
          vp[k] = x - s * (y + tau * x);
          vq[k] = y + s * (x - tau * y);
        }
      }
    }
    ++res.sweeps;
    off = off_norm();
  }
  res.off_norm = off;
  res.eigenvalues.resize(n);
  for (std::size_t i = 0; i < n; ++i) res.eigenvalues[i] = at(i, i);
  res.eigenvectors = std::move(vec);
  return res;
}

PcaModel pca_fit(const std::vector<std::vector<double>>& rows, std::size_t k) {
  if (rows.empty()) throw ValidationError("pca_fit: no training rows");
  const std::size_t d = rows.front().size();
  if (k < 1 || k > d) throw ValidationError("pca_fit: k=" + std::to_string(k) + " outside [1, " + std::to_string(d) + "]");
  if (rows.size() < k) {
    throw ValidationError("pca_fit: need at least k=" + std::to_string(k) + " rows, got " + std::to_string(rows.size()));
  }
  const double inv_n = 1.0 / static_cast<double>(rows.size());

  PcaModel m;
  m.mean.assign(d, 0.0);
  for (const auto& r : rows) {
    if (r.size() != d) throw ValidationError("pca_fit: ragged rows");
    for (std::size_t j = 0; j < d; ++j) m.mean[j] += r[j];
  }
  for (auto& v : m.mean) v *= inv_n;

  std::vector<double> cov(d * d, 0.0);
  std::vector<double> centred(d);
  for (const auto& r : rows) {
    for (std::size_t j = 0; j < d; ++j) centred[j] = r[j] - m.mean[j];
    for (std::size_t i = 0; i < d; ++i) {
      const double ci = centred[i];
      if (ci == 0.0) continue;
      double* row = &cov[i * d];
      for (std::size_t j = i; j < d; ++j) row[j] += ci * centred[j];
    }
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      cov[i * d + j] *= inv_n;
      cov[j * d + i] = cov[i * d + j];
    }
    m.total_variance += cov[i * d + i];
  }

  JacobiResult eig = jacobi_eigen(std::move(cov), d);
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return eig.eigenvalues[x] > eig.eigenvalues[y]; });

  for (std::size_t c = 0; c < k; ++c) {
    auto v = eig.eigenvectors[order[c]];
    std::size_t big = 0;
    for (std::size_t j = 1; j < d; ++j) {
      if (std::abs(v[j]) > std::abs(v[big])) big = j;
    }
    if (v[big] < 0) {
      for (auto& x : v) x = -x;
    }
    m.components.push_back(std::move(v));
    m.explained_variance.push_back(std::max(0.0, eig.eigenvalues[order[c]]));
  }

  m.feature_min.assign(k, std::numeric_limits<double>::infinity());
  m.feature_max.assign(k, -std::numeric_limits<double>::infinity());
  for (const auto& r : rows) {
    const auto p = pca_project(m, r);
    for (std::size_t c = 0; c < k; ++c) {
      m.feature_min[c] = std::min(m.feature_min[c], p[c]);
      m.feature_max[c] = std::max(m.feature_max[c], p[c]);
    }
  }
  return m;
}

std::vector<double> pca_project(const PcaModel& model, std::span<const double> x) {
  if (x.size() != model.dim()) {
    throw ValidationError("pca_project: expected " + std::to_string(model.dim()) + " inputs, got " +
                          std::to_string(x.size()));
  }
  std::vector<double> out(model.k(), 0.0);
  for (std::size_t c = 0; c < model.k(); ++c) {
    const auto& comp = model.components[c];
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) s += comp[j] * (x[j] - model.mean[j]);
    out[c] = s;
  }
  return out;
}

std::vector<double> scale_features(std::span<const double> projected, const PcaModel& model) {
  if (projected.size() != model.k()) throw ValidationError("scale_features: length does not match component count");
  std::vector<double> out(projected.size());
  for (std::size_t c = 0; c < projected.size(); ++c) {
    const double span = model.feature_max[c] - model.feature_min[c];
    const double u = span > 0 ? (projected[c] - model.feature_min[c]) / span : 0.0;
    out[c] = std::clamp(u, 0.0, 1.0) * kHalfPi;
  }
  return out;
}

Dataset transform(const Dataset& ds, const PcaModel& model) {
  Dataset out;
  out.labels = ds.labels;
  out.targets = ds.targets;
  out.meta = ds.meta + "|pca:" + std::to_string(model.k());
  out.features.reserve(ds.size());
  for (const auto& row : ds.features) out.features.push_back(scale_features(pca_project(model, row), model));
  return out;
}

Dataset gen_sin_sequences(int n_windows, int window_len, double step, double start) {
  if (window_len < 2) throw ValidationError("gen_sin_sequences: window_len must be >= 2");
  if (n_windows < 0) throw ValidationError("gen_sin_sequences: n_windows must be >= 0");
  Dataset ds;
  for (int w = 0; w < n_windows; ++w) {
    std::vector<double> f(static_cast<std::size_t>(window_len));
    for (int j = 0; j < window_len; ++j) {
      f[static_cast<std::size_t>(j)] = (std::sin(start + (w + j) * step) + 1.0) / 2.0;
    }
    ds.features.push_back(std::move(f));
    ds.targets.push_back(std::sin(start + (w + window_len) * step));
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "sin:n=%d,len=%d,step=%.17g,start=%.17g", n_windows, window_len, step, start);
  ds.meta = buf;
  return ds;
}

namespace {

using nlohmann::json;

json dataset_json(const Dataset& ds) {
  json j;
  j["features"] = ds.features;
  if (ds.is_regression()) {
    j["targets"] = ds.targets;
  } else {
    j["labels"] = ds.labels;
  }
  j["meta"] = ds.meta;
  return j;
}

Dataset dataset_from(const json& j) {
  Dataset ds;
  ds.features = j.at("features").get<std::vector<std::vector<double>>>();
  if (j.contains("targets")) ds.targets = j["targets"].get<std::vector<double>>();
  if (j.contains("labels")) ds.labels = j["labels"].get<std::vector<int>>();
  ds.meta = j.at("meta").get<std::string>();
  ds.validate();
  return ds;
}

}  // namespace

std::string prepared_to_json(const PreparedData& p) {
  json j;
  j["format"] = "qtrojan-dataset";
  j["version"] = 1;
  j["meta"] = p.meta;
  j["train"] = dataset_json(p.train);
  j["test"] = dataset_json(p.test);
  json pca;
  pca["mean"] = p.pca.mean;
  pca["components"] = p.pca.components;
  pca["explained_variance"] = p.pca.explained_variance;
  pca["total_variance"] = p.pca.total_variance;
  pca["feature_min"] = p.pca.feature_min;
  pca["feature_max"] = p.pca.feature_max;
  j["pca"] = std::move(pca);
  return j.dump() + "\n";
}

PreparedData prepared_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    if (j.at("format").get<std::string>() != "qtrojan-dataset") throw DataError("dataset cache: field 'format'");
    if (j.at("version").get<int>() != 1) throw DataError("dataset cache: unsupported field 'version'");
    PreparedData p;
    p.meta = j.at("meta").get<std::string>();
    p.train = dataset_from(j.at("train"));
    p.test = dataset_from(j.at("test"));
    const auto& pca = j.at("pca");
    p.pca.mean = pca.at("mean").get<std::vector<double>>();
    p.pca.components = pca.at("components").get<std::vector<std::vector<double>>>();
    p.pca.explained_variance = pca.at("explained_variance").get<std::vector<double>>();
    p.pca.total_variance = pca.at("total_variance").get<double>();
    p.pca.feature_min = pca.at("feature_min").get<std::vector<double>>();
    p.pca.feature_max = pca.at("feature_max").get<std::vector<double>>();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("dataset cache: ") + e.what());
  }
}

std::string content_hash(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace qtrojan::data
