// Copyright the soundtex authors
// SPDX-License-Identifier: Apache-2.0

#include "soundtex/labels.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <vector>

#include "soundtex/errors.hpp"
#include "soundtex/rng.hpp"
#include "soundtex/util.hpp"

namespace soundtex {

namespace {

double squared_distance(const double* a, const double* b, std::size_t dim) {
  double sum = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

void require_finite_matrix(const Matrix& x, const char* what) {
  for (double v : x.data) {
    if (!std::isfinite(v)) {
      throw InvalidInputError(std::string(what) + ": non-finite entry");
    }
  }
}

// Nearest centroid per row; ties pick the lowest centroid index.
void assign_rows(const Matrix& x, const Matrix& centroids,
                 std::vector<int>* labels, std::vector<double>* dist_sq) {
  const std::size_t n = x.rows;
  const std::size_t k = centroids.rows;
  for (std::size_t i = 0; i < n; ++i) {
    const double* xi = x.row(i);
    int best = 0;
    double best_d = squared_distance(xi, centroids.row(0), x.cols);
    for (std::size_t j = 1; j < k; ++j) {
      const double d = squared_distance(xi, centroids.row(j), x.cols);
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(j);
      }
    }
    (*labels)[i] = best;
    (*dist_sq)[i] = best_d;
  }
}

Matrix kmeanspp_init(const Matrix& x, int k, Rng* rng) {
  const std::size_t n = x.rows;
  Matrix centroids(static_cast<std::size_t>(k), x.cols);
  const std::size_t first = rng->uniform_index(n);
  std::copy(x.row(first), x.row(first) + x.cols, centroids.row(0));
  std::vector<double> dist_sq(n);
  for (std::size_t i = 0; i < n; ++i) {
    dist_sq[i] = squared_distance(x.row(i), centroids.row(0), x.cols);
  }
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (double d : dist_sq) total += d;
    std::size_t chosen;
    if (total > 0.0) {
      // Sample proportionally to squared distance from the chosen set.
      const double target = rng->uniform() * total;
      double cumulative = 0.0;
      chosen = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        cumulative += dist_sq[i];
        if (cumulative > target) {
          chosen = i;
          break;
        }
      }
    } else {
      chosen = rng->uniform_index(n);  // all remaining points are duplicates
    }
    std::copy(x.row(chosen), x.row(chosen) + x.cols,
              centroids.row(static_cast<std::size_t>(c)));
    for (std::size_t i = 0; i < n; ++i) {
      dist_sq[i] = std::min(
          dist_sq[i],
          squared_distance(x.row(i), centroids.row(static_cast<std::size_t>(c)),
                           x.cols));
    }
  }
  return centroids;
}

ClusterModel lloyd(const Matrix& x, Matrix centroids, std::uint64_t seed,
                   int max_iterations, double tolerance) {
  const std::size_t n = x.rows;
  const std::size_t dim = x.cols;
  const int k = static_cast<int>(centroids.rows);
  ClusterModel model;
  model.k = k;
  model.dim = dim;
  model.seed = seed;
  std::vector<int> labels(n);
  std::vector<double> dist_sq(n);
  auto pass = [&]() {
    assign_rows(x, centroids, &labels, &dist_sq);
    double inertia = 0.0;
    for (double d : dist_sq) inertia += d;
    model.inertia_history.push_back(inertia);
    return inertia;
  };
  double previous = pass();
  for (int iter = 1; iter <= max_iterations; ++iter) {
    // Centroid update: mean of assigned rows.
    Matrix sums(static_cast<std::size_t>(k), dim, 0.0);
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = static_cast<std::size_t>(labels[i]);
      const double* xi = x.row(i);
      double* s = sums.row(c);
      for (std::size_t d = 0; d < dim; ++d) s[d] += xi[d];
      ++counts[c];
    }
    std::vector<bool> reseeded(n, false);
    for (int c = 0; c < k; ++c) {
      const auto cs = static_cast<std::size_t>(c);
      if (counts[cs] > 0) {
        double* dst = centroids.row(cs);
        const double* s = sums.row(cs);
        const double inv = 1.0 / static_cast<double>(counts[cs]);
        for (std::size_t d = 0; d < dim; ++d) dst[d] = s[d] * inv;
      } else {
        // Reseed an empty cluster to the point currently farthest from
        // its centroid; lowest index wins ties, and a point is used at
        // most once per update pass.
        std::size_t farthest = n;
        double best = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
          if (!reseeded[i] && dist_sq[i] > best) {
            best = dist_sq[i];
            farthest = i;
          }
        }
        reseeded[farthest] = true;
        std::copy(x.row(farthest), x.row(farthest) + dim, centroids.row(cs));
      }
    }
    const double current = pass();
    model.iterations_run = iter;
    if (current > previous * (1.0 + 1e-9) + 1e-12) {
      throw Error("kmeans: inertia increased between assignment passes");
    }
    if (previous - current <= tolerance * previous) break;
    previous = current;
  }
  model.centroids = std::move(centroids);
  model.inertia = model.inertia_history.back();
  return model;
}

}  // namespace

ClusterModel kmeans_fit(const Matrix& x, int k, std::uint64_t seed,
                        int max_iterations, double tolerance) {
  if (k < 2) throw InvalidConfigError("kmeans: k must be at least 2");
  if (x.rows < static_cast<std::size_t>(k)) {
    throw InvalidInputError("kmeans: fewer rows than clusters");
  }
  if (x.cols == 0) throw InvalidInputError("kmeans: zero-dimensional rows");
  if (max_iterations < 1) throw InvalidConfigError("kmeans: need at least 1 iteration");
  require_finite_matrix(x, "kmeans");
  Rng rng(seed);
  return lloyd(x, kmeanspp_init(x, k, &rng), seed, max_iterations, tolerance);
}

ClusterModel kmeans_refine(const Matrix& x, const Matrix& initial_centroids,
                           std::uint64_t seed, int max_iterations,
                           double tolerance) {
  if (initial_centroids.rows < 2) {
    throw InvalidConfigError("kmeans: k must be at least 2");
  }
  if (initial_centroids.cols != x.cols) {
    throw InvalidInputError("kmeans: centroid dimension mismatch");
  }
  if (x.rows < initial_centroids.rows) {
    throw InvalidInputError("kmeans: fewer rows than clusters");
  }
  require_finite_matrix(x, "kmeans");
  return lloyd(x, initial_centroids, seed, max_iterations, tolerance);
}

Assignment assign(const ClusterModel& model, const Matrix& x) {
  if (x.cols != model.dim) throw InvalidInputError("assign: dimension mismatch");
  require_finite_matrix(x, "assign");
  Assignment out;
  out.labels.resize(x.rows);
  out.distances.resize(x.rows);
  std::vector<double> dist_sq(x.rows);
  assign_rows(x, model.centroids, &out.labels, &dist_sq);
  for (std::size_t i = 0; i < x.rows; ++i) out.distances[i] = std::sqrt(dist_sq[i]);
  return out;
}

std::vector<bool> prune_outliers(const std::vector<int>& labels,
                                 const std::vector<double>& distances,
                                 PruneMode mode) {
  if (labels.size() != distances.size()) {
    throw InvalidInputError("prune: labels and distances differ in length");
  }
  const std::size_t n = labels.size();
  std::vector<bool> pruned(n, false);
  if (mode == PruneMode::kOff || n == 0) return pruned;
  if (mode == PruneMode::kGlobal) {
    const double cutoff = median_of(distances);
    for (std::size_t i = 0; i < n; ++i) pruned[i] = distances[i] > cutoff;
    return pruned;
  }
  std::map<int, std::vector<double>> pools;
  for (std::size_t i = 0; i < n; ++i) pools[labels[i]].push_back(distances[i]);
  std::map<int, double> cutoffs;
  for (auto& [label, pool] : pools) cutoffs[label] = median_of(std::move(pool));
  for (std::size_t i = 0; i < n; ++i) {
    pruned[i] = distances[i] > cutoffs[labels[i]];
  }
  return pruned;
}

PcaModel pca_fit(const Matrix& x, int n_components) {
  if (n_components < 1) throw InvalidConfigError("pca: need at least 1 component");
  if (x.cols == 0) throw InvalidInputError("pca: zero-dimensional rows");
  if (static_cast<std::size_t>(n_components) > x.cols) {
    throw InvalidConfigError("pca: more components than dimensions");
  }
  if (x.rows < static_cast<std::size_t>(n_components) + 1) {
    throw InvalidInputError("pca: need at least n_components + 1 rows");
  }
  require_finite_matrix(x, "pca");
  const std::size_t n = x.rows;
  const std::size_t dim = x.cols;
  using RowMajor =
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RowMajor> data(x.data.data(), n, dim);
  Eigen::RowVectorXd mean = data.colwise().mean();
  Eigen::MatrixXd centered = data.rowwise() - mean;
  // Population covariance (divide by n, not n - 1).
  Eigen::MatrixXd covariance =
      (centered.transpose() * centered) / static_cast<double>(n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(covariance);
  if (solver.info() != Eigen::Success) {
    throw Error("pca: eigendecomposition failed");
  }
  PcaModel model;
  model.dim = dim;
  model.n_components = n_components;
  model.mean.assign(mean.data(), mean.data() + dim);
  model.components = Matrix(static_cast<std::size_t>(n_components), dim);
  model.variances.resize(n_components);
  // Eigen returns ascending eigenvalues; take the top ones in
  // descending order.
  for (int c = 0; c < n_components; ++c) {
    const auto source = static_cast<Eigen::Index>(dim - 1 - c);
    model.variances[c] = std::max(0.0, solver.eigenvalues()(source));
    Eigen::VectorXd v = solver.eigenvectors().col(source);
    // Canonical sign: the entry of largest magnitude (lowest index on
    // ties) is made positive.
    Eigen::Index anchor = 0;
    double largest = std::abs(v(0));
    for (Eigen::Index i = 1; i < v.size(); ++i) {
      if (std::abs(v(i)) > largest) {
        largest = std::abs(v(i));
        anchor = i;
      }
    }
    if (v(anchor) < 0.0) v = -v;
    for (std::size_t d = 0; d < dim; ++d) model.components(c, d) = v(d);
  }
  return model;
}

std::uint64_t binary_encode(const PcaModel& model, const double* x,
                            std::size_t dim) {
  if (dim != model.dim) throw InvalidInputError("encode: dimension mismatch");
  if (model.n_components > 64) {
    throw InvalidConfigError("encode: more than 64 components");
  }
  std::uint64_t code = 0;
  for (int c = 0; c < model.n_components; ++c) {
    const double* component = model.components.row(c);
    double projection = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
      projection += component[d] * (x[d] - model.mean[d]);
    }
    if (projection > 0.0) code |= (std::uint64_t{1} << c);
  }
  return code;
}

std::uint64_t binary_encode(const PcaModel& model, const std::vector<double>& x) {
  return binary_encode(model, x.data(), x.size());
}

std::vector<double> spectrum_from_cochleagram(const Cochleagram& c,
                                              double t_center_s) {
  const std::size_t frames = c.frames();
  if (frames == 0 || c.channels() == 0) {
    throw InvalidInputError("spectrum: empty cochleagram");
  }
  // Window of 1/30 s on the envelope grid, rounded to whole frames.
  const auto width = static_cast<std::int64_t>(
      std::max(1L, std::lround(c.env_rate / 30.0)));
  const auto start = static_cast<std::int64_t>(
      std::lround((t_center_s - 1.0 / 60.0) * c.env_rate));
  if (start < 0 || start + width > static_cast<std::int64_t>(frames)) {
    throw OutOfRangeError("spectrum: window extends past the clip");
  }
  std::vector<double> feature(c.channels());
  for (int ch = 0; ch < c.channels(); ++ch) {
    const double* row = c.envelopes.row(ch);
    double sum = 0.0;
    for (std::int64_t t = start; t < start + width; ++t) sum += row[t];
    feature[ch] = sum / static_cast<double>(width);
  }
  return feature;
}

std::vector<double> spectrum_feature(const Waveform& w,
                                     const CochlearFilterBank& bank,
                                     double t_center_s) {
  return spectrum_from_cochleagram(compute_cochleagram(w, bank), t_center_s);
}

std::vector<SweepEntry> cluster_count_sweep(const Matrix& x,
                                            const std::vector<int>& ks,
                                            std::uint64_t seed) {
  if (ks.empty()) throw InvalidConfigError("sweep: empty k list");
  for (int k : ks) {
    if (k < 2) throw InvalidConfigError("sweep: k must be at least 2");
    if (static_cast<std::size_t>(k) > x.rows) {
      throw InvalidInputError("sweep: k exceeds row count");
    }
  }
  std::vector<int> order(ks.size());
  for (std::size_t i = 0; i < ks.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(),
            [&ks](int a, int b) { return ks[a] < ks[b]; });
  std::vector<SweepEntry> results(ks.size());
  const ClusterModel* predecessor = nullptr;
  for (int slot_index : order) {
    const int k = ks[static_cast<std::size_t>(slot_index)];
    std::vector<ClusterModel> candidates;
    for (std::uint64_t restart = 0; restart < 3; ++restart) {
      candidates.push_back(kmeans_fit(
          x, k, mix_seed(seed, static_cast<std::uint64_t>(k) * 4 + restart)));
    }
    if (predecessor != nullptr && predecessor->k < k) {
      // Warm start from the best smaller solution, padded with the
      // rows farthest from their centroids, so the sweep's inertia is
      // nonincreasing in k even when fresh restarts land badly.
      Matrix init(static_cast<std::size_t>(k), x.cols);
      for (int c = 0; c < predecessor->k; ++c) {
        std::copy(predecessor->centroids.row(c),
                  predecessor->centroids.row(c) + x.cols, init.row(c));
      }
      Assignment base = assign(*predecessor, x);
      std::vector<std::size_t> rows(x.rows);
      for (std::size_t i = 0; i < x.rows; ++i) rows[i] = i;
      std::sort(rows.begin(), rows.end(), [&base](std::size_t a, std::size_t b) {
        if (base.distances[a] != base.distances[b]) {
          return base.distances[a] > base.distances[b];
        }
        return a < b;
      });
      for (int c = predecessor->k; c < k; ++c) {
        const std::size_t source = rows[static_cast<std::size_t>(c - predecessor->k)];
        std::copy(x.row(source), x.row(source) + x.cols, init.row(c));
      }
      candidates.push_back(
          kmeans_refine(x, init, mix_seed(seed, static_cast<std::uint64_t>(k) * 4 + 3)));
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < candidates.size(); ++i) {
      if (candidates[i].inertia < candidates[best].inertia) best = i;
    }
    SweepEntry entry;
    entry.k = k;
    entry.model = std::move(candidates[best]);
    const Assignment asg = assign(entry.model, x);
    const std::vector<bool> pruned =
        prune_outliers(asg.labels, asg.distances, PruneMode::kPerCluster);
    entry.retained = 0;
    for (bool p : pruned) {
      if (!p) ++entry.retained;
    }
    results[static_cast<std::size_t>(slot_index)] = std::move(entry);
    predecessor = &results[static_cast<std::size_t>(slot_index)].model;
  }
  return results;
}

}  // namespace soundtex
