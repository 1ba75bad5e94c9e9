// Copyright the soundtex authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SOUNDTEX_LABELS_HPP_
#define SOUNDTEX_LABELS_HPP_

#include <cstdint>
#include <vector>

#include "soundtex/filterbank.hpp"
#include "soundtex/matrix.hpp"
#include "soundtex/waveform.hpp"

namespace soundtex {

struct ClusterModel {
  int k = 0;
  std::size_t dim = 0;
  Matrix centroids;  // k x dim
  double inertia = 0.0;                 // final sum of squared distances
  std::vector<double> inertia_history;  // one entry per assignment pass
  int iterations_run = 0;
  std::uint64_t seed = 0;
};

struct Assignment {
  std::vector<int> labels;        // nearest centroid per row
  std::vector<double> distances;  // Euclidean distance to that centroid
};

enum class PruneMode {
  kPerCluster,  // median distance within each cluster
  kGlobal,      // single median over all rows
  kOff,
};

// Lloyd iterations from a k-means++ start. Ties in distance pick the
// lowest centroid index; clusters that empty out are reseeded to the
// point farthest from its current centroid. Deterministic in (X, k,
// seed): identical inputs give identical models.
ClusterModel kmeans_fit(const Matrix& x, int k, std::uint64_t seed,
                        int max_iterations = 100, double tolerance = 1e-6);

// Lloyd iterations from caller-supplied centroids (k x dim).
ClusterModel kmeans_refine(const Matrix& x, const Matrix& initial_centroids,
                           std::uint64_t seed, int max_iterations = 100,
                           double tolerance = 1e-6);

Assignment assign(const ClusterModel& model, const Matrix& x);

// Marks rows whose distance strictly exceeds the median distance of
// their pool (their own cluster, or all rows for kGlobal). kOff keeps
// everything. Roughly half of each pool survives by construction.
std::vector<bool> prune_outliers(const std::vector<int>& labels,
                                 const std::vector<double>& distances,
                                 PruneMode mode = PruneMode::kPerCluster);

struct PcaModel {
  std::size_t dim = 0;
  int n_components = 0;
  std::vector<double> mean;      // length dim
  Matrix components;             // n_components x dim, orthonormal rows
  std::vector<double> variances; // descending, nonnegative
};

// Principal axes of the rows of x via the dense eigendecomposition of
// the population covariance. Component signs are canonicalized so the
// coordinate of largest magnitude (lowest index on ties) is positive.
PcaModel pca_fit(const Matrix& x, int n_components);

// Bit i is 1 when the projection of (x - mean) on component i is
// strictly positive. Requires n_components <= 64.
std::uint64_t binary_encode(const PcaModel& model, const double* x,
                            std::size_t dim);
std::uint64_t binary_encode(const PcaModel& model, const std::vector<double>& x);

// Mean compressed envelope per channel over a short window (1/30 s)
// centered at t_center_s: a coarse spectrum snapshot.
std::vector<double> spectrum_feature(const Waveform& w,
                                     const CochlearFilterBank& bank,
                                     double t_center_s);
std::vector<double> spectrum_from_cochleagram(const Cochleagram& c,
                                              double t_center_s);

struct SweepEntry {
  int k = 0;
  ClusterModel model;
  std::size_t retained = 0;  // rows surviving per-cluster pruning
};

// Clustering solutions for several k values under one seed. Larger k
// never yields higher inertia than smaller k on the same data.
std::vector<SweepEntry> cluster_count_sweep(const Matrix& x,
                                            const std::vector<int>& ks,
                                            std::uint64_t seed);

}  // namespace soundtex

#endif  // SOUNDTEX_LABELS_HPP_
