// Copyright the soundtex authors
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance gate: ten behavioral checks with pinned tolerances and
// wall-clock budgets. Prints one PASS/FAIL line per check and exits
// with the number of failures, so it doubles as a release smoke test.
// Optional arguments select a subset of checks by number.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "soundtex/errors.hpp"
#include "soundtex/filterbank.hpp"
#include "soundtex/labels.hpp"
#include "soundtex/matrix.hpp"
#include "soundtex/probe.hpp"
#include "soundtex/rng.hpp"
#include "soundtex/store.hpp"
#include "soundtex/texture.hpp"
#include "soundtex/wav.hpp"
#include "soundtex/waveform.hpp"

using namespace soundtex;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string strf(const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, args);
  va_end(args);
  return buf;
}

// Collects failure notes for one criterion; ok flips on the first
// unmet requirement but later requirements still run and report.
struct Gate {
  bool ok = true;
  std::vector<std::string> notes;

  void require(bool condition, const std::string& what) {
    if (!condition) {
      ok = false;
      if (notes.size() < 20) notes.push_back(what);
    }
  }
};

using CriterionFn = void (*)(Gate&);

bool run_criterion(int id, const char* title, double budget_s, CriterionFn fn,
                   const std::set<int>& only) {
  if (!only.empty() && only.count(id) == 0) {
    std::printf("[%2d] SKIP            %s\n", id, title);
    std::fflush(stdout);
    return true;
  }
  Gate gate;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    fn(gate);
  } catch (const std::exception& e) {
    gate.require(false, std::string("unexpected exception: ") + e.what());
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  if (elapsed > budget_s) {
    gate.require(false,
                 strf("took %.2f s, budget is %.0f s", elapsed, budget_s));
  }
  std::printf("[%2d] %s (%6.2f s)  %s\n", id, gate.ok ? "PASS" : "FAIL",
              elapsed, title);
  for (const std::string& note : gate.notes) {
    std::printf("       - %s\n", note.c_str());
  }
  std::fflush(stdout);
  return gate.ok;
}

// ---------------------------------------------------------------- synthesis

Waveform noise_wave(double seconds, int rate, std::uint64_t seed) {
  Waveform w;
  w.sample_rate = rate;
  Rng rng(seed);
  w.samples.resize(static_cast<std::size_t>(std::llround(seconds * rate)));
  for (auto& v : w.samples) v = rng.uniform(-0.9, 0.9);
  return w;
}

// Broadband click train: one shared impulse pattern drives every
// channel at once, so neighboring envelopes move together.
Waveform click_train(double seconds, int rate, std::uint64_t seed) {
  Waveform w;
  w.sample_rate = rate;
  Rng rng(seed);
  w.samples.assign(static_cast<std::size_t>(std::llround(seconds * rate)), 0.0);
  std::size_t t = 200;
  while (t < w.samples.size()) {
    w.samples[t] = rng.uniform(0.5, 1.0);
    t += 1000 + rng.uniform_index(3000);
  }
  return w;
}

Waveform am_noise(double seconds, int rate, double mod_hz, std::uint64_t seed) {
  Waveform w = noise_wave(seconds, rate, seed);
  for (std::size_t i = 0; i < w.samples.size(); ++i) {
    const double t = static_cast<double>(i) / rate;
    w.samples[i] *= 0.5 * (1.0 + 0.8 * std::sin(2.0 * kPi * mod_hz * t));
  }
  return w;
}

CochlearFilterBank default_bank() {
  return make_cochlear_filterbank(32, 20.0, 10000.0, 4096, 20000);
}

ModulationFilterBank default_mod_bank() {
  return make_modulation_filterbank(10, 0.5, 200.0, 1500);
}

// Mean absolute channel correlation, with the 1/117 block scaling
// multiplied back out of the flattened vector.
double mean_abs_rho(const SoundTexture& t) {
  double sum = 0.0;
  for (std::size_t i = 64; i < 64 + 117; ++i) {
    sum += std::abs(t.values[i] * 117.0);
  }
  return sum / 117.0;
}

// ------------------------------------------------------------ label oracles

// Adjusted Rand index between two labelings, from the pair-counting
// contingency table. 1 means identical partitions up to renaming.
double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  const int ka = *std::max_element(a.begin(), a.end()) + 1;
  const int kb = *std::max_element(b.begin(), b.end()) + 1;
  std::vector<std::vector<std::size_t>> table(ka, std::vector<std::size_t>(kb, 0));
  for (std::size_t i = 0; i < a.size(); ++i) table[a[i]][b[i]]++;
  auto choose2 = [](std::size_t m) {
    return static_cast<double>(m) * (static_cast<double>(m) - 1.0) / 2.0;
  };
  double sum_cells = 0.0, sum_rows = 0.0, sum_cols = 0.0;
  for (int i = 0; i < ka; ++i) {
    std::size_t row = 0;
    for (int j = 0; j < kb; ++j) {
      sum_cells += choose2(table[i][j]);
      row += table[i][j];
    }
    sum_rows += choose2(row);
  }
  for (int j = 0; j < kb; ++j) {
    std::size_t col = 0;
    for (int i = 0; i < ka; ++i) col += table[i][j];
    sum_cols += choose2(col);
  }
  const double expected = sum_rows * sum_cols / choose2(a.size());
  const double max_index = 0.5 * (sum_rows + sum_cols);
  return (sum_cells - expected) / (max_index - expected);
}

struct BlobData {
  Matrix x;
  std::vector<int> truth;
};

// Three tight Gaussian blobs at mutual distance ~10 in a few dims.
BlobData make_blobs(std::size_t per_blob, std::size_t dim, std::uint64_t seed,
                    double spread = 0.01) {
  BlobData d;
  d.x = Matrix(3 * per_blob, dim);
  d.truth.resize(3 * per_blob);
  Rng rng(seed);
  const double centers[3][2] = {{0.0, 0.0}, {10.0, 0.0}, {0.0, 10.0}};
  for (std::size_t i = 0; i < 3 * per_blob; ++i) {
    const std::size_t blob = i / per_blob;
    d.truth[i] = static_cast<int>(blob);
    for (std::size_t j = 0; j < dim; ++j) {
      const double base = j < 2 ? centers[blob][j] : 0.0;
      d.x(i, j) = base + spread * rng.normal();
    }
  }
  return d;
}

// Classical Jacobi rotation eigensolver for small symmetric matrices;
// returns eigenvalues descending with matching eigenvector columns.
void jacobi_eigen(std::vector<std::vector<double>> a,
                  std::vector<double>& values,
                  std::vector<std::vector<double>>& vectors) {
  const std::size_t n = a.size();
  vectors.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) vectors[i][i] = 1.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    }
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t i = 0; i < n; ++i) {
          const double aip = a[i][p], aiq = a[i][q];
          a[i][p] = c * aip - s * aiq;
          a[i][q] = s * aip + c * aiq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double api = a[p][i], aqi = a[q][i];
          a[p][i] = c * api - s * aqi;
          a[q][i] = s * api + c * aqi;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double vip = vectors[i][p], viq = vectors[i][q];
          vectors[i][p] = c * vip - s * viq;
          vectors[i][q] = s * vip + c * viq;
        }
      }
    }
  }
  values.resize(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = a[i][i];
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t l, std::size_t r) { return values[l] > values[r]; });
  std::vector<double> sorted_values(n);
  std::vector<std::vector<double>> sorted_vectors(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    sorted_values[i] = values[order[i]];
    for (std::size_t r = 0; r < n; ++r) {
      sorted_vectors[r][i] = vectors[r][order[i]];
    }
  }
  values = sorted_values;
  vectors = sorted_vectors;
}

std::vector<std::vector<double>> covariance_of(const Matrix& x) {
  const std::size_t n = x.rows, d = x.cols;
  std::vector<double> mean(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) mean[j] += x(i, j);
  }
  for (double& m : mean) m /= static_cast<double>(n);
  std::vector<std::vector<double>> cov(d, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t p = 0; p < d; ++p) {
      for (std::size_t q = 0; q < d; ++q) {
        cov[p][q] += (x(i, p) - mean[p]) * (x(i, q) - mean[q]);
      }
    }
  }
  for (auto& row : cov) {
    for (double& v : row) v /= static_cast<double>(n);
  }
  return cov;
}

// ------------------------------------------------------------- wav fixtures

using Bytes = std::vector<std::uint8_t>;

void push_u16(Bytes& b, std::uint16_t v) {
  b.push_back(static_cast<std::uint8_t>(v & 0xFF));
  b.push_back(static_cast<std::uint8_t>(v >> 8));
}

void push_u32(Bytes& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) {
    b.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
  }
}

void push_tag(Bytes& b, const char* tag) { b.insert(b.end(), tag, tag + 4); }

Bytes wav_bytes(std::uint16_t format, std::uint16_t channels,
                std::uint32_t rate, std::uint16_t bits, const Bytes& payload) {
  Bytes b;
  push_tag(b, "RIFF");
  push_u32(b, static_cast<std::uint32_t>(4 + 24 + 8 + payload.size()));
  push_tag(b, "WAVE");
  push_tag(b, "fmt ");
  push_u32(b, 16);
  push_u16(b, format);
  push_u16(b, channels);
  push_u32(b, rate);
  push_u32(b, rate * channels * bits / 8);
  push_u16(b, static_cast<std::uint16_t>(channels * bits / 8));
  push_u16(b, bits);
  push_tag(b, "data");
  push_u32(b, static_cast<std::uint32_t>(payload.size()));
  b.insert(b.end(), payload.begin(), payload.end());
  return b;
}

// ----------------------------------------------------------------- criteria

// 1. Default texture vectors are 502-dimensional, and the block sizes
//    add up to that by independent counting.
void criterion_dimension(Gate& g) {
  std::size_t correlations = 0;
  for (int offset : {1, 2, 3, 5}) correlations += 32 - offset;
  const std::size_t by_count = 32 + 32 + correlations + 32 * 10 + 1;
  g.require(by_count == 502,
            strf("block counting gives %zu, not 502", by_count));

  const TextureShape shape;
  g.require(shape.dimension() == 502,
            strf("declared dimension is %zu", shape.dimension()));
  g.require(shape.correlation_count() == correlations,
            "correlation block size disagrees with counting");

  const auto bank = default_bank();
  const auto mod_bank = default_mod_bank();
  const SoundTexture t =
      texture_for_window(noise_wave(5.0, 20000, 7), bank, mod_bank, 2.5);
  g.require(t.values.size() == 502,
            strf("extracted vector has %zu entries", t.values.size()));
}

// 2. Scaling a clip by 0.1x or 10x moves only the loudness coordinate;
//    loudness itself follows the 0.3-power of the gain.
void criterion_gain_invariance(Gate& g) {
  constexpr double kRelTol = 1e-6;
  const auto bank = default_bank();
  const auto mod_bank = default_mod_bank();
  for (int clip = 0; clip < 20; ++clip) {
    const Waveform w = noise_wave(5.0, 20000, 100 + clip);
    const SoundTexture base = texture_for_window(w, bank, mod_bank, 2.5);
    for (const double gain : {0.1, 10.0}) {
      Waveform scaled = w;
      for (auto& v : scaled.samples) v *= gain;
      const SoundTexture t = texture_for_window(scaled, bank, mod_bank, 2.5);
      double worst = 0.0;
      std::size_t worst_at = 0;
      for (std::size_t j = 0; j + 1 < t.values.size(); ++j) {
        const double rel = std::abs(t.values[j] - base.values[j]) /
                           std::max(std::abs(base.values[j]), 1e-12);
        if (rel > worst) {
          worst = rel;
          worst_at = j;
        }
      }
      g.require(worst <= kRelTol,
                strf("clip %d gain %.1f: coordinate %zu off by %.3g relative",
                     clip, gain, worst_at, worst));
      const double want_loudness = std::pow(gain, 0.3) * base.values.back();
      const double rel = std::abs(t.values.back() - want_loudness) /
                         std::max(std::abs(want_loudness), 1e-12);
      g.require(rel <= kRelTol,
                strf("clip %d gain %.1f: loudness off by %.3g relative", clip,
                     gain, rel));
    }
  }
}

// 3. Squared channel gains sum to 1 on every FFT bin inside the
//    passband, so the bank neither loses nor doubles energy.
void criterion_completeness(Gate& g) {
  constexpr double kTol = 1e-6;
  const auto bank = default_bank();
  const double bin_hz = 20000.0 / 4096.0;
  std::size_t checked = 0;
  double worst = 0.0;
  for (std::size_t k = 0; k < bank.frequency_responses.cols; ++k) {
    const double f = bin_hz * static_cast<double>(k);
    if (f < 20.0 || f > 10000.0) continue;
    double sum = 0.0;
    for (int c = 0; c < 32; ++c) {
      const double gain = bank.frequency_responses(c, k);
      sum += gain * gain;
    }
    worst = std::max(worst, std::abs(sum - 1.0));
    ++checked;
  }
  g.require(checked > 1000, strf("only %zu passband bins", checked));
  g.require(worst <= kTol,
            strf("worst squared-gain sum deviates by %.3g", worst));
}

// 4. White noise carries fewer cross-channel correlations than a
//    broadband click train, by a margin of at least 0.1 per trial.
void criterion_correlation_margin(Gate& g) {
  constexpr double kMargin = 0.1;
  const auto bank = default_bank();
  const auto mod_bank = default_mod_bank();
  for (int trial = 0; trial < 10; ++trial) {
    const SoundTexture tn = texture_for_window(
        noise_wave(6.0, 20000, 200 + trial), bank, mod_bank, 3.0);
    const SoundTexture tc = texture_for_window(
        click_train(6.0, 20000, 200 + trial), bank, mod_bank, 3.0);
    const double margin = mean_abs_rho(tc) - mean_abs_rho(tn);
    g.require(margin >= kMargin,
              strf("trial %d margin %.3f below %.1f", trial, margin, kMargin));
  }
}

// 5. 4 Hz amplitude-modulated noise puts its largest modulation column
//    (by norm over channels) at the filter nearest 4 Hz, >= 9 of 10.
void criterion_modulation_selectivity(Gate& g) {
  const auto bank = default_bank();
  const auto mod_bank = default_mod_bank();
  int nearest = 0;
  for (int j = 1; j < mod_bank.n_filters; ++j) {
    if (std::abs(std::log(mod_bank.center_freqs_hz[j] / 4.0)) <
        std::abs(std::log(mod_bank.center_freqs_hz[nearest] / 4.0))) {
      nearest = j;
    }
  }
  int hits = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const Waveform w = am_noise(3.75, 20000, 4.0, 300 + trial);
    const Cochleagram c = compute_cochleagram(w, bank);
    const MarginalStats stats = marginal_stats(c);
    const Matrix mod = modulation_power(c, mod_bank, stats.std);
    int argmax = 0;
    double best = -1.0;
    for (int j = 0; j < mod_bank.n_filters; ++j) {
      double norm_sq = 0.0;
      for (int ch = 0; ch < 32; ++ch) {
        norm_sq += mod(ch, j) * mod(ch, j);
      }
      if (norm_sq > best) {
        best = norm_sq;
        argmax = j;
      }
    }
    if (argmax == nearest) ++hits;
  }
  g.require(hits >= 9, strf("only %d of 10 trials peaked at filter %d (%.2f Hz)",
                            hits, nearest, mod_bank.center_freqs_hz[nearest]));
}

// 6. Clustering recovers well-separated blobs, pruning keeps between
//    half and all of each cluster, and inertia never increases.
void criterion_clustering(Gate& g) {
  const BlobData blobs = make_blobs(100, 5, 31);
  const ClusterModel model = kmeans_fit(blobs.x, 3, 0);
  const Assignment asg = assign(model, blobs.x);
  const double ari = adjusted_rand_index(asg.labels, blobs.truth);
  g.require(ari > 0.99, strf("adjusted Rand index %.4f", ari));

  const std::vector<bool> pruned = prune_outliers(asg.labels, asg.distances);
  std::vector<std::size_t> size(3, 0), kept(3, 0);
  for (std::size_t i = 0; i < pruned.size(); ++i) {
    size[asg.labels[i]]++;
    if (!pruned[i]) kept[asg.labels[i]]++;
  }
  for (int c = 0; c < 3; ++c) {
    const std::size_t floor = (size[c] + 1) / 2;
    g.require(kept[c] >= floor && kept[c] <= size[c],
              strf("cluster %d keeps %zu of %zu, floor %zu", c, kept[c],
                   size[c], floor));
  }

  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const BlobData loose = make_blobs(60, 4, 70 + seed, 1.5);
    const ClusterModel m = kmeans_fit(loose.x, 3, seed);
    g.require(!m.inertia_history.empty(), "empty inertia history");
    for (std::size_t i = 1; i < m.inertia_history.size(); ++i) {
      g.require(m.inertia_history[i] <= m.inertia_history[i - 1] + 1e-9,
                strf("seed %llu: inertia rose at pass %zu",
                     static_cast<unsigned long long>(seed), i));
    }
  }
}

// 7. Principal axes agree with a brute-force Jacobi eigensolver within
//    1e-8 across 100 random small matrices, and the fitted mean always
//    encodes to the all-zero binary code.
void criterion_pca_oracle(Gate& g) {
  constexpr double kTol = 1e-8;
  Rng rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 2 + rng.uniform_index(7);
    const std::size_t n = d + 2 + rng.uniform_index(12);
    Matrix x(n, d);
    for (auto& v : x.data) v = rng.uniform(-2.0, 2.0);

    std::vector<double> eigenvalues;
    std::vector<std::vector<double>> eigenvectors;
    jacobi_eigen(covariance_of(x), eigenvalues, eigenvectors);

    // Compare subspaces across the largest relative eigengap so the
    // span is well defined despite eigenvector sign/rotation freedom.
    std::size_t m = 1;
    double best_gap = -1.0;
    for (std::size_t i = 1; i < d; ++i) {
      const double gap = (eigenvalues[i - 1] - eigenvalues[i]) /
                         std::max(eigenvalues[0], 1e-30);
      if (gap > best_gap) {
        best_gap = gap;
        m = i;
      }
    }
    const PcaModel model = pca_fit(x, static_cast<int>(m));
    for (std::size_t i = 0; i < m; ++i) {
      const double rel = std::abs(model.variances[i] - eigenvalues[i]) /
                         std::max(std::abs(eigenvalues[i]), 1e-30);
      g.require(rel <= kTol,
                strf("trial %d: variance %zu off by %.3g relative", trial, i,
                     rel));
    }
    double worst = 0.0;
    for (std::size_t p = 0; p < d; ++p) {
      for (std::size_t q = 0; q < d; ++q) {
        double want = 0.0, got = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          want += eigenvectors[p][i] * eigenvectors[q][i];
          got += model.components(i, p) * model.components(i, q);
        }
        worst = std::max(worst, std::abs(want - got));
      }
    }
    g.require(worst <= kTol,
              strf("trial %d: projector entries differ by %.3g", trial, worst));
    g.require(binary_encode(model, model.mean) == 0,
              strf("trial %d: mean code is nonzero", trial));
  }
}

// 8. Probe gradients match finite differences; chance and majority
//    baselines come out at 1/30 and 6.6% on constructed corpora; and a
//    probe on texture features predicts their own cluster labels.
void criterion_probe(Gate& g) {
  constexpr double kGradTol = 1e-4;
  Rng rng(50);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 3 + rng.uniform_index(6);
    const std::size_t d = 2 + rng.uniform_index(4);
    const int k = 2 + static_cast<int>(rng.uniform_index(3));
    Matrix x(n, d);
    std::vector<int> y(n);
    for (auto& v : x.data) v = rng.uniform(-1.5, 1.5);
    for (auto& label : y) label = static_cast<int>(rng.uniform_index(k));
    Matrix w(k, d);
    std::vector<double> b(k);
    for (auto& v : w.data) v = rng.uniform(-0.8, 0.8);
    for (auto& v : b) v = rng.uniform(-0.5, 0.5);
    const double l2 = 0.05;

    Matrix gw;
    std::vector<double> gb;
    softmax_loss_gradient(w, b, x, y, l2, &gw, &gb);
    const double h = 1e-5;
    double worst = 0.0;
    for (std::size_t i = 0; i < w.data.size(); ++i) {
      Matrix wp = w, wm = w;
      wp.data[i] += h;
      wm.data[i] -= h;
      const double numeric =
          (softmax_loss(wp, b, x, y, l2) - softmax_loss(wm, b, x, y, l2)) /
          (2.0 * h);
      const double denom =
          std::max({std::abs(numeric), std::abs(gw.data[i]), 1e-8});
      worst = std::max(worst, std::abs(gw.data[i] - numeric) / denom);
    }
    for (std::size_t i = 0; i < b.size(); ++i) {
      std::vector<double> bp = b, bm = b;
      bp[i] += h;
      bm[i] -= h;
      const double numeric =
          (softmax_loss(w, bp, x, y, l2) - softmax_loss(w, bm, x, y, l2)) /
          (2.0 * h);
      const double denom = std::max({std::abs(numeric), std::abs(gb[i]), 1e-8});
      worst = std::max(worst, std::abs(gb[i] - numeric) / denom);
    }
    g.require(worst < kGradTol,
              strf("trial %d: gradient error %.3g", trial, worst));
  }

  // Chance on a corpus covering 30 classes is 1/30 ~ 3.3%.
  std::vector<int> uniform_y;
  for (int i = 0; i < 120; ++i) uniform_y.push_back(i % 30);
  const Baselines ub = baselines(uniform_y);
  g.require(std::abs(ub.chance - 1.0 / 30.0) < 1e-12,
            strf("uniform chance %.6f", ub.chance));
  g.require(std::abs(ub.majority - 1.0 / 30.0) < 1e-12,
            strf("uniform majority %.6f", ub.majority));

  // 500 examples where class 7 holds 33: majority 33/500 = 6.6%.
  std::vector<int> modal_y;
  for (int r = 0; r < 33; ++r) modal_y.push_back(7);
  for (int c = 0; c < 30; ++c) {
    if (c == 7) continue;
    for (int r = 0; r < 16; ++r) modal_y.push_back(c);
  }
  for (int c : {0, 1, 2}) modal_y.push_back(c);
  g.require(modal_y.size() == 500, "modal corpus is not 500 rows");
  const Baselines mb = baselines(modal_y);
  g.require(std::abs(mb.chance - 1.0 / 30.0) < 1e-12,
            strf("modal chance %.6f", mb.chance));
  g.require(std::abs(mb.majority - 0.066) < 1e-12,
            strf("modal majority %.6f", mb.majority));
  g.require(mb.majority_class == 7,
            strf("modal class %d", mb.majority_class));

  // Self-labeling stand-in: textures of three audibly distinct
  // families, k-means labels on those textures, probe trained on the
  // same features must predict the labels almost perfectly.
  const auto bank = default_bank();
  const auto mod_bank = default_mod_bank();
  std::vector<SoundTexture> textures;
  for (int i = 0; i < 12; ++i) {
    textures.push_back(texture_for_window(noise_wave(4.0, 20000, 900 + i),
                                          bank, mod_bank, 2.0));
    textures.push_back(texture_for_window(
        am_noise(4.0, 20000, 4.0, 930 + i), bank, mod_bank, 2.0));
    textures.push_back(texture_for_window(click_train(4.0, 20000, 960 + i),
                                          bank, mod_bank, 2.0));
  }
  Matrix features(textures.size(), 502);
  for (std::size_t i = 0; i < textures.size(); ++i) {
    for (std::size_t j = 0; j < 502; ++j) {
      features(i, j) = textures[i].values[j];
    }
  }
  const ClusterModel clusters = kmeans_fit(features, 3, 0);
  const Assignment asg = assign(clusters, features);
  const LinearModel probe = train_probe(features, asg.labels, 800, 2.0, 1e-5);
  const ProbeReport report = evaluate(probe, features, asg.labels);
  g.require(report.accuracy >= 0.95,
            strf("self-label accuracy %.3f below 0.95", report.accuracy));
}

// 9. Feature stores round-trip bit-exactly over 1000 random shapes,
//    and hand-built WAV bytes decode with exact scaling arithmetic.
void criterion_persistence(Gate& g) {
  Rng rng(77);
  for (int trial = 0; trial < 1000; ++trial) {
    FeatureStore store;
    const std::size_t rows = rng.uniform_index(41);
    const std::size_t cols = 1 + rng.uniform_index(64);
    store.features = FloatMatrix(rows, cols);
    for (std::size_t i = 0; i < store.features.data.size(); ++i) {
      store.features.data[i] =
          i % 97 == 0 ? 0.0f : static_cast<float>(rng.uniform(-10.0, 10.0));
    }
    store.ids.resize(rows);
    for (std::size_t i = 0; i < rows; ++i) {
      store.ids[i].clip_id = "clip_" + std::to_string(rng.uniform_index(1000));
      store.ids[i].window_index =
          static_cast<std::uint32_t>(rng.uniform_index(64));
    }
    const FeatureStore back = decode_store(encode_store(store));
    const bool same_shape = back.features.rows == rows &&
                            back.features.cols == cols &&
                            back.ids == store.ids;
    g.require(same_shape, strf("trial %d: shape or ids changed", trial));
    if (!same_shape) continue;
    const bool same_bits =
        rows == 0 ||
        std::memcmp(back.features.data.data(), store.features.data.data(),
                    rows * cols * sizeof(float)) == 0;
    g.require(same_bits, strf("trial %d: payload bits changed", trial));
  }

  {  // 16-bit samples divide by 32768 exactly.
    Bytes payload;
    for (std::int16_t s : {std::int16_t{0}, std::int16_t{16384},
                           std::int16_t{-32768}, std::int16_t{8192}}) {
      push_u16(payload, static_cast<std::uint16_t>(s));
    }
    const Waveform w = decode_wav(wav_bytes(1, 1, 8000, 16, payload));
    const double want[4] = {0.0, 0.5, -1.0, 0.25};
    for (int i = 0; i < 4; ++i) {
      g.require(w.samples[i] == want[i],
                strf("pcm16 sample %d is %.9f", i, w.samples[i]));
    }
  }
  {  // 24-bit samples divide by 2^23 exactly.
    Bytes payload;
    for (std::int32_t v : {0, 4194304, -8388608}) {
      payload.push_back(static_cast<std::uint8_t>(v & 0xFF));
      payload.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
      payload.push_back(static_cast<std::uint8_t>((v >> 16) & 0xFF));
    }
    const Waveform w = decode_wav(wav_bytes(1, 1, 44100, 24, payload));
    const double want[3] = {0.0, 0.5, -1.0};
    for (int i = 0; i < 3; ++i) {
      g.require(w.samples[i] == want[i],
                strf("pcm24 sample %d is %.9f", i, w.samples[i]));
    }
  }
  {  // Float samples pass through bit-exactly, even outside [-1, 1].
    Bytes payload;
    const float values[3] = {0.25f, -0.5f, 1.5f};
    for (float f : values) {
      std::uint32_t u;
      std::memcpy(&u, &f, 4);
      push_u32(payload, u);
    }
    const Waveform w = decode_wav(wav_bytes(3, 1, 16000, 32, payload));
    for (int i = 0; i < 3; ++i) {
      g.require(w.samples[i] == static_cast<double>(values[i]),
                strf("float sample %d is %.9f", i, w.samples[i]));
    }
  }
}

// --------------------------------------------------- end-to-end determinism

std::string file_bytes(const fs::path& path, Gate& g) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    g.require(false, "missing artifact: " + path.string());
    return {};
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Mixed corpus: noise, slow AM noise, click trains, and harmonic
// stacks, at two sample rates, each long enough for full windows.
void write_corpus(const fs::path& dir, const fs::path& manifest_path) {
  std::ofstream manifest(manifest_path);
  manifest << std::setprecision(12);
  for (int i = 0; i < 20; ++i) {
    const int rate = i % 5 == 0 ? 44100 : 20000;
    const double seconds = 4.2 + 0.09 * i;
    Waveform w;
    switch (i % 4) {
      case 0:
        w = noise_wave(seconds, rate, 500 + i);
        break;
      case 1:
        w = am_noise(seconds, rate, 2.0 + 0.5 * (i / 4), 500 + i);
        break;
      case 2: {
        w = click_train(seconds, rate, 500 + i);
        const Waveform bed = noise_wave(seconds, rate, 600 + i);
        for (std::size_t j = 0; j < w.samples.size(); ++j) {
          w.samples[j] += 0.05 * bed.samples[j];
        }
        break;
      }
      default: {
        w = noise_wave(seconds, rate, 700 + i);
        const double f0 = 80.0 + 10.0 * i;
        for (std::size_t j = 0; j < w.samples.size(); ++j) {
          const double t = static_cast<double>(j) / rate;
          double tone = 0.0;
          for (int h = 1; h <= 10; ++h) {
            tone += (0.4 / h) * std::sin(2.0 * kPi * h * f0 * t + 0.3 * h);
          }
          w.samples[j] = 0.02 * w.samples[j] + tone;
        }
        break;
      }
    }
    for (auto& v : w.samples) v = std::clamp(v, -0.99, 0.99);
    const std::string clip_id = strf("clip%02d", i);
    const fs::path wav_path = dir / (clip_id + ".wav");
    write_wav_pcm16(wav_path.string(), w);
    manifest << "{\"clip_id\":\"" << clip_id << "\",\"path\":\""
             << wav_path.string() << "\",\"duration_s\":"
             << static_cast<double>(w.samples.size()) / rate << "}\n";
  }
}

bool run_pipeline(const fs::path& dir, const fs::path& manifest, Gate& g) {
  const fs::path log = dir / "log.txt";
  auto step = [&](const std::string& args) {
    const std::string cmd = std::string("\"") + SOUNDTEX_CLI_PATH + "\" " +
                            args + " >> \"" + log.string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    g.require(status == 0, strf("pipeline step exited %d: %s", status,
                                args.substr(0, 60).c_str()));
    return status == 0;
  };
  const std::string store = (dir / "features.astx").string();
  return step("extract --manifest \"" + manifest.string() + "\" --out \"" +
              store + "\" --windows 5 --seed 0 --threads 1") &&
         step("cluster --store \"" + store + "\" --out-model \"" +
              (dir / "model.json").string() + "\" --out-labels \"" +
              (dir / "labels.tsv").string() + "\" --k 8 --seed 0") &&
         step("pca-fit --store \"" + store + "\" --out-model \"" +
              (dir / "pca.json").string() + "\" --components 30") &&
         step("encode --store \"" + store + "\" --model \"" +
              (dir / "pca.json").string() + "\" --out \"" +
              (dir / "codes.tsv").string() + "\"") &&
         step("probe --store \"" + store + "\" --labels \"" +
              (dir / "labels.tsv").string() + "\" --out \"" +
              (dir / "report.txt").string() + "\"");
}

// 10. The full extract -> cluster -> encode -> probe pipeline, run
//     twice with the same seed on the same corpus, produces
//     byte-identical artifacts.
void criterion_determinism(Gate& g) {
  const fs::path root = fs::temp_directory_path() / "soundtex_acceptance";
  fs::remove_all(root);
  fs::create_directories(root / "run_a");
  fs::create_directories(root / "run_b");
  const fs::path manifest = root / "manifest.jsonl";
  write_corpus(root, manifest);

  if (!run_pipeline(root / "run_a", manifest, g)) return;
  if (!run_pipeline(root / "run_b", manifest, g)) return;

  for (const char* name : {"features.astx", "model.json", "labels.tsv",
                           "pca.json", "codes.tsv", "report.txt"}) {
    const std::string a = file_bytes(root / "run_a" / name, g);
    const std::string b = file_bytes(root / "run_b" / name, g);
    if (a.size() != b.size()) {
      g.require(false, strf("%s: sizes differ (%zu vs %zu)", name, a.size(),
                            b.size()));
      continue;
    }
    if (a != b) {
      std::size_t at = 0;
      while (at < a.size() && a[at] == b[at]) ++at;
      g.require(false, strf("%s: first byte difference at offset %zu", name, at));
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failures = 0;
  int passed = 0;
  auto tally = [&](bool ok) { (ok ? passed : failures)++; };

  tally(run_criterion(1, "texture vectors are 502-dimensional (32+32+117+320+1)",
                      1.0, criterion_dimension, only));
  tally(run_criterion(2, "0.1x/10x gain moves only loudness, which scales as gain^0.3 (rel 1e-6)",
                      30.0, criterion_gain_invariance, only));
  tally(run_criterion(3, "squared filterbank gains sum to 1 on every passband bin (1e-6)",
                      1.0, criterion_completeness, only));
  tally(run_criterion(4, "click trains beat noise in mean |correlation| by >= 0.1 (10 trials)",
                      60.0, criterion_correlation_margin, only));
  tally(run_criterion(5, "4 Hz AM noise peaks at the modulation filter nearest 4 Hz (>= 9/10)",
                      60.0, criterion_modulation_selectivity, only));
  tally(run_criterion(6, "k-means recovers blobs (ARI > 0.99), pruning bounded, inertia monotone",
                      10.0, criterion_clustering, only));
  tally(run_criterion(7, "pca matches a Jacobi eigensolver within 1e-8; mean encodes to zero",
                      10.0, criterion_pca_oracle, only));
  tally(run_criterion(8, "probe gradients < 1e-4; baselines 3.3%/6.6%; self-labels >= 95%",
                      30.0, criterion_probe, only));
  tally(run_criterion(9, "stores round-trip bit-exactly (1000 trials); wav scaling exact",
                      30.0, criterion_persistence, only));
  tally(run_criterion(10, "two seeded pipeline runs emit byte-identical artifacts",
                      120.0, criterion_determinism, only));

  std::printf("acceptance: %d passed, %d failed\n", passed, failures);
  return failures;
}
