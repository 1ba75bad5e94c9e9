// Copyright the soundtex authors
// SPDX-License-Identifier: Apache-2.0

#include "soundtex/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "soundtex/errors.hpp"
#include "soundtex/manifest.hpp"
#include "soundtex/probe.hpp"
#include "soundtex/rng.hpp"
#include "soundtex/store.hpp"
#include "soundtex/texture.hpp"
#include "soundtex/viz.hpp"
#include "soundtex/wav.hpp"

namespace soundtex {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

std::string format_full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_percent(double fraction) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.1f%%", fraction * 100.0);
  return buf;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("read failure on " + path);
  return buffer.str();
}

void write_binary_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("write failure on " + path);
}

GroupRescale parse_rescale(const std::string& name) {
  return name == "sqrtdim" ? GroupRescale::kInverseSqrtDim
                           : GroupRescale::kInverseDim;
}

TextureShape pipeline_shape() {
  TextureShape shape;
  shape.n_channels = kPipelineChannels;
  shape.n_modulation = kPipelineModFilters;
  return shape;
}

CochlearFilterBank pipeline_filterbank() {
  return make_cochlear_filterbank(kPipelineChannels, kPipelineLowHz,
                                  kPipelineHighHz, kPipelineFftLength,
                                  kPipelineRate);
}

ModulationFilterBank pipeline_modulation_bank() {
  const auto window_samples = static_cast<std::size_t>(
      std::llround(kTextureWindowSeconds * kPipelineRate));
  const std::size_t frames =
      resampled_length(window_samples, kPipelineRate, kEnvelopeRate);
  return make_modulation_filterbank(kPipelineModFilters, kPipelineModLowHz,
                                    kPipelineModHighHz, frames);
}

// ---------------------------------------------------------------------------
// Label table (TSV) shared by `cluster` and `probe`.

constexpr const char* kLabelHeader = "clip_id\twindow\tlabel\tdistance\tpruned";

struct LabelRow {
  RowId id;
  int label = 0;
  double distance = 0.0;
  bool pruned = false;
};

std::string labels_to_tsv(const std::vector<RowId>& ids,
                          const std::vector<int>& labels,
                          const std::vector<double>& distances,
                          const std::vector<bool>& pruned) {
  std::ostringstream out;
  out << kLabelHeader << "\n";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out << ids[i].clip_id << "\t" << ids[i].window_index << "\t" << labels[i]
        << "\t" << format_full(distances[i]) << "\t" << (pruned[i] ? 1 : 0)
        << "\n";
  }
  return out.str();
}

std::vector<std::string> split_fields(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

std::vector<LabelRow> parse_labels_tsv(const std::string& text) {
  std::istringstream stream(text);
  std::string line;
  if (!std::getline(stream, line)) throw ParseError("labels: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kLabelHeader) throw ParseError("labels: unexpected header");
  std::vector<LabelRow> rows;
  std::size_t line_no = 1;
  while (std::getline(stream, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_fields(line, '\t');
    if (fields.size() != 5) {
      throw ParseError("labels line " + std::to_string(line_no) +
                       ": expected 5 fields");
    }
    LabelRow row;
    row.id.clip_id = fields[0];
    try {
      row.id.window_index = static_cast<std::uint32_t>(std::stoul(fields[1]));
      row.label = std::stoi(fields[2]);
      row.distance = std::stod(fields[3]);
      row.pruned = std::stoi(fields[4]) != 0;
    } catch (const std::exception&) {
      throw ParseError("labels line " + std::to_string(line_no) +
                       ": malformed numeric field");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// extract

struct ExtractOptions {
  std::string manifest_path;
  std::string out_path;
  std::string feature = "texture";
  std::string rescale = "dim";
  int windows = 10;
  std::uint64_t seed = 0;
  int threads = 0;  // 0: hardware concurrency
};

struct ClipOutput {
  std::vector<std::vector<float>> rows;
  std::vector<RowId> ids;
  std::vector<std::string> warnings;
  std::exception_ptr error;
};

std::vector<float> to_float_row(const std::vector<double>& values) {
  std::vector<float> row(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    row[i] = static_cast<float>(values[i]);
  }
  return row;
}

void process_clip(const ManifestRecord& record, std::size_t clip_index,
                  const ExtractOptions& options, const fs::path& base_dir,
                  const CochlearFilterBank& bank,
                  const ModulationFilterBank* mod_bank, ClipOutput* out) {
  fs::path clip_path(record.path);
  if (clip_path.is_relative()) clip_path = base_dir / clip_path;
  const Waveform raw = decode_wav_file(clip_path.string());
  const Waveform w = resample(raw, kPipelineRate);
  std::vector<double> centers = record.window_centers_s;
  if (centers.empty()) {
    centers = sample_windows(w.duration_s(), options.windows,
                             mix_seed(options.seed, clip_index));
    if (centers.empty()) {
      out->warnings.push_back(record.clip_id +
                              ": clip shorter than analysis window, skipped");
      return;
    }
  }
  const GroupRescale rescale = parse_rescale(options.rescale);
  std::optional<Cochleagram> clip_cochleagram;
  if (mod_bank == nullptr) {
    clip_cochleagram = compute_cochleagram(w, bank);  // spectrum features
  }
  for (std::size_t wi = 0; wi < centers.size(); ++wi) {
    try {
      std::vector<double> values;
      if (mod_bank != nullptr) {
        const SoundTexture tex =
            texture_for_window(w, bank, *mod_bank, centers[wi],
                               kTextureWindowSeconds, rescale);
        values = tex.values;
      } else {
        values = spectrum_from_cochleagram(*clip_cochleagram, centers[wi]);
      }
      out->rows.push_back(to_float_row(values));
      out->ids.push_back(RowId{record.clip_id, static_cast<std::uint32_t>(wi)});
    } catch (const OutOfRangeError&) {
      out->warnings.push_back(record.clip_id + ": window " +
                              std::to_string(wi) +
                              " extends past the clip, skipped");
    }
  }
}

int run_extract(const ExtractOptions& options) {
  const std::vector<ManifestRecord> records = load_manifest(options.manifest_path);
  const fs::path base_dir = fs::path(options.manifest_path).parent_path();
  const CochlearFilterBank bank = pipeline_filterbank();
  std::optional<ModulationFilterBank> mod_bank;
  std::size_t dim = kPipelineChannels;
  if (options.feature == "texture") {
    mod_bank = pipeline_modulation_bank();
    dim = pipeline_shape().dimension();
  }
  std::vector<ClipOutput> outputs(records.size());
  std::atomic<std::size_t> cursor{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= records.size()) return;
      try {
        process_clip(records[i], i, options, base_dir, bank,
                     mod_bank ? &*mod_bank : nullptr, &outputs[i]);
      } catch (...) {
        outputs[i].error = std::current_exception();
      }
    }
  };
  unsigned n_threads = options.threads > 0
                           ? static_cast<unsigned>(options.threads)
                           : std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min<unsigned>(
      n_threads, static_cast<unsigned>(std::max<std::size_t>(1, records.size())));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  for (const ClipOutput& out : outputs) {
    if (out.error) std::rethrow_exception(out.error);
  }
  FeatureStore store;
  std::size_t n_rows = 0;
  std::size_t n_warnings = 0;
  for (const ClipOutput& out : outputs) {
    n_rows += out.rows.size();
    n_warnings += out.warnings.size();
  }
  store.features = FloatMatrix(n_rows, dim);
  store.ids.reserve(n_rows);
  std::size_t r = 0;
  for (const ClipOutput& out : outputs) {
    for (std::size_t i = 0; i < out.rows.size(); ++i) {
      if (out.rows[i].size() != dim) {
        throw Error("extract: inconsistent feature dimension");
      }
      std::copy(out.rows[i].begin(), out.rows[i].end(), store.features.row(r));
      store.ids.push_back(out.ids[i]);
      ++r;
    }
    for (const std::string& warning : out.warnings) {
      std::cerr << "warning: " << warning << "\n";
    }
  }
  write_store(options.out_path, store);
  std::cout << "rows: " << n_rows << "\n"
            << "dim: " << dim << "\n"
            << "warnings: " << n_warnings << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// cluster

struct ClusterOptions {
  std::string store_path;
  std::string model_path;
  std::string labels_path;
  int k = 30;
  std::uint64_t seed = 0;
  std::string prune = "per-cluster";
  int max_iterations = 100;
  double tolerance = 1e-6;
};

PruneMode parse_prune_mode(const std::string& name) {
  if (name == "global") return PruneMode::kGlobal;
  if (name == "off") return PruneMode::kOff;
  return PruneMode::kPerCluster;
}

int run_cluster(const ClusterOptions& options) {
  const FeatureStore store = read_store(options.store_path);
  const Matrix x = widen(store.features);
  const ClusterModel model = kmeans_fit(x, options.k, options.seed,
                                        options.max_iterations,
                                        options.tolerance);
  const Assignment asg = assign(model, x);
  const std::vector<bool> pruned =
      prune_outliers(asg.labels, asg.distances, parse_prune_mode(options.prune));
  std::size_t retained = 0;
  for (bool p : pruned) {
    if (!p) ++retained;
  }
  if (!options.model_path.empty()) {
    write_binary_file(options.model_path, serialize_cluster_model(model));
  }
  if (!options.labels_path.empty()) {
    write_binary_file(options.labels_path,
                      labels_to_tsv(store.ids, asg.labels, asg.distances, pruned));
  }
  std::cout << "k: " << model.k << "\n"
            << "inertia: " << format_full(model.inertia) << "\n"
            << "iterations: " << model.iterations_run << "\n"
            << "retained: " << retained << " of " << pruned.size() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// pca-fit / encode

struct PcaFitOptions {
  std::string store_path;
  std::string model_path;
  int components = 30;
};

int run_pca_fit(const PcaFitOptions& options) {
  const FeatureStore store = read_store(options.store_path);
  const Matrix x = widen(store.features);
  const PcaModel model = pca_fit(x, options.components);
  write_binary_file(options.model_path, serialize_pca_model(model));
  std::cout << "components: " << model.n_components << "\n"
            << "dim: " << model.dim << "\n";
  return 0;
}

struct EncodeOptions {
  std::string store_path;
  std::string model_path;
  std::string out_path;
};

int run_encode(const EncodeOptions& options) {
  const FeatureStore store = read_store(options.store_path);
  const PcaModel model = deserialize_pca_model(read_text_file(options.model_path));
  std::ostringstream out;
  out << "clip_id\twindow\tcode\n";
  std::vector<double> row(store.features.cols);
  for (std::size_t i = 0; i < store.features.rows; ++i) {
    const float* src = store.features.row(i);
    for (std::size_t d = 0; d < row.size(); ++d) {
      row[d] = static_cast<double>(src[d]);
    }
    const std::uint64_t code = binary_encode(model, row);
    std::string bits(static_cast<std::size_t>(model.n_components), '0');
    for (int b = 0; b < model.n_components; ++b) {
      if ((code >> b) & 1u) bits[static_cast<std::size_t>(b)] = '1';
    }
    out << store.ids[i].clip_id << "\t" << store.ids[i].window_index << "\t"
        << bits << "\n";
  }
  write_binary_file(options.out_path, out.str());
  std::cout << "rows: " << store.features.rows << "\n"
            << "bits: " << model.n_components << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepOptions {
  std::string store_path;
  std::vector<int> ks;
  std::uint64_t seed = 0;
  std::string out_path;
};

int run_sweep(const SweepOptions& options) {
  const FeatureStore store = read_store(options.store_path);
  const Matrix x = widen(store.features);
  const std::vector<SweepEntry> entries =
      cluster_count_sweep(x, options.ks, options.seed);
  std::ostringstream out;
  out << "k\tinertia\titerations\tretained\ttotal\n";
  for (const SweepEntry& entry : entries) {
    out << entry.k << "\t" << format_full(entry.model.inertia) << "\t"
        << entry.model.iterations_run << "\t" << entry.retained << "\t"
        << x.rows << "\n";
  }
  if (!options.out_path.empty()) write_binary_file(options.out_path, out.str());
  std::cout << out.str();
  return 0;
}

// ---------------------------------------------------------------------------
// probe

struct ProbeOptions {
  std::string store_path;
  std::string labels_path;
  std::string out_path;
  int epochs = 300;
  double learning_rate = 1.0;
  double l2 = 1e-3;
  bool include_pruned = false;
};

int run_probe(const ProbeOptions& options) {
  const FeatureStore store = read_store(options.store_path);
  const std::vector<LabelRow> label_rows =
      parse_labels_tsv(read_text_file(options.labels_path));
  if (label_rows.size() != store.features.rows) {
    throw InvalidInputError("probe: label row count does not match store");
  }
  for (std::size_t i = 0; i < label_rows.size(); ++i) {
    if (!(label_rows[i].id == store.ids[i])) {
      throw InvalidInputError("probe: label ids do not match store rows");
    }
  }
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < label_rows.size(); ++i) {
    if (options.include_pruned || !label_rows[i].pruned) kept.push_back(i);
  }
  if (kept.empty()) throw InvalidInputError("probe: no rows left after pruning");
  Matrix x(kept.size(), store.features.cols);
  std::vector<int> y(kept.size());
  for (std::size_t j = 0; j < kept.size(); ++j) {
    const float* src = store.features.row(kept[j]);
    double* dst = x.row(j);
    for (std::size_t d = 0; d < x.cols; ++d) dst[d] = static_cast<double>(src[d]);
    y[j] = label_rows[kept[j]].label;
  }
  const LinearModel model =
      train_probe(x, y, options.epochs, options.learning_rate, options.l2);
  const ProbeReport report = evaluate(model, x, y);
  const Baselines base = baselines(y);
  std::set<int> distinct(y.begin(), y.end());
  double class_accuracy_sum = 0.0;
  for (int c : distinct) {
    class_accuracy_sum += report.per_class_accuracy[static_cast<std::size_t>(c)];
  }
  std::ostringstream out;
  out << "examples: " << store.features.rows << "\n"
      << "used: " << kept.size() << "\n"
      << "excluded_pruned: " << (store.features.rows - kept.size()) << "\n"
      << "classes: " << distinct.size() << "\n"
      << "chance: " << format_percent(base.chance) << "\n"
      << "majority: " << format_percent(base.majority) << " (class "
      << base.majority_class << ")\n"
      << "accuracy: " << format_percent(report.accuracy) << "\n"
      << "mean_class_accuracy: "
      << format_percent(class_accuracy_sum /
                        static_cast<double>(distinct.size()))
      << "\n"
      << "final_loss: " << format_full(model.training_log.back()) << "\n"
      << "epochs_run: " << model.training_log.size() << "\n";
  if (!options.out_path.empty()) write_binary_file(options.out_path, out.str());
  std::cout << out.str();
  return 0;
}

// ---------------------------------------------------------------------------
// viz / stats

struct VizOptions {
  std::string kind;
  std::string wav_path;
  std::string model_path;
  std::string out_path;
  std::string rescale = "dim";
  std::string palette = "grayscale";
  int cluster = 0;
  int width = 0;
  int height = 0;
};

int run_viz(const VizOptions& options) {
  if (options.kind == "cochleagram") {
    if (options.wav_path.empty()) {
      throw InvalidConfigError("viz: --wav is required for cochleagram");
    }
    const Waveform w = resample(decode_wav_file(options.wav_path), kPipelineRate);
    const Cochleagram c = compute_cochleagram(w, pipeline_filterbank());
    RenderSpec spec;
    spec.width = options.width;
    spec.height = options.height;
    spec.palette = options.palette == "diverging" ? VizPalette::kDiverging
                                                  : VizPalette::kGrayscale;
    write_binary_file(options.out_path, render_cochleagram(c, spec));
    std::cout << "wrote: " << options.out_path << "\n";
    return 0;
  }
  if (options.model_path.empty()) {
    throw InvalidConfigError("viz: --model is required for centroid");
  }
  const ClusterModel model =
      deserialize_cluster_model(read_text_file(options.model_path));
  write_binary_file(options.out_path,
                    render_centroid_stats(model, options.cluster,
                                          pipeline_shape(),
                                          parse_rescale(options.rescale)));
  std::cout << "wrote: " << options.out_path << "\n";
  return 0;
}

int run_stats(const std::string& store_path) {
  const FeatureStore store = read_store(store_path);
  std::cout << "rows: " << store.features.rows << "\n"
            << "dim: " << store.features.cols << "\n"
            << "dtype: float32\n"
            << "version: 1\n";
  return 0;
}

}  // namespace

// ---------------------------------------------------------------------------
// Model persistence

std::string serialize_cluster_model(const ClusterModel& model) {
  ordered_json j;
  j["kind"] = "cluster_model";
  j["version"] = 1;
  j["k"] = model.k;
  j["dim"] = model.dim;
  j["seed"] = model.seed;
  j["inertia"] = model.inertia;
  j["iterations_run"] = model.iterations_run;
  j["inertia_history"] = model.inertia_history;
  ordered_json rows = ordered_json::array();
  for (int c = 0; c < model.k; ++c) {
    const double* row = model.centroids.row(static_cast<std::size_t>(c));
    rows.push_back(std::vector<double>(row, row + model.dim));
  }
  j["centroids"] = std::move(rows);
  return j.dump() + "\n";
}

ClusterModel deserialize_cluster_model(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("cluster model: ") + e.what());
  }
  if (!j.is_object() || j.value("kind", "") != "cluster_model") {
    throw ParseError("cluster model: wrong kind field");
  }
  if (j.value("version", 0) != 1) throw ParseError("cluster model: unsupported version");
  ClusterModel model;
  try {
    model.k = j.at("k").get<int>();
    model.dim = j.at("dim").get<std::size_t>();
    model.seed = j.at("seed").get<std::uint64_t>();
    model.inertia = j.at("inertia").get<double>();
    model.iterations_run = j.at("iterations_run").get<int>();
    model.inertia_history = j.at("inertia_history").get<std::vector<double>>();
    const json& rows = j.at("centroids");
    if (!rows.is_array() || rows.size() != static_cast<std::size_t>(model.k)) {
      throw ParseError("cluster model: centroid count mismatch");
    }
    model.centroids = Matrix(static_cast<std::size_t>(model.k), model.dim);
    for (int c = 0; c < model.k; ++c) {
      const auto row = rows[static_cast<std::size_t>(c)].get<std::vector<double>>();
      if (row.size() != model.dim) {
        throw ParseError("cluster model: centroid length mismatch");
      }
      std::copy(row.begin(), row.end(),
                model.centroids.row(static_cast<std::size_t>(c)));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("cluster model: ") + e.what());
  }
  return model;
}

std::string serialize_pca_model(const PcaModel& model) {
  ordered_json j;
  j["kind"] = "pca_model";
  j["version"] = 1;
  j["dim"] = model.dim;
  j["n_components"] = model.n_components;
  j["mean"] = model.mean;
  j["variances"] = model.variances;
  ordered_json rows = ordered_json::array();
  for (int c = 0; c < model.n_components; ++c) {
    const double* row = model.components.row(static_cast<std::size_t>(c));
    rows.push_back(std::vector<double>(row, row + model.dim));
  }
  j["components"] = std::move(rows);
  return j.dump() + "\n";
}

PcaModel deserialize_pca_model(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("pca model: ") + e.what());
  }
  if (!j.is_object() || j.value("kind", "") != "pca_model") {
    throw ParseError("pca model: wrong kind field");
  }
  if (j.value("version", 0) != 1) throw ParseError("pca model: unsupported version");
  PcaModel model;
  try {
    model.dim = j.at("dim").get<std::size_t>();
    model.n_components = j.at("n_components").get<int>();
    model.mean = j.at("mean").get<std::vector<double>>();
    model.variances = j.at("variances").get<std::vector<double>>();
    if (model.mean.size() != model.dim) {
      throw ParseError("pca model: mean length mismatch");
    }
    const json& rows = j.at("components");
    if (!rows.is_array() ||
        rows.size() != static_cast<std::size_t>(model.n_components)) {
      throw ParseError("pca model: component count mismatch");
    }
    model.components =
        Matrix(static_cast<std::size_t>(model.n_components), model.dim);
    for (int c = 0; c < model.n_components; ++c) {
      const auto row = rows[static_cast<std::size_t>(c)].get<std::vector<double>>();
      if (row.size() != model.dim) {
        throw ParseError("pca model: component length mismatch");
      }
      std::copy(row.begin(), row.end(),
                model.components.row(static_cast<std::size_t>(c)));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("pca model: ") + e.what());
  }
  return model;
}

// ---------------------------------------------------------------------------
// Argument parsing

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Sound-texture feature pipeline"};
  app.require_subcommand(1);

  ExtractOptions extract_options;
  CLI::App* extract = app.add_subcommand(
      "extract", "Extract texture or spectrum features from a corpus");
  extract->add_option("--manifest", extract_options.manifest_path,
                      "JSON-lines corpus manifest")->required();
  extract->add_option("--out", extract_options.out_path, "Output feature store")
      ->required();
  extract->add_option("--feature", extract_options.feature, "Feature kind")
      ->check(CLI::IsMember({"texture", "spectrum"}));
  extract->add_option("--windows", extract_options.windows,
                      "Windows sampled per clip when the manifest has none")
      ->check(CLI::PositiveNumber);
  extract->add_option("--seed", extract_options.seed, "Window sampling seed");
  extract->add_option("--rescale", extract_options.rescale,
                      "Per-group rescaling mode")
      ->check(CLI::IsMember({"dim", "sqrtdim"}));
  extract->add_option("--threads", extract_options.threads,
                      "Worker threads (0 = hardware)");

  ClusterOptions cluster_options;
  CLI::App* cluster = app.add_subcommand(
      "cluster", "Fit k-means labels over a feature store");
  cluster->add_option("--store", cluster_options.store_path, "Feature store")
      ->required();
  cluster->add_option("--out-model", cluster_options.model_path,
                      "Cluster model JSON output");
  cluster->add_option("--out-labels", cluster_options.labels_path,
                      "Per-row label table output");
  cluster->add_option("--k", cluster_options.k, "Cluster count");
  cluster->add_option("--seed", cluster_options.seed, "Initialization seed");
  cluster->add_option("--prune", cluster_options.prune, "Outlier pruning mode")
      ->check(CLI::IsMember({"per-cluster", "global", "off"}));
  cluster->add_option("--max-iter", cluster_options.max_iterations,
                      "Maximum Lloyd iterations");
  cluster->add_option("--tol", cluster_options.tolerance,
                      "Relative inertia improvement tolerance");

  PcaFitOptions pca_options;
  CLI::App* pca = app.add_subcommand("pca-fit",
                                     "Fit principal axes of a feature store");
  pca->add_option("--store", pca_options.store_path, "Feature store")->required();
  pca->add_option("--out-model", pca_options.model_path, "PCA model JSON output")
      ->required();
  pca->add_option("--components", pca_options.components, "Component count");

  EncodeOptions encode_options;
  CLI::App* encode = app.add_subcommand(
      "encode", "Binary-encode a feature store with a PCA model");
  encode->add_option("--store", encode_options.store_path, "Feature store")
      ->required();
  encode->add_option("--model", encode_options.model_path, "PCA model JSON")
      ->required();
  encode->add_option("--out", encode_options.out_path, "Code table output")
      ->required();

  SweepOptions sweep_options;
  CLI::App* sweep = app.add_subcommand(
      "sweep", "Compare clustering solutions across several k");
  sweep->add_option("--store", sweep_options.store_path, "Feature store")
      ->required();
  sweep->add_option("--ks", sweep_options.ks, "Comma-separated cluster counts")
      ->required()
      ->delimiter(',');
  sweep->add_option("--seed", sweep_options.seed, "Initialization seed");
  sweep->add_option("--out", sweep_options.out_path, "Summary table output");

  ProbeOptions probe_options;
  CLI::App* probe = app.add_subcommand(
      "probe", "Train and evaluate a linear probe against labels");
  probe->add_option("--store", probe_options.store_path, "Feature store")
      ->required();
  probe->add_option("--labels", probe_options.labels_path, "Label table")
      ->required();
  probe->add_option("--out", probe_options.out_path, "Report output");
  probe->add_option("--epochs", probe_options.epochs, "Training epochs");
  probe->add_option("--lr", probe_options.learning_rate, "Initial step size");
  probe->add_option("--l2", probe_options.l2, "Weight penalty");
  probe->add_flag("--include-pruned", probe_options.include_pruned,
                  "Train on pruned rows as well");

  VizOptions viz_options;
  CLI::App* viz = app.add_subcommand("viz", "Render diagnostic figures");
  viz->add_option("--kind", viz_options.kind, "Figure kind")
      ->required()
      ->check(CLI::IsMember({"cochleagram", "centroid"}));
  viz->add_option("--out", viz_options.out_path, "Output image path")->required();
  viz->add_option("--wav", viz_options.wav_path, "Input clip (cochleagram)");
  viz->add_option("--model", viz_options.model_path,
                  "Cluster model JSON (centroid)");
  viz->add_option("--cluster", viz_options.cluster, "Centroid index");
  viz->add_option("--rescale", viz_options.rescale,
                  "Group rescaling used when the model was fit")
      ->check(CLI::IsMember({"dim", "sqrtdim"}));
  viz->add_option("--palette", viz_options.palette, "Color mapping")
      ->check(CLI::IsMember({"grayscale", "diverging"}));
  viz->add_option("--width", viz_options.width, "Output width (0 = native)");
  viz->add_option("--height", viz_options.height, "Output height (0 = native)");

  std::string stats_store;
  CLI::App* stats = app.add_subcommand("stats", "Print feature store header");
  stats->add_option("--store", stats_store, "Feature store")->required();

  try {
    app.parse(argc, argv);
    if (extract->parsed()) return run_extract(extract_options);
    if (cluster->parsed()) return run_cluster(cluster_options);
    if (pca->parsed()) return run_pca_fit(pca_options);
    if (encode->parsed()) return run_encode(encode_options);
    if (sweep->parsed()) return run_sweep(sweep_options);
    if (probe->parsed()) return run_probe(probe_options);
    if (viz->parsed()) return run_viz(viz_options);
    if (stats->parsed()) return run_stats(stats_store);
    return 1;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("soundtex");
  for (const std::string& arg : args) argv.push_back(arg.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace soundtex
