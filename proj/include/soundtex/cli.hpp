// Copyright the soundtex authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SOUNDTEX_CLI_HPP_
#define SOUNDTEX_CLI_HPP_

#include <string>
#include <vector>

#include "soundtex/labels.hpp"

namespace soundtex {

// Pipeline parameters shared by every subcommand: 32 ERB channels over
// 20 Hz - 10 kHz at the 20 kHz working rate, 10 modulation filters
// over 0.5 - 200 Hz.
constexpr int kPipelineChannels = 32;
constexpr double kPipelineLowHz = 20.0;
constexpr double kPipelineHighHz = 10000.0;
constexpr int kPipelineFftLength = 4096;
constexpr int kPipelineRate = 20000;
constexpr int kPipelineModFilters = 10;
constexpr double kPipelineModLowHz = 0.5;
constexpr double kPipelineModHighHz = 200.0;

// JSON (de)serialization of fitted models; the exact field layout is
// the persistence contract for `cluster`, `pca-fit`, `encode`, `viz`.
std::string serialize_cluster_model(const ClusterModel& model);
ClusterModel deserialize_cluster_model(const std::string& text);
std::string serialize_pca_model(const PcaModel& model);
PcaModel deserialize_pca_model(const std::string& text);

// Entry point behind main(): parses argv and runs one subcommand.
// Returns 0 on success, 1 on usage errors, 2 on data errors.
int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args);  // args without argv[0]

}  // namespace soundtex

#endif  // SOUNDTEX_CLI_HPP_
