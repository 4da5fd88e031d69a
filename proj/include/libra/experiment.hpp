#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "libra/libra.hpp"
#include "libra/surface.hpp"

namespace libra {

enum class DecoderKind { Baseline, Global, Libra, LibraDegen };

std::string decoder_name(DecoderKind kind);
std::optional<DecoderKind> decoder_from_name(const std::string& name);

struct ExperimentSpec {
    std::optional<std::string> model_path;  // mutually exclusive with distances/rounds
    std::vector<int> distances = {3};
    std::vector<int> rounds = {3};
    std::vector<size_t> ensemble_sizes = {20};
    double noise = 2e-3;  // SI-1000-style parameter p
    std::optional<double> p_x, p_z, p_y, p_m;

    uint64_t shots = 1000;
    uint64_t seed = 0;
    std::vector<double> sigmas = {0.6931471805599453, 1.3862943611198906};  // ln 2, ln 4
    double gap_threshold_db = 20.0;
    size_t heap_size = 30;
    size_t passes = 2;
    LibraConfig::Topology topology = LibraConfig::Topology::Sequential;
    std::vector<DecoderKind> decoders = {DecoderKind::Baseline, DecoderKind::Global,
                                         DecoderKind::Libra, DecoderKind::LibraDegen};
    bool debug_truth = false;
    unsigned threads = 0;  // 0: hardware concurrency
};

// Runs the full sweep: for every (d, r, s) cell, sample shots (shared
// across ensemble sizes), decode each shot with every enabled decoder,
// count failures, and aggregate.  Deterministic given the seed, including
// under parallel execution.
nlohmann::ordered_json run_experiment(const ExperimentSpec& spec);

std::string report_to_csv(const nlohmann::ordered_json& report);

SurfaceParams surface_params_from_spec(const ExperimentSpec& spec, int distance, int rounds);

}  // namespace libra
