// Benchmark CLI: model generation, Monte Carlo decoder comparison, and the
// exact matching oracle.
#include <cmath>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "libra/dem.hpp"
#include "libra/experiment.hpp"
#include "libra/matcher.hpp"
#include "libra/sampler.hpp"
#include "libra/surface.hpp"

namespace {

double parse_sigma_token(const std::string& token) {
    if (token.size() > 2 && token.compare(0, 2, "ln") == 0)
        return std::log(std::stod(token.substr(2)));
    return std::stod(token);
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    size_t start = 0;
    while (start <= s.size()) {
        size_t comma = s.find(',', start);
        if (comma == std::string::npos)
            comma = s.size();
        if (comma > start)
            out.push_back(s.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw libra::ConfigError("cannot open output file: " + path);
    f << content;
    if (!f)
        throw libra::ConfigError("failed writing output file: " + path);
}

int run_gen(int distance, int rounds, double p, std::optional<double> p_x,
            std::optional<double> p_z, std::optional<double> p_y, std::optional<double> p_m,
            const std::string& out) {
    libra::SurfaceParams params = libra::SurfaceParams::from_noise(distance, rounds, p);
    if (p_x)
        params.p_x = *p_x;
    if (p_z)
        params.p_z = *p_z;
    if (p_y)
        params.p_y = *p_y;
    if (p_m)
        params.p_m = *p_m;
    libra::ErrorModel model = libra::generate_surface_model(params);
    write_file(out, libra::serialize_model(model));
    std::cout << "wrote " << out << ": " << model.num_detectors() << " detectors, "
              << model.num_edges() << " error mechanisms, " << model.num_observables()
              << " observable(s)\n";
    return 0;
}

int run_oracle(const std::string& model_path, uint64_t shots, uint64_t seed, size_t max_edges,
               const std::string& out) {
    libra::ErrorModel model = libra::parse_model_file(model_path);
    if (model.num_edges() > max_edges)
        throw libra::ConfigError("model has " + std::to_string(model.num_edges()) +
                                 " error mechanisms, above --max-edges " +
                                 std::to_string(max_edges));
    nlohmann::ordered_json report;
    report["schema"] = "libra-oracle-report/1";
    report["model"] = model_path;
    report["shots"] = shots;
    report["seed"] = seed;
    report["shot_results"] = nlohmann::ordered_json::array();
    for (uint64_t i = 0; i < shots; i++) {
        libra::ShotRecord shot = libra::sample_shot(model, seed, i);
        libra::MatcherResult exact = libra::exact_mwhpm(model, shot.syndrome);
        nlohmann::ordered_json entry;
        entry["shot"] = i;
        entry["syndrome"] = shot.syndrome.indices();
        entry["true_observables"] = shot.true_observables;
        entry["weight"] = exact.weight;
        entry["config"] = exact.config.indices();
        entry["observables"] = libra::observable_of(exact.config, model);
        report["shot_results"].push_back(entry);
    }
    write_file(out, report.dump(2) + "\n");
    std::cout << "wrote " << out << ": " << shots << " exact decodes\n";
    return 0;
}

int run_bench(const libra::ExperimentSpec& spec, const std::string& out, const std::string& csv) {
    nlohmann::ordered_json report = libra::run_experiment(spec);
    write_file(out, report.dump(2) + "\n");
    if (!csv.empty())
        write_file(csv, libra::report_to_csv(report));
    std::cout << "wrote " << out;
    if (!csv.empty())
        std::cout << " and " << csv;
    std::cout << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Weighted-hypergraph decoding benchmark"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "Generate a surface-code error model file");
    int gen_d = 3, gen_r = 3;
    double gen_p = 2e-3;
    std::optional<double> gen_px, gen_pz, gen_py, gen_pm;
    std::string gen_out;
    gen->add_option("--distance", gen_d, "Code distance (odd, >= 3)")->required();
    gen->add_option("--rounds", gen_r, "Measurement rounds")->required();
    gen->add_option("--p", gen_p, "Noise parameter (data p/10, measurement p)");
    gen->add_option("--p-x", gen_px, "Override data X probability");
    gen->add_option("--p-z", gen_pz, "Override data Z probability");
    gen->add_option("--p-y", gen_py, "Override data Y probability");
    gen->add_option("--p-m", gen_pm, "Override measurement flip probability");
    gen->add_option("--out", gen_out, "Output model file")->required();

    // bench
    auto* bench = app.add_subcommand("bench", "Run the Monte Carlo decoder comparison");
    std::string b_model;
    std::vector<int> b_d, b_r;
    uint64_t b_shots = 1000, b_seed = 0;
    std::vector<size_t> b_s = {20};
    std::string b_sigmas = "ln2,ln4";
    double b_gap = 20.0;
    size_t b_heap = 30, b_passes = 2;
    std::string b_topology = "sequential";
    std::string b_decoders = "baseline,global,libra,libra-degen";
    std::string b_out, b_csv;
    bool b_truth = false;
    unsigned b_threads = 0;
    double b_p = 2e-3;
    std::optional<double> b_px, b_pz, b_py, b_pm;
    bench->add_option("--model", b_model, "Decode a stored model file");
    bench->add_option("--distance", b_d, "Code distance(s)")->delimiter(',');
    bench->add_option("--rounds", b_r, "Measurement rounds value(s)")->delimiter(',');
    bench->add_option("--p", b_p, "Noise parameter for generated models");
    bench->add_option("--p-x", b_px, "Override data X probability");
    bench->add_option("--p-z", b_pz, "Override data Z probability");
    bench->add_option("--p-y", b_py, "Override data Y probability");
    bench->add_option("--p-m", b_pm, "Override measurement flip probability");
    bench->add_option("--shots", b_shots, "Shots per cell")->required();
    bench->add_option("--seed", b_seed, "Master seed");
    bench->add_option("--ensemble-size", b_s, "Ensemble size(s)")->delimiter(',');
    bench->add_option("--sigmas", b_sigmas, "Perturbation widths, e.g. ln2,ln4 or 0.7,1.4");
    bench->add_option("--gap-threshold-db", b_gap, "Complementary-gap gate in dB");
    bench->add_option("--heap-size", b_heap, "Positive-cycle store capacity");
    bench->add_option("--passes", b_passes, "Synthesis passes over the ensemble");
    bench->add_option("--topology", b_topology, "sequential|tree")
        ->check(CLI::IsMember({"sequential", "tree"}));
    bench->add_option("--decoders", b_decoders, "Comma list: baseline,global,libra,libra-degen");
    bench->add_option("--out", b_out, "Output JSON report")->required();
    bench->add_option("--csv", b_csv, "Optional flat CSV report");
    bench->add_flag("--debug-truth", b_truth, "Keep sampled error configurations");
    bench->add_option("--threads", b_threads, "Worker threads (0: hardware concurrency)");

    // oracle
    auto* oracle = app.add_subcommand("oracle", "Exact minimum-weight decoding of sampled shots");
    std::string o_model, o_out;
    uint64_t o_shots = 100, o_seed = 0;
    size_t o_max_edges = 25;
    oracle->add_option("--model", o_model, "Model file")->required();
    oracle->add_option("--shots", o_shots, "Shots to decode")->required();
    oracle->add_option("--seed", o_seed, "Sampling seed");
    oracle->add_option("--max-edges", o_max_edges, "Refuse models above this edge count");
    oracle->add_option("--out", o_out, "Output JSON report")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed())
            return run_gen(gen_d, gen_r, gen_p, gen_px, gen_pz, gen_py, gen_pm, gen_out);
        if (oracle->parsed())
            return run_oracle(o_model, o_shots, o_seed, o_max_edges, o_out);

        libra::ExperimentSpec spec;
        if (!b_model.empty()) {
            if (!b_d.empty())
                throw libra::ConfigError("--model and --distance are mutually exclusive");
            spec.model_path = b_model;
            spec.rounds = b_r.empty() ? std::vector<int>{1} : b_r;
        } else {
            if (b_d.empty() || b_r.empty())
                throw libra::ConfigError("either --model or both --distance and --rounds required");
            spec.distances = b_d;
            spec.rounds = b_r;
        }
        spec.ensemble_sizes = b_s;
        spec.noise = b_p;
        spec.p_x = b_px;
        spec.p_z = b_pz;
        spec.p_y = b_py;
        spec.p_m = b_pm;
        spec.shots = b_shots;
        spec.seed = b_seed;
        spec.sigmas.clear();
        for (const auto& token : split_commas(b_sigmas))
            spec.sigmas.push_back(parse_sigma_token(token));
        if (spec.sigmas.empty())
            throw libra::ConfigError("--sigmas must list at least one value");
        spec.gap_threshold_db = b_gap;
        spec.heap_size = b_heap;
        spec.passes = b_passes;
        spec.topology = b_topology == "tree" ? libra::LibraConfig::Topology::Tree
                                             : libra::LibraConfig::Topology::Sequential;
        spec.decoders.clear();
        for (const auto& token : split_commas(b_decoders)) {
            auto kind = libra::decoder_from_name(token);
            if (!kind)
                throw libra::ConfigError("unknown decoder: " + token);
            spec.decoders.push_back(*kind);
        }
        if (spec.decoders.empty())
            throw libra::ConfigError("--decoders must list at least one decoder");
        spec.debug_truth = b_truth;
        spec.threads = b_threads;
        return run_bench(spec, b_out, b_csv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
