#include "libra/experiment.hpp"

#include <atomic>
#include <thread>

#include "libra/dem.hpp"
#include "libra/rng.hpp"
#include "libra/sampler.hpp"
#include "libra/stats.hpp"

namespace libra {

std::string decoder_name(DecoderKind kind) {
    switch (kind) {
        case DecoderKind::Baseline:
            return "baseline";
        case DecoderKind::Global:
            return "global";
        case DecoderKind::Libra:
            return "libra";
        case DecoderKind::LibraDegen:
            return "libra-degen";
    }
    return "?";
}

std::optional<DecoderKind> decoder_from_name(const std::string& name) {
    if (name == "baseline")
        return DecoderKind::Baseline;
    if (name == "global")
        return DecoderKind::Global;
    if (name == "libra")
        return DecoderKind::Libra;
    if (name == "libra-degen")
        return DecoderKind::LibraDegen;
    return std::nullopt;
}

SurfaceParams surface_params_from_spec(const ExperimentSpec& spec, int distance, int rounds) {
    SurfaceParams p = SurfaceParams::from_noise(distance, rounds, spec.noise);
    if (spec.p_x)
        p.p_x = *spec.p_x;
    if (spec.p_z)
        p.p_z = *spec.p_z;
    if (spec.p_y)
        p.p_y = *spec.p_y;
    if (spec.p_m)
        p.p_m = *spec.p_m;
    return p;
}

namespace {

ObsMask prediction_for(const LibraPrediction& pred, DecoderKind kind) {
    switch (kind) {
        case DecoderKind::Baseline:
            return pred.baseline_observables;
        case DecoderKind::Global:
            return pred.predicted_observables_global;
        case DecoderKind::Libra:
            return pred.predicted_observables_bestweight;
        case DecoderKind::LibraDegen:
            return pred.predicted_observables_degeneracy;
    }
    return 0;
}

template <typename F>
void parallel_shots(uint64_t n, unsigned threads, F&& f) {
    if (threads == 0)
        threads = std::thread::hardware_concurrency();
    if (threads <= 1 || n < 64) {
        for (uint64_t i = 0; i < n; i++)
            f(i);
        return;
    }
    std::atomic<uint64_t> next{0};
    constexpr uint64_t kChunk = 32;
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    for (unsigned t = 0; t < threads; t++) {
        pool.emplace_back([&] {
            try {
                for (;;) {
                    uint64_t start = next.fetch_add(kChunk);
                    if (start >= n)
                        return;
                    uint64_t end = std::min(start + kChunk, n);
                    for (uint64_t i = start; i < end; i++)
                        f(i);
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error)
                    error = std::current_exception();
            }
        });
    }
    for (auto& th : pool)
        th.join();
    if (error)
        std::rethrow_exception(error);
}

}  // namespace

nlohmann::ordered_json run_experiment(const ExperimentSpec& spec) {
    nlohmann::ordered_json report;
    report["schema"] = "libra-bench-report/1";
    report["seed"] = spec.seed;
    report["shots"] = spec.shots;
    report["gap_threshold_db"] = spec.gap_threshold_db;
    report["heap_size"] = spec.heap_size;
    report["passes"] = spec.passes;
    report["topology"] = spec.topology == LibraConfig::Topology::Sequential ? "sequential" : "tree";
    report["sigmas"] = spec.sigmas;
    {
        std::vector<std::string> names;
        for (auto d : spec.decoders)
            names.push_back(decoder_name(d));
        report["decoders"] = names;
    }
    if (spec.model_path)
        report["model"] = *spec.model_path;
    report["cells"] = nlohmann::ordered_json::array();

    if (spec.shots == 0)
        throw ConfigError("shots must be > 0");

    struct CellKey {
        int d, r;
    };
    std::vector<CellKey> model_keys;
    if (spec.model_path) {
        model_keys.push_back({0, spec.rounds.size() == 1 ? spec.rounds[0] : 1});
    } else {
        for (int d : spec.distances)
            for (int r : spec.rounds)
                model_keys.push_back({d, r});
    }

    // eps per (distance index, s, decoder) for the lambda summary.
    struct EpsRecord {
        int d, r;
        size_t s;
        std::string decoder;
        double eps;
    };
    std::vector<EpsRecord> eps_records;

    for (auto key : model_keys) {
        ErrorModel model = spec.model_path
                               ? parse_model_file(*spec.model_path)
                               : generate_surface_model(surface_params_from_spec(spec, key.d, key.r));
        for (size_t s : spec.ensemble_sizes) {
            LibraConfig cfg;
            cfg.ensemble_size = s;
            cfg.sigmas = spec.sigmas;
            cfg.gap_threshold_db = spec.gap_threshold_db;
            cfg.store_capacity = spec.heap_size;
            cfg.topology = spec.topology;
            cfg.passes = spec.passes;
            cfg.master_seed = Rng::mix(spec.seed ^ 0x656e73656d626cull);
            LibraDecoder decoder(model, cfg);

            uint64_t n = spec.shots;
            size_t nd = spec.decoders.size();
            std::vector<uint8_t> fail(n * nd, 0);
            std::vector<uint8_t> invoked(n, 0);
            std::vector<float> cycles_applied(n, 0), cycles_stored(n, 0);
            std::vector<float> gaps(n, 0);

            parallel_shots(n, spec.threads, [&](uint64_t i) {
                ShotRecord shot = sample_shot(model, spec.seed, i, spec.debug_truth);
                LibraPrediction pred = decoder.decode(shot.syndrome);
                for (size_t k = 0; k < nd; k++)
                    fail[i * nd + k] =
                        prediction_for(pred, spec.decoders[k]) != shot.true_observables;
                invoked[i] = pred.ensemble_invoked;
                cycles_applied[i] =
                    (float)(pred.classes[0].cycles_applied + pred.classes[1].cycles_applied);
                cycles_stored[i] =
                    (float)(pred.classes[0].cycles_stored + pred.classes[1].cycles_stored);
                gaps[i] = (float)pred.gap_db;
            });

            // Deterministic order-independent aggregation.
            std::vector<uint64_t> failures(nd, 0);
            uint64_t invoked_count = 0;
            double sum_applied = 0, sum_stored = 0, sum_gap = 0;
            for (uint64_t i = 0; i < n; i++) {
                for (size_t k = 0; k < nd; k++)
                    failures[k] += fail[i * nd + k];
                invoked_count += invoked[i];
                sum_applied += cycles_applied[i];
                sum_stored += cycles_stored[i];
                sum_gap += gaps[i];
            }

            int rounds = key.r;
            nlohmann::ordered_json cell;
            cell["distance"] = key.d;
            cell["rounds"] = rounds;
            cell["ensemble_size"] = s;
            cell["num_detectors"] = model.num_detectors();
            cell["num_edges"] = model.num_edges();
            cell["gate_fraction"] = (double)invoked_count / (double)n;
            cell["mean_cycles_applied"] = sum_applied / (double)n;
            cell["mean_cycles_stored"] = sum_stored / (double)n;
            cell["mean_gap_db"] = sum_gap / (double)n;

            double eps_baseline = 0;
            bool have_baseline = false;
            for (size_t k = 0; k < nd; k++) {
                if (spec.decoders[k] == DecoderKind::Baseline) {
                    uint64_t nf = failures[k] > 0 ? failures[k] : 1;
                    eps_baseline = logical_error_rate(nf, n, rounds);
                    have_baseline = true;
                }
            }

            nlohmann::ordered_json decs;
            for (size_t k = 0; k < nd; k++) {
                nlohmann::ordered_json d;
                d["shots"] = n;
                d["failures"] = failures[k];
                bool clamped = false;
                uint64_t nf_eps = failures[k] > 0 ? failures[k] : 1;
                double eps = logical_error_rate(nf_eps, n, rounds, &clamped);
                d["ler"] = eps;
                d["ler_is_upper_bound"] = failures[k] == 0;
                d["ler_clamped"] = clamped;
                if (have_baseline) {
                    ImprovementRatio ir = improvement_ratio_counts(eps_baseline, failures[k], n, rounds);
                    d["improvement_ratio"] = ir.value;
                    d["improvement_is_lower_bound"] = ir.lower_bound;
                }
                decs[decoder_name(spec.decoders[k])] = d;
                eps_records.push_back({key.d, rounds, s, decoder_name(spec.decoders[k]), eps});
            }
            cell["decoders"] = decs;
            report["cells"].push_back(cell);
        }
    }

    // Lambda between every distance pair sharing (rounds, ensemble size).
    nlohmann::ordered_json lambdas = nlohmann::ordered_json::array();
    for (size_t i = 0; i < eps_records.size(); i++) {
        for (size_t j = 0; j < eps_records.size(); j++) {
            const auto& a = eps_records[i];
            const auto& b = eps_records[j];
            if (a.decoder != b.decoder || a.r != b.r || a.s != b.s || a.d >= b.d || a.d == 0)
                continue;
            nlohmann::ordered_json entry;
            entry["decoder"] = a.decoder;
            entry["rounds"] = a.r;
            entry["ensemble_size"] = a.s;
            entry["d_small"] = a.d;
            entry["d_large"] = b.d;
            entry["value"] = lambda(a.eps, b.eps, a.d, b.d);
            lambdas.push_back(entry);
        }
    }
    report["lambda"] = lambdas;
    return report;
}

std::string report_to_csv(const nlohmann::ordered_json& report) {
    std::string out =
        "distance,rounds,ensemble_size,decoder,shots,failures,ler,improvement_ratio,"
        "improvement_is_lower_bound\n";
    for (const auto& cell : report.at("cells")) {
        for (const auto& [name, d] : cell.at("decoders").items()) {
            out += std::to_string((int)cell.at("distance")) + ",";
            out += std::to_string((int)cell.at("rounds")) + ",";
            out += std::to_string((size_t)cell.at("ensemble_size")) + ",";
            out += name + ",";
            out += std::to_string((uint64_t)d.at("shots")) + ",";
            out += std::to_string((uint64_t)d.at("failures")) + ",";
            out += nlohmann::ordered_json(d.at("ler")).dump() + ",";
            if (d.contains("improvement_ratio")) {
                out += nlohmann::ordered_json(d.at("improvement_ratio")).dump() + ",";
                out += d.at("improvement_is_lower_bound").get<bool>() ? "true" : "false";
            } else {
                out += ",";
            }
            out += "\n";
        }
    }
    return out;
}

}  // namespace libra
