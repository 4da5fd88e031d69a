#include "libra/libra.hpp"

#include <algorithm>

#include "libra/rng.hpp"

namespace libra {

namespace {

constexpr double kProbClamp = 0.5 - 1e-9;
constexpr size_t kMaxSeenLogicals = 64;

}  // namespace

ErrorModel perturb_model(const ErrorModel& model, double sigma, uint64_t seed, uint64_t member_index,
                         size_t* clamp_count) {
    if (sigma < 0)
        throw ConfigError("sigma must be >= 0");
    Rng rng(seed, Rng::mix(0x6c69627261ull) ^ member_index);
    std::vector<Hyperedge> edges = model.edges();
    size_t clamped = 0;
    for (auto& e : edges) {
        double factor = std::exp(rng.next_normal(sigma));
        double p = e.probability * factor;
        if (p > kProbClamp) {
            p = kProbClamp;
            clamped++;
        }
        e.probability = p;
    }
    std::vector<std::vector<uint32_t>> reps;
    for (const auto& rep : model.logical_representatives())
        reps.push_back(rep.indices());
    if (clamp_count)
        *clamp_count += clamped;
    return ErrorModel(model.num_detectors(), model.num_observables(), std::move(edges), std::move(reps));
}

namespace {

ComplementaryResult complementary_from(const ErrorModel& model, const Syndrome& syndrome,
                                       const CorrelatedMatcher& matcher, MatcherResult primary) {
    if (model.logical_representatives().empty())
        throw ConfigError("complementary matching requires at least one logical representative");

    // Opposite-class candidates: a parity-forced re-match when the graph
    // supports it, plus the XOR of each logical representative as fallback.
    MatcherResult other;
    bool first = true;
    uint8_t target = observable_of(primary.config, model) ? 0 : 1;
    if (auto forced = matcher.decode_with_parity(syndrome, target)) {
        other = std::move(*forced);
        first = false;
    }
    for (const auto& rep : model.logical_representatives()) {
        ErrorConfig candidate = primary.config ^ rep;
        double w = config_weight(candidate, model);
        if (first || w < other.weight) {
            other.config = std::move(candidate);
            other.weight = w;
            other.exact = primary.exact;
            first = false;
        }
    }

    ComplementaryResult out;
    if (other.weight < primary.weight) {
        out.class0 = std::move(other);
        out.class1 = std::move(primary);
    } else {
        out.class0 = std::move(primary);
        out.class1 = std::move(other);
    }
    out.gap_db = weight_gap_db(out.class0.weight, out.class1.weight);
    return out;
}

}  // namespace

ComplementaryResult complementary_match(const ErrorModel& model, const Syndrome& syndrome,
                                        const CorrelatedMatcher& matcher) {
    return complementary_from(model, syndrome, matcher, matcher.decode(syndrome));
}

LibraDecoder::LibraDecoder(const ErrorModel& model, LibraConfig cfg)
    : model_(&model), cfg_(std::move(cfg)), baseline_(model) {
    if (cfg_.sigmas.empty())
        throw ConfigError("at least one sigma value is required");
    for (size_t i = 0; i < cfg_.ensemble_size; i++) {
        double sigma = cfg_.sigmas[i * cfg_.sigmas.size() / cfg_.ensemble_size];
        member_models_.push_back(std::make_unique<ErrorModel>(
            perturb_model(model, sigma, cfg_.master_seed, i, &clamp_count_)));
        member_matchers_.push_back(std::make_unique<CorrelatedMatcher>(*member_models_.back()));
    }
}

namespace {

struct ClassState {
    ErrorConfig base;
    ObsMask obs = 0;
    PositiveCycleStore store;
    std::vector<ErrorConfig> seen_logicals;
    size_t cycles_applied = 0;
    size_t cycles_stored = 0;

    ClassState(ErrorConfig b, ObsMask o, size_t capacity)
        : base(std::move(b)), obs(o), store(capacity) {}
};

// Synthesize one partner matching into the class; partners from the other
// equivalence class are first routed through the best known cross-class
// difference so the bulk of the diff is made of cycles.
void feed_class(ClassState& cls, const ClassState& other_cls, const ErrorConfig& member,
                ObsMask member_obs, const ErrorModel& model) {
    ErrorConfig partner = member;
    if (member_obs != cls.obs)
        partner ^= cls.base ^ other_cls.base;

    SynthesisOutcome outcome = synthesize(cls.base, partner, model, &cls.store);
    cls.base = outcome.result;
    cls.cycles_applied += outcome.cycles_applied;
    cls.cycles_stored += outcome.cycles_stored;

    // Pairs of equivalent logical pieces become candidate cycles and feed
    // the same improving/store pipeline.
    for (const auto& piece : outcome.logical_pieces) {
        ObsMask piece_obs = observable_of(piece.edges, model);
        for (const auto& seen : cls.seen_logicals) {
            if (observable_of(seen, model) != piece_obs)
                continue;
            ErrorConfig cycle = piece.edges ^ seen;
            if (cycle.none())
                continue;
            double rw = relative_weight(cycle, cls.base, model);
            if (rw < 0) {
                cls.base ^= cycle;
                cls.cycles_applied++;
                cls.store.rebase(cls.base);  // base changed: store clears
            } else {
                cls.store.rebase(cls.base);
                cls.store.offer(cycle, rw);
                cls.cycles_stored++;
            }
        }
        if (cls.seen_logicals.size() < kMaxSeenLogicals)
            cls.seen_logicals.push_back(piece.edges);
    }
}

ErrorConfig tree_reduce(std::vector<ErrorConfig> configs, const ErrorModel& model) {
    while (configs.size() > 1) {
        std::vector<ErrorConfig> next;
        for (size_t i = 0; i + 1 < configs.size(); i += 2) {
            double wa = config_weight(configs[i], model);
            double wb = config_weight(configs[i + 1], model);
            const ErrorConfig& base = wa <= wb ? configs[i] : configs[i + 1];
            const ErrorConfig& other = wa <= wb ? configs[i + 1] : configs[i];
            next.push_back(synthesize(base, other, model, nullptr).result);
        }
        if (configs.size() % 2)
            next.push_back(std::move(configs.back()));
        configs = std::move(next);
    }
    return configs.empty() ? ErrorConfig() : configs[0];
}

}  // namespace

LibraPrediction LibraDecoder::decode(const Syndrome& syndrome) const {
    const ErrorModel& model = *model_;
    if (model.num_observables() != 1)
        throw ConfigError("libra decode supports exactly one observable (two equivalence classes)");

    MatcherResult baseline = baseline_.decode(syndrome);
    ObsMask baseline_obs = observable_of(baseline.config, model);
    ComplementaryResult comp = complementary_from(model, syndrome, baseline_, baseline);

    LibraPrediction pred;
    pred.baseline_observables = baseline_obs;
    pred.gap_db = comp.gap_db;
    pred.classes[0].final_weight = comp.class0.weight;
    pred.classes[1].final_weight = comp.class1.weight;
    pred.ensemble_invoked = comp.gap_db < cfg_.gap_threshold_db && cfg_.ensemble_size > 0;
    if (!pred.ensemble_invoked) {
        pred.predicted_observables_bestweight = baseline_obs;
        pred.predicted_observables_degeneracy = baseline_obs;
        pred.predicted_observables_global = baseline_obs;
        pred.classes[0].log_probability = -comp.class0.weight;
        pred.classes[1].log_probability = -comp.class1.weight;
        return pred;
    }

    std::vector<ErrorConfig> member_configs;
    std::vector<ObsMask> member_obs;
    std::vector<double> member_weights;  // unperturbed
    member_configs.reserve(cfg_.ensemble_size);
    for (size_t i = 0; i < cfg_.ensemble_size; i++) {
        MatcherResult r = member_matchers_[i]->decode(syndrome);
        member_obs.push_back(observable_of(r.config, model));
        member_weights.push_back(config_weight(r.config, model));
        member_configs.push_back(std::move(r.config));
    }

    size_t global_best = 0;
    for (size_t i = 1; i < cfg_.ensemble_size; i++)
        if (member_weights[i] < member_weights[global_best])
            global_best = i;
    pred.predicted_observables_global = member_obs[global_best];

    ClassState classes[2] = {
        ClassState(comp.class0.config, observable_of(comp.class0.config, model), cfg_.store_capacity),
        ClassState(comp.class1.config, observable_of(comp.class1.config, model), cfg_.store_capacity),
    };

    for (size_t pass = 0; pass < cfg_.passes; pass++) {
        if (cfg_.topology == LibraConfig::Topology::Sequential) {
            for (size_t i = 0; i < cfg_.ensemble_size; i++)
                for (auto& cls : classes)
                    feed_class(cls, &cls == &classes[0] ? classes[1] : classes[0], member_configs[i],
                               member_obs[i], model);
        } else {
            ErrorConfig combined = tree_reduce(member_configs, model);
            ObsMask combined_obs = observable_of(combined, model);
            for (auto& cls : classes)
                feed_class(cls, &cls == &classes[0] ? classes[1] : classes[0], combined, combined_obs,
                           model);
        }
    }

    double weights[2];
    for (int k = 0; k < 2; k++) {
        weights[k] = config_weight(classes[k].base, model);
        pred.classes[k].final_weight = weights[k];
        pred.classes[k].cycles_applied = classes[k].cycles_applied;
        pred.classes[k].cycles_stored = classes[k].cycles_stored;
        pred.classes[k].log_probability =
            -weights[k] + std::log(degeneracy_factor(classes[k].store, model));
    }
    int best = weights[1] < weights[0] ? 1 : 0;
    pred.predicted_observables_bestweight = classes[best].obs;
    int degen = pred.classes[1].log_probability > pred.classes[0].log_probability ? 1 : 0;
    pred.predicted_observables_degeneracy = classes[degen].obs;
    return pred;
}

LibraPrediction libra_decode(const ErrorModel& model, const Syndrome& syndrome, const LibraConfig& cfg) {
    LibraDecoder decoder(model, cfg);
    return decoder.decode(syndrome);
}

}  // namespace libra
