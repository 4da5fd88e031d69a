#pragma once

#include <cmath>
#include <memory>
#include <vector>

#include "libra/matcher.hpp"
#include "libra/model.hpp"
#include "libra/synthesis.hpp"

namespace libra {

struct LibraConfig {
    enum class Topology { Sequential, Tree };

    size_t ensemble_size = 20;
    // Block allocation over the members; default half ln 2, half ln 4.
    std::vector<double> sigmas = {std::log(2.0), std::log(4.0)};
    double gap_threshold_db = 20.0;
    size_t store_capacity = 30;
    Topology topology = Topology::Sequential;
    size_t passes = 2;
    uint64_t master_seed = 0;
};

struct ClassDiagnostics {
    double final_weight = 0;
    double log_probability = 0;  // -weight + log(degeneracy factor)
    size_t cycles_applied = 0;
    size_t cycles_stored = 0;
};

struct LibraPrediction {
    ObsMask predicted_observables_bestweight = 0;
    ObsMask predicted_observables_degeneracy = 0;
    ObsMask predicted_observables_global = 0;
    ObsMask baseline_observables = 0;
    double gap_db = 0;
    bool ensemble_invoked = false;
    ClassDiagnostics classes[2];
};

// Multiply every edge probability by an independent log-normal factor
// exp(t), t ~ Norm(0, sigma^2); deterministic in (seed, member_index).
// Probabilities are clamped below 0.5; `clamp_count` reports how many.
ErrorModel perturb_model(const ErrorModel& model, double sigma, uint64_t seed, uint64_t member_index,
                         size_t* clamp_count = nullptr);

struct ComplementaryResult {
    MatcherResult class0;  // the lower-weight class
    MatcherResult class1;
    double gap_db = 0;
};

// Correlated matching plus the best cross-class candidate obtained by XOR
// with a logical representative; the gap is the weight difference in dB.
ComplementaryResult complementary_match(const ErrorModel& model, const Syndrome& syndrome,
                                        const CorrelatedMatcher& matcher);

// The full ensemble decoder: complementary matching with gap gating, a
// perturbed correlated-matching ensemble, per-class matching synthesis in
// two passes, and final selection by weight and by degeneracy-weighted
// class probability.  All weights entering synthesis and selection are the
// unperturbed ones.
class LibraDecoder {
  public:
    LibraDecoder(const ErrorModel& model, LibraConfig cfg);

    LibraPrediction decode(const Syndrome& syndrome) const;

    size_t clamped_probabilities() const {
        return clamp_count_;
    }
    const LibraConfig& config() const {
        return cfg_;
    }

  private:
    const ErrorModel* model_;  // not owned; must outlive the decoder
    LibraConfig cfg_;
    CorrelatedMatcher baseline_;
    std::vector<std::unique_ptr<ErrorModel>> member_models_;
    std::vector<std::unique_ptr<CorrelatedMatcher>> member_matchers_;
    size_t clamp_count_ = 0;
};

// One-shot convenience wrapper.
LibraPrediction libra_decode(const ErrorModel& model, const Syndrome& syndrome, const LibraConfig& cfg);

inline double weight_gap_db(double w_low, double w_high) {
    return 10.0 * std::abs(w_high - w_low) / std::log(10.0);
}

}  // namespace libra
