#include "libra/model.hpp"

#include <algorithm>
#include <cmath>

namespace libra {

double weight_from_probability(double p) {
    if (!(p > 0.0) || !(p < 0.5))
        throw InvalidProbabilityError("probability must be in (0, 0.5), got " + std::to_string(p));
    return std::log((1.0 - p) / p);
}

namespace {

void check_sorted_unique(const std::vector<uint32_t>& v, const char* what) {
    for (size_t i = 1; i < v.size(); i++)
        if (v[i] <= v[i - 1])
            throw ConfigError(std::string(what) + " list must be sorted and duplicate-free");
}

}  // namespace

ErrorModel::ErrorModel(size_t num_detectors, size_t num_observables, std::vector<Hyperedge> edges,
                       std::vector<std::vector<uint32_t>> logical_representatives)
    : num_detectors_(num_detectors), num_observables_(num_observables), edges_(std::move(edges)) {
    if (num_observables_ > kMaxObservables)
        throw ConfigError("at most 64 observables supported");
    ObsMask obs_limit = num_observables_ >= 64 ? ~ObsMask{0} : ((ObsMask{1} << num_observables_) - 1);
    edge_bits_.reserve(edges_.size());
    for (size_t i = 0; i < edges_.size(); i++) {
        Hyperedge& e = edges_[i];
        e.id = (uint32_t)i;
        check_sorted_unique(e.detectors, "detector");
        for (uint32_t d : e.detectors)
            if (d >= num_detectors_)
                throw ConfigError("detector index " + std::to_string(d) + " out of range");
        if ((e.observables & ~obs_limit) != 0)
            throw ConfigError("observable index out of range on edge " + std::to_string(i));
        e.weight = weight_from_probability(e.probability);

        BitVec bits(num_detectors_);
        for (uint32_t d : e.detectors)
            bits.set(d);
        if (!e.decomposition.empty()) {
            BitVec xord(num_detectors_);
            ObsMask obs = 0;
            for (const auto& comp : e.decomposition) {
                check_sorted_unique(comp.detectors, "component detector");
                if (comp.detectors.size() > 2)
                    throw DecompositionError("component of edge " + std::to_string(i) + " has degree > 2");
                for (uint32_t d : comp.detectors) {
                    if (d >= num_detectors_)
                        throw ConfigError("component detector index out of range");
                    xord.flip(d);
                }
                obs ^= comp.observables;
            }
            if (xord != bits || obs != e.observables)
                throw DecompositionError("decomposition of edge " + std::to_string(i) +
                                         " does not XOR to the hyperedge");
        }
        edge_bits_.push_back(std::move(bits));
    }
    for (const auto& members : logical_representatives) {
        ErrorConfig rep = empty_config();
        for (uint32_t m : members) {
            if (m >= edges_.size())
                throw ConfigError("logical representative references unknown edge " + std::to_string(m));
            rep.flip(m);
        }
        if (syndrome_of(rep, *this).any())
            throw ConfigError("logical representative has nonzero syndrome");
        if (observable_of(rep, *this) == 0)
            throw ConfigError("logical representative has zero observable mask");
        logical_representatives_.push_back(std::move(rep));
    }
}

ErrorConfig ErrorModel::make_config(const std::vector<uint32_t>& members) const {
    ErrorConfig c = empty_config();
    for (uint32_t m : members) {
        if (m >= edges_.size())
            throw ConfigError("edge index out of range: " + std::to_string(m));
        c.flip(m);
    }
    return c;
}

Syndrome syndrome_of(const ErrorConfig& config, const ErrorModel& model) {
    Syndrome s = model.empty_syndrome();
    config.for_each_set([&](size_t e) { s ^= model.edge_detectors(e); });
    return s;
}

ObsMask observable_of(const ErrorConfig& config, const ErrorModel& model) {
    ObsMask o = 0;
    config.for_each_set([&](size_t e) { o ^= model.edge(e).observables; });
    return o;
}

double config_weight(const ErrorConfig& config, const ErrorModel& model) {
    double w = 0;
    config.for_each_set([&](size_t e) { w += model.edge(e).weight; });
    return w;
}

}  // namespace libra
