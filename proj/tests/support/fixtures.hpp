#pragma once

#include <cmath>

#include "libra/model.hpp"

namespace fixtures {

// Probability giving exactly the requested weight: p = 1/(1+e^w).
inline double prob_from_weight(double w) {
    return 1.0 / (1.0 + std::exp(w));
}

inline libra::Hyperedge edge(uint32_t id, std::vector<uint32_t> detectors, double weight,
                             libra::ObsMask obs = 0) {
    libra::Hyperedge e;
    e.id = id;
    e.detectors = std::move(detectors);
    e.probability = prob_from_weight(weight);
    e.observables = obs;
    return e;
}

// Two detectors; a: D{0} w=1, b: D{0,1} w=2, c: D{1} w=1.5 obs{0}.
// {a,b,c} is a null-syndrome logical operator.
inline libra::ErrorModel t1() {
    std::vector<libra::Hyperedge> edges = {
        edge(0, {0}, 1.0),
        edge(1, {0, 1}, 2.0),
        edge(2, {1}, 1.5, 1),
    };
    return libra::ErrorModel(2, 1, std::move(edges), {{0, 1, 2}});
}

// Parallel boundary pairs: a: D{0} w=1, a2: D{0} w=2, b: D{2} w=1, b2: D{2} w=2.
inline libra::ErrorModel t3() {
    std::vector<libra::Hyperedge> edges = {
        edge(0, {0}, 1.0),
        edge(1, {0}, 2.0),
        edge(2, {2}, 1.0),
        edge(3, {2}, 2.0),
    };
    return libra::ErrorModel(3, 1, std::move(edges));
}

}  // namespace fixtures
