#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "libra/bitvec.hpp"

namespace libra {

// Syndrome: one bit per detector.  ErrorConfig: one bit per hyperedge of a
// fixed model; supports XOR algebra (symmetric difference of edge sets).
using Syndrome = BitVec;
using ErrorConfig = BitVec;
using ObsMask = uint64_t;

constexpr int kMaxObservables = 64;

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class InvalidProbabilityError : public Error {
  public:
    using Error::Error;
};

class DecompositionError : public Error {
  public:
    using Error::Error;
};

class InfeasibleSyndromeError : public Error {
  public:
    using Error::Error;
};

class OracleOverflowError : public Error {
  public:
    using Error::Error;
};

class ConfigError : public Error {
  public:
    using Error::Error;
};

// w = ln((1-p)/p), valid for p in (0, 0.5).
double weight_from_probability(double p);

struct EdgeComponent {
    std::vector<uint32_t> detectors;  // sorted, duplicate-free, size <= 2
    ObsMask observables = 0;
};

struct Hyperedge {
    uint32_t id = 0;
    std::vector<uint32_t> detectors;  // sorted, duplicate-free
    double probability = 0;
    double weight = 0;
    ObsMask observables = 0;
    std::vector<EdgeComponent> decomposition;  // empty when not decomposed

    size_t degree() const {
        return detectors.size();
    }
};

// Weighted error hypergraph.  Immutable after construction; validation runs
// in the constructor.  Weights are recomputed from probabilities.
class ErrorModel {
  public:
    ErrorModel(size_t num_detectors, size_t num_observables, std::vector<Hyperedge> edges,
               std::vector<std::vector<uint32_t>> logical_representatives = {});

    size_t num_detectors() const {
        return num_detectors_;
    }
    size_t num_observables() const {
        return num_observables_;
    }
    const std::vector<Hyperedge>& edges() const {
        return edges_;
    }
    const Hyperedge& edge(size_t i) const {
        return edges_[i];
    }
    size_t num_edges() const {
        return edges_.size();
    }
    const std::vector<ErrorConfig>& logical_representatives() const {
        return logical_representatives_;
    }
    // Detector set of edge i as a bitset (cached for XOR-heavy use).
    const BitVec& edge_detectors(size_t i) const {
        return edge_bits_[i];
    }

    Syndrome empty_syndrome() const {
        return Syndrome(num_detectors_);
    }
    ErrorConfig empty_config() const {
        return ErrorConfig(edges_.size());
    }
    ErrorConfig make_config(const std::vector<uint32_t>& members) const;

  private:
    size_t num_detectors_;
    size_t num_observables_;
    std::vector<Hyperedge> edges_;
    std::vector<BitVec> edge_bits_;
    std::vector<ErrorConfig> logical_representatives_;
};

Syndrome syndrome_of(const ErrorConfig& config, const ErrorModel& model);
ObsMask observable_of(const ErrorConfig& config, const ErrorModel& model);
double config_weight(const ErrorConfig& config, const ErrorModel& model);

inline ErrorConfig config_xor(const ErrorConfig& a, const ErrorConfig& b) {
    return a ^ b;
}

}  // namespace libra
