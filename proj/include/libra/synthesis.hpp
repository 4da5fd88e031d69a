#pragma once

#include <optional>
#include <unordered_set>
#include <vector>

#include "libra/model.hpp"

namespace libra {

// A connected null-syndrome component of a symmetric difference.
struct Piece {
    enum class Kind { Cycle, Logical };

    ErrorConfig edges;
    Kind kind = Kind::Cycle;  // Cycle iff observable_of(edges) == 0
    double relative_weight = 0;
};

// Fixed-capacity store of the smallest nonnegative-relative-weight cycles,
// relative to one base matching.  Deduplicated by edge-set identity; the
// largest entry is evicted first when full.
class PositiveCycleStore {
  public:
    explicit PositiveCycleStore(size_t capacity = 30) : capacity_(capacity) {}

    size_t capacity() const {
        return capacity_;
    }
    size_t size() const {
        return entries_.size();
    }
    bool empty() const {
        return entries_.empty();
    }

    const std::vector<Piece>& entries() const {
        return entries_;
    }
    const std::optional<ErrorConfig>& base() const {
        return base_;
    }

    // Any base change clears the store.
    void rebase(const ErrorConfig& base);
    void clear();
    // Requires relative_weight >= 0; duplicates are skipped.
    void offer(const ErrorConfig& cycle, double relative_weight);

  private:
    size_t capacity_;
    std::vector<Piece> entries_;
    std::unordered_set<ErrorConfig, BitVecHash> keys_;
    std::optional<ErrorConfig> base_;
};

// Connected components of a null-syndrome diff under shared-detector
// adjacency, classified as cycles or logical operators.
std::vector<Piece> split_null_components(const ErrorConfig& diff, const ErrorModel& model);

// w(piece \ base) - w(piece intersect base); linear in |piece|.
double relative_weight(const ErrorConfig& piece, const ErrorConfig& base, const ErrorModel& model);

struct SynthesisOutcome {
    ErrorConfig result;
    std::vector<Piece> logical_pieces;  // reported for class handling
    bool improved = false;
    size_t cycles_applied = 0;
    size_t cycles_stored = 0;
};

// Matching synthesis: decompose base^other into pieces, XOR the improving
// cycles into base (ascending relative weight, re-evaluated as the base
// updates), offer small-positive cycles to the store.  The store is cleared
// before new offers whenever an improving cycle was applied.
SynthesisOutcome synthesize(const ErrorConfig& base, const ErrorConfig& other, const ErrorModel& model,
                            PositiveCycleStore* store);

// XOR of every pair of equal-observable logical pieces, as candidate cycles.
std::vector<Piece> pair_logicals(const std::vector<Piece>& logical_pieces, const ErrorConfig& base,
                                 const ErrorModel& model);

// Multiplicative probability correction from the stored small-positive
// cycles: per overlap-connected component, the deduplicated sum of
// exp(-relative weight) over generated combinations (exhaustive below 10
// cycles, singles+pairs at or above), product over components.
double degeneracy_factor(const PositiveCycleStore& store, const ErrorModel& model);

}  // namespace libra
