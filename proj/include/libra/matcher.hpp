#pragma once

#include <map>
#include <optional>
#include <vector>

#include "libra/model.hpp"

namespace libra {

struct BasisEdge {
    int32_t node_a = -1;  // detector index
    int32_t node_b = -1;  // second detector, or -1 for a boundary edge
    double probability = 0;
    double weight = 0;
    ObsMask observables = 0;  // observable mask of this component
    uint32_t source_edge = 0;
    uint32_t component = 0;
    bool standalone = false;  // source hyperedge has a single component
};

// The model's hyperedges split into two degree-<=2 graphs (one per basis),
// with back-references to the source hyperedges for reassembly.
struct DecomposedGraph {
    struct Basis {
        std::vector<BasisEdge> edges;
        std::vector<std::vector<uint32_t>> adjacency;  // per detector
        std::vector<double> boundary_dist;             // base-weight distance bound to boundary
        bool has_boundary = false;
        // Summed probability of stand-alone mechanisms per edge slot.
        std::map<std::pair<int32_t, int32_t>, double> slot_prob;
    };

    std::vector<int8_t> detector_basis;
    Basis basis[2];
    // Basis holding every observable-flagged component, when all such
    // components live in one basis and share one mask; -1 if there are
    // none, -2 if they are mixed (parity-constrained matching unavailable).
    int obs_basis = -1;
    // (sorted detectors, observables) -> lowest-weight stand-alone edge id.
    std::map<std::pair<std::vector<uint32_t>, ObsMask>, uint32_t> standalone_by_shape;
    // Per source hyperedge: (basis, basis-edge index) of each graph edge.
    std::vector<std::vector<std::pair<int, uint32_t>>> edges_of_source;
};

DecomposedGraph decompose(const ErrorModel& model);

struct EdgeMatchResult {
    std::vector<uint32_t> graph_edges;  // indices into the basis edge list
    bool exact = true;
};

// Minimum-weight matching of the defects within one basis graph.  Exact
// (bitmask DP over pairings) up to 22 defects, greedy with 2-swap
// improvement beyond that.  `weights` overrides the per-edge weights.
EdgeMatchResult match_edges(const DecomposedGraph::Basis& basis, size_t num_detectors,
                            const std::vector<uint32_t>& defects, const std::vector<double>& weights);

struct ParityMatchResult {
    std::vector<uint32_t> graph_edges;  // indices into the basis edge list
    bool exact = true;
    bool ok = false;  // false when no matching of the requested parity exists
};

// Minimum-weight defect matching constrained to a fixed parity of
// observable-crossing edges, via Dijkstra over (node, parity) states and a
// parity-augmented pairing DP.  Parity 1 with no defects yields the lightest
// odd boundary-to-boundary loop (a minimum-weight logical operator).
ParityMatchResult match_edges_parity(const DecomposedGraph::Basis& basis, size_t num_detectors,
                                     const std::vector<uint32_t>& defects,
                                     const std::vector<double>& weights, uint8_t target_parity);

struct MatcherResult {
    ErrorConfig config;
    double weight = 0;
    bool exact = true;
};

class CorrelatedMatcher {
  public:
    explicit CorrelatedMatcher(const ErrorModel& model);

    MatcherResult decode(const Syndrome& syndrome) const;

    // Best decode whose observable parity in the observable-carrying basis
    // is forced to `target_parity`; nullopt when the graph does not support
    // parity constraints or no such matching exists.
    std::optional<MatcherResult> decode_with_parity(const Syndrome& syndrome,
                                                    uint8_t target_parity) const;

    const ErrorModel& model() const {
        return *model_;
    }
    const DecomposedGraph& graph() const {
        return graph_;
    }

  private:
    std::vector<double> reweighted_weights1(const std::vector<uint32_t>& m0_edges) const;
    MatcherResult assemble(const std::vector<uint32_t>& m0_edges,
                           const std::vector<uint32_t>& m1_edges, bool exact) const;

    const ErrorModel* model_;  // not owned; must outlive the matcher
    DecomposedGraph graph_;
};

// Two-pass correlated matching: match basis 0, reweight companion edges of
// matched multi-component hyperedges, match basis 1, then assign hyperedges.
MatcherResult correlated_decode(const ErrorModel& model, const Syndrome& syndrome);

// Exhaustive minimum-weight hypergraph matching oracle.  Gray-code
// enumeration up to 25 edges; branch-and-bound with a node budget beyond.
MatcherResult exact_mwhpm(const ErrorModel& model, const Syndrome& syndrome, uint64_t node_budget = 0);

}  // namespace libra
