#include "libra/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <unordered_map>

namespace libra {

void PositiveCycleStore::rebase(const ErrorConfig& base) {
    if (!base_ || *base_ != base) {
        clear();
        base_ = base;
    }
}

void PositiveCycleStore::clear() {
    entries_.clear();
    keys_.clear();
}

void PositiveCycleStore::offer(const ErrorConfig& cycle, double rel_weight) {
    if (capacity_ == 0 || rel_weight < 0)
        return;
    if (keys_.count(cycle))
        return;
    if (entries_.size() >= capacity_) {
        // Evict the largest entry (ties broken toward the lexicographically
        // larger edge set, for determinism) if the candidate beats it.
        size_t worst = 0;
        for (size_t i = 1; i < entries_.size(); i++) {
            if (entries_[i].relative_weight > entries_[worst].relative_weight ||
                (entries_[i].relative_weight == entries_[worst].relative_weight &&
                 entries_[worst].edges.lex_less(entries_[i].edges)))
                worst = i;
        }
        if (entries_[worst].relative_weight <= rel_weight)
            return;
        keys_.erase(entries_[worst].edges);
        entries_.erase(entries_.begin() + (long)worst);
    }
    keys_.insert(cycle);
    entries_.push_back({cycle, Piece::Kind::Cycle, rel_weight});
}

std::vector<Piece> split_null_components(const ErrorConfig& diff, const ErrorModel& model) {
    if (syndrome_of(diff, model).any())
        throw ConfigError("split_null_components requires a null-syndrome input");

    std::vector<uint32_t> members = diff.indices();
    size_t n = members.size();
    std::vector<Piece> pieces;
    if (n == 0)
        return pieces;

    // Union-find over the member edges; edges sharing a detector join.
    std::vector<uint32_t> parent(n);
    for (size_t i = 0; i < n; i++)
        parent[i] = (uint32_t)i;
    std::function<uint32_t(uint32_t)> find = [&](uint32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };

    std::unordered_map<uint32_t, uint32_t> owner;  // detector -> member index
    for (size_t i = 0; i < n; i++) {
        for (uint32_t d : model.edge(members[i]).detectors) {
            auto [it, fresh] = owner.try_emplace(d, (uint32_t)i);
            if (!fresh)
                parent[find((uint32_t)i)] = find(it->second);
        }
    }

    std::unordered_map<uint32_t, size_t> piece_of_root;
    for (size_t i = 0; i < n; i++) {
        uint32_t root = find((uint32_t)i);
        auto [it, fresh] = piece_of_root.try_emplace(root, pieces.size());
        if (fresh)
            pieces.push_back({model.empty_config(), Piece::Kind::Cycle, 0});
        pieces[it->second].edges.set(members[i]);
    }
    for (auto& piece : pieces) {
        ObsMask obs = observable_of(piece.edges, model);
        piece.kind = obs == 0 ? Piece::Kind::Cycle : Piece::Kind::Logical;
    }
    return pieces;
}

double relative_weight(const ErrorConfig& piece, const ErrorConfig& base, const ErrorModel& model) {
    double w = 0;
    piece.for_each_set([&](size_t e) {
        w += base.test(e) ? -model.edge(e).weight : model.edge(e).weight;
    });
    return w;
}

SynthesisOutcome synthesize(const ErrorConfig& base, const ErrorConfig& other, const ErrorModel& model,
                            PositiveCycleStore* store) {
    Syndrome sb = syndrome_of(base, model);
    Syndrome so = syndrome_of(other, model);
    if (sb != so)
        throw ConfigError("synthesize requires matchings for the same syndrome");

    SynthesisOutcome out;
    out.result = base;
    ErrorConfig diff = base ^ other;
    std::vector<Piece> pieces = split_null_components(diff, model);

    std::vector<Piece> cycles;
    for (auto& piece : pieces) {
        if (piece.kind == Piece::Kind::Logical) {
            out.logical_pieces.push_back(std::move(piece));
        } else {
            piece.relative_weight = relative_weight(piece.edges, out.result, model);
            cycles.push_back(std::move(piece));
        }
    }
    std::sort(cycles.begin(), cycles.end(), [](const Piece& a, const Piece& b) {
        if (a.relative_weight != b.relative_weight)
            return a.relative_weight < b.relative_weight;
        return a.edges.lex_less(b.edges);
    });

    // Apply improving cycles in ascending relative-weight order, re-evaluated
    // against the progressively updated base; iterate until stable since
    // overlapping cycles inside one component can interact.
    std::vector<Piece> pending = std::move(cycles);
    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<Piece> still_pending;
        for (auto& c : pending) {
            double rw = relative_weight(c.edges, out.result, model);
            if (rw < 0) {
                out.result ^= c.edges;
                out.improved = true;
                out.cycles_applied++;
                changed = true;
            } else {
                c.relative_weight = rw;
                still_pending.push_back(std::move(c));
            }
        }
        pending = std::move(still_pending);
    }

    if (store) {
        if (out.improved)
            store->clear();
        store->rebase(out.result);
        for (const auto& c : pending) {
            store->offer(c.edges, relative_weight(c.edges, out.result, model));
            out.cycles_stored++;
        }
    }
    return out;
}

std::vector<Piece> pair_logicals(const std::vector<Piece>& logical_pieces, const ErrorConfig& base,
                                 const ErrorModel& model) {
    std::vector<Piece> candidates;
    for (size_t i = 0; i < logical_pieces.size(); i++) {
        ObsMask oi = observable_of(logical_pieces[i].edges, model);
        for (size_t j = i + 1; j < logical_pieces.size(); j++) {
            if (observable_of(logical_pieces[j].edges, model) != oi)
                continue;
            ErrorConfig cycle = logical_pieces[i].edges ^ logical_pieces[j].edges;
            if (cycle.none())
                continue;  // identical pieces cancel entirely
            candidates.push_back(
                {cycle, Piece::Kind::Cycle, relative_weight(cycle, base, model)});
        }
    }
    return candidates;
}

namespace {

double component_sum_exhaustive(const std::vector<const Piece*>& cycles, const ErrorConfig& base,
                                const ErrorModel& model) {
    std::unordered_set<ErrorConfig, BitVecHash> seen;
    ErrorConfig null_cycle(base.size());
    seen.insert(null_cycle);
    double sum = 1.0;  // the null cycle has relative probability 1
    size_t k = cycles.size();
    for (size_t mask = 1; mask < (size_t{1} << k); mask++) {
        ErrorConfig combo(base.size());
        for (size_t i = 0; i < k; i++)
            if (mask & (size_t{1} << i))
                combo ^= cycles[i]->edges;
        if (!seen.insert(combo).second)
            continue;  // generators need not be linearly independent
        sum += std::exp(-relative_weight(combo, base, model));
    }
    return sum;
}

double component_sum_truncated(const std::vector<const Piece*>& cycles, const ErrorConfig& base,
                               const ErrorModel& model) {
    std::unordered_set<ErrorConfig, BitVecHash> seen;
    seen.insert(ErrorConfig(base.size()));
    double sum = 1.0;
    for (size_t i = 0; i < cycles.size(); i++) {
        if (seen.insert(cycles[i]->edges).second)
            sum += std::exp(-relative_weight(cycles[i]->edges, base, model));
        for (size_t j = i + 1; j < cycles.size(); j++) {
            ErrorConfig combo = cycles[i]->edges ^ cycles[j]->edges;
            if (seen.insert(combo).second)
                sum += std::exp(-relative_weight(combo, base, model));
        }
    }
    return sum;
}

}  // namespace

double degeneracy_factor(const PositiveCycleStore& store, const ErrorModel& model) {
    if (store.empty())
        return 1.0;
    const ErrorConfig& base = store.base() ? *store.base() : ErrorConfig(model.num_edges());
    const auto& entries = store.entries();
    size_t n = entries.size();

    // Connected components by edge overlap.
    std::vector<uint32_t> parent(n);
    for (size_t i = 0; i < n; i++)
        parent[i] = (uint32_t)i;
    std::function<uint32_t(uint32_t)> find = [&](uint32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (size_t i = 0; i < n; i++)
        for (size_t j = i + 1; j < n; j++)
            if (entries[i].edges.intersects(entries[j].edges))
                parent[find((uint32_t)j)] = find((uint32_t)i);

    // Components in deterministic (first-member) order.
    std::vector<std::vector<const Piece*>> components;
    std::unordered_map<uint32_t, size_t> component_of_root;
    for (size_t i = 0; i < n; i++) {
        uint32_t root = find((uint32_t)i);
        auto [it, fresh] = component_of_root.try_emplace(root, components.size());
        if (fresh)
            components.emplace_back();
        components[it->second].push_back(&entries[i]);
    }

    double product = 1.0;
    for (auto& cycles : components) {
        if (cycles.size() < 10)
            product *= component_sum_exhaustive(cycles, base, model);
        else
            product *= component_sum_truncated(cycles, base, model);
    }
    return product;
}

}  // namespace libra
