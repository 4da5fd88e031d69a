#include "libra/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>

namespace libra {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kExactDefectLimit = 22;
constexpr double kProbClamp = 0.5 - 1e-9;

std::vector<EdgeComponent> components_of(const Hyperedge& e) {
    if (!e.decomposition.empty())
        return e.decomposition;
    if (e.degree() > 2)
        throw DecompositionError("hyperedge " + std::to_string(e.id) +
                                 " has degree > 2 and no decomposition hint");
    return {{e.detectors, e.observables}};
}

// Union-find with parity for the two-basis coloring.
struct ParityUF {
    std::vector<uint32_t> parent;
    std::vector<uint8_t> parity;  // color relative to parent

    explicit ParityUF(size_t n) : parent(n), parity(n, 0) {
        for (size_t i = 0; i < n; i++)
            parent[i] = (uint32_t)i;
    }

    std::pair<uint32_t, uint8_t> find(uint32_t x) {
        uint8_t p = 0;
        uint32_t root = x;
        while (parent[root] != root) {
            p ^= parity[root];
            root = parent[root];
        }
        // Path compression.
        uint32_t cur = x;
        uint8_t cur_p = p;
        while (parent[cur] != cur) {
            uint32_t next = parent[cur];
            uint8_t next_p = cur_p ^ parity[cur];
            parent[cur] = root;
            parity[cur] = cur_p;
            cur = next;
            cur_p = next_p;
        }
        return {root, p};
    }

    // Constrain color(a) ^ color(b) == rel.  Returns false on contradiction.
    bool merge(uint32_t a, uint32_t b, uint8_t rel) {
        auto [ra, pa] = find(a);
        auto [rb, pb] = find(b);
        if (ra == rb)
            return (pa ^ pb) == rel;
        parent[rb] = ra;
        parity[rb] = pa ^ pb ^ rel;
        return true;
    }
};

}  // namespace

DecomposedGraph decompose(const ErrorModel& model) {
    size_t n_det = model.num_detectors();
    DecomposedGraph g;
    g.edges_of_source.resize(model.num_edges());

    std::vector<std::vector<EdgeComponent>> comps(model.num_edges());
    ParityUF uf(n_det);
    for (size_t i = 0; i < model.num_edges(); i++) {
        comps[i] = components_of(model.edge(i));
        std::vector<const EdgeComponent*> nonempty;
        for (const auto& c : comps[i])
            if (!c.detectors.empty())
                nonempty.push_back(&c);
        for (const auto* c : nonempty)
            for (size_t k = 1; k < c->detectors.size(); k++)
                if (!uf.merge(c->detectors[0], c->detectors[k], 0))
                    throw DecompositionError("detectors of edge " + std::to_string(i) +
                                             " cannot be assigned to one basis");
        if (nonempty.size() == 2)
            if (!uf.merge(nonempty[0]->detectors[0], nonempty[1]->detectors[0], 1))
                throw DecompositionError("components of edge " + std::to_string(i) +
                                         " cannot be split across bases");
    }

    // Deterministic colors: the root of each component gets color 0.
    g.detector_basis.resize(n_det, 0);
    for (size_t d = 0; d < n_det; d++) {
        auto [root, parity] = uf.find((uint32_t)d);
        (void)root;
        g.detector_basis[d] = (int8_t)parity;
    }

    for (int b = 0; b < 2; b++)
        g.basis[b].adjacency.resize(n_det);

    for (size_t i = 0; i < model.num_edges(); i++) {
        const Hyperedge& e = model.edge(i);
        bool standalone = comps[i].size() == 1;
        for (size_t ci = 0; ci < comps[i].size(); ci++) {
            const auto& c = comps[i][ci];
            if (c.detectors.empty())
                continue;
            int basis = g.detector_basis[c.detectors[0]];
            for (uint32_t d : c.detectors)
                if (g.detector_basis[d] != basis)
                    throw DecompositionError("component of edge " + std::to_string(i) +
                                             " spans both bases");
            BasisEdge be;
            be.node_a = (int32_t)c.detectors[0];
            be.node_b = c.detectors.size() == 2 ? (int32_t)c.detectors[1] : -1;
            be.probability = e.probability;
            be.weight = e.weight;
            be.observables = c.observables;
            be.source_edge = (uint32_t)i;
            be.component = (uint32_t)ci;
            be.standalone = standalone;
            uint32_t idx = (uint32_t)g.basis[basis].edges.size();
            g.basis[basis].adjacency[be.node_a].push_back(idx);
            if (be.node_b >= 0)
                g.basis[basis].adjacency[be.node_b].push_back(idx);
            else
                g.basis[basis].has_boundary = true;
            if (standalone)
                g.basis[basis].slot_prob[{be.node_a, be.node_b}] += e.probability;
            g.basis[basis].edges.push_back(be);
            g.edges_of_source[i].push_back({basis, idx});
        }
        if (standalone && e.degree() > 0) {
            auto key = std::make_pair(e.detectors, e.observables);
            auto it = g.standalone_by_shape.find(key);
            if (it == g.standalone_by_shape.end() || e.weight < model.edge(it->second).weight)
                g.standalone_by_shape[key] = (uint32_t)i;
        }
    }

    // Locate the observable-carrying basis for parity-constrained matching.
    bool has_obs[2] = {false, false};
    ObsMask seen_mask = 0;
    bool mixed = false;
    for (int b = 0; b < 2; b++) {
        for (const auto& be : g.basis[b].edges) {
            if (!be.observables)
                continue;
            has_obs[b] = true;
            if (seen_mask && be.observables != seen_mask)
                mixed = true;
            seen_mask = be.observables;
        }
    }
    if (mixed || (has_obs[0] && has_obs[1]))
        g.obs_basis = -2;
    else if (has_obs[0])
        g.obs_basis = 0;
    else if (has_obs[1])
        g.obs_basis = 1;

    // Base-weight distance to the boundary from every detector, used as a
    // truncation bound for the per-shot searches (reweighting only lowers
    // weights, so the bound stays valid).
    for (int b = 0; b < 2; b++) {
        auto& basis = g.basis[b];
        basis.boundary_dist.assign(n_det, kInf);
        using Item = std::pair<double, uint32_t>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
        for (const auto& be : basis.edges) {
            if (be.node_b == -1 && be.weight < basis.boundary_dist[be.node_a]) {
                basis.boundary_dist[be.node_a] = be.weight;
                pq.push({be.weight, (uint32_t)be.node_a});
            }
        }
        while (!pq.empty()) {
            auto [dist, u] = pq.top();
            pq.pop();
            if (dist > basis.boundary_dist[u])
                continue;
            for (uint32_t ei : basis.adjacency[u]) {
                const auto& be = basis.edges[ei];
                int32_t v = be.node_a == (int32_t)u ? be.node_b : be.node_a;
                if (v < 0)
                    continue;
                double nd = dist + be.weight;
                if (nd < basis.boundary_dist[v]) {
                    basis.boundary_dist[v] = nd;
                    pq.push({nd, (uint32_t)v});
                }
            }
        }
    }
    return g;
}

namespace {

struct DefectSearch {
    std::vector<double> dist;       // per node; index n_det = boundary
    std::vector<int32_t> parent;    // incoming basis-edge id, -1 at source
    std::vector<uint32_t> touched;
};

// Truncated Dijkstra from one defect.  Stops once the frontier exceeds
// `limit` (paths longer than via-boundary pairing are never used).
void dijkstra_from(const DecomposedGraph::Basis& basis, size_t num_detectors,
                   const std::vector<double>& weights, uint32_t source, double limit,
                   DefectSearch& out) {
    size_t bnd = num_detectors;
    out.dist.assign(num_detectors + 1, kInf);
    out.parent.assign(num_detectors + 1, -1);
    using Item = std::pair<double, uint32_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    out.dist[source] = 0;
    pq.push({0, source});
    while (!pq.empty()) {
        auto [dist, u] = pq.top();
        pq.pop();
        if (dist > out.dist[u] || dist > limit)
            continue;
        if (u == bnd)
            continue;
        for (uint32_t ei : basis.adjacency[u]) {
            const auto& be = basis.edges[ei];
            int32_t v = be.node_a == (int32_t)u ? be.node_b : be.node_a;
            size_t vi = v < 0 ? bnd : (size_t)v;
            double nd = dist + weights[ei];
            if (nd < out.dist[vi]) {
                out.dist[vi] = nd;
                out.parent[vi] = (int32_t)ei;
                pq.push({nd, (uint32_t)vi});
            }
        }
    }
}

// Walk parents from `target` back to the search source, toggling edges.
void xor_path(const DecomposedGraph::Basis& basis, const DefectSearch& search, size_t target,
              std::vector<uint8_t>& edge_parity) {
    size_t bnd = basis.adjacency.size();
    size_t cur = target;
    while (search.parent[cur] >= 0) {
        uint32_t ei = (uint32_t)search.parent[cur];
        edge_parity[ei] ^= 1;
        const auto& be = basis.edges[ei];
        if (cur == bnd)
            cur = (size_t)be.node_a;  // boundary edges are relaxed out of node_a
        else
            cur = (size_t)be.node_a == cur ? (size_t)be.node_b : (size_t)be.node_a;
    }
}

struct Pairing {
    // partner[i] = j (defect index) or -1 for boundary.
    std::vector<int32_t> partner;
    bool exact = true;
};

Pairing solve_pairing_core(const std::vector<std::vector<double>>& cost,
                           const std::vector<double>& bnd) {
    size_t n = bnd.size();
    Pairing out;
    out.partner.assign(n, -2);
    if (n == 0)
        return out;
    if (n <= kExactDefectLimit) {
        size_t full = size_t{1} << n;
        std::vector<double> dp(full, kInf);
        dp[0] = 0;
        for (size_t mask = 1; mask < full; mask++) {
            size_t i = (size_t)__builtin_ctzll(mask);
            size_t rest = mask ^ (size_t{1} << i);
            double best = bnd[i] == kInf ? kInf : bnd[i] + dp[rest];
            size_t m = rest;
            while (m) {
                size_t j = (size_t)__builtin_ctzll(m);
                m &= m - 1;
                if (cost[i][j] == kInf)
                    continue;
                double cand = cost[i][j] + dp[rest ^ (size_t{1} << j)];
                if (cand < best)
                    best = cand;
            }
            dp[mask] = best;
        }
        if (dp[full - 1] == kInf)
            throw InfeasibleSyndromeError("defects cannot be matched within this basis");
        // Traceback by re-deriving the argmin at each step.
        size_t mask = full - 1;
        while (mask) {
            size_t i = (size_t)__builtin_ctzll(mask);
            size_t rest = mask ^ (size_t{1} << i);
            if (bnd[i] != kInf && std::abs(bnd[i] + dp[rest] - dp[mask]) <= 1e-12 * (1 + dp[mask])) {
                out.partner[i] = -1;
                mask = rest;
                continue;
            }
            size_t m = rest;
            bool found = false;
            while (m) {
                size_t j = (size_t)__builtin_ctzll(m);
                m &= m - 1;
                if (cost[i][j] == kInf)
                    continue;
                double cand = cost[i][j] + dp[rest ^ (size_t{1} << j)];
                if (std::abs(cand - dp[mask]) <= 1e-12 * (1 + dp[mask])) {
                    out.partner[i] = (int32_t)j;
                    out.partner[j] = (int32_t)i;
                    mask = rest ^ (size_t{1} << j);
                    found = true;
                    break;
                }
            }
            if (!found) {
                // Numerical corner: fall back to the boundary option.
                if (bnd[i] == kInf)
                    throw InfeasibleSyndromeError("pairing traceback failed");
                out.partner[i] = -1;
                mask = rest;
            }
        }
        return out;
    }

    // Heuristic path: greedy nearest pair, then exhaustive 2-swap.
    out.exact = false;
    std::vector<bool> used(n, false);
    size_t remaining = n;
    while (remaining > 0) {
        double best = kInf;
        int64_t bi = -1, bj = -1;
        for (size_t i = 0; i < n; i++) {
            if (used[i])
                continue;
            if (bnd[i] < best) {
                best = bnd[i];
                bi = (int64_t)i;
                bj = -1;
            }
            for (size_t j = i + 1; j < n; j++) {
                if (used[j])
                    continue;
                if (cost[i][j] < best) {
                    best = cost[i][j];
                    bi = (int64_t)i;
                    bj = (int64_t)j;
                }
            }
        }
        if (bi < 0)
            throw InfeasibleSyndromeError("defects cannot be matched within this basis");
        used[bi] = true;
        out.partner[bi] = (int32_t)bj;
        remaining--;
        if (bj >= 0) {
            used[bj] = true;
            out.partner[bj] = (int32_t)bi;
            remaining--;
        }
    }
    auto pair_cost = [&](size_t i, int32_t j) { return j < 0 ? bnd[i] : cost[i][(size_t)j]; };
    bool improved = true;
    while (improved) {
        improved = false;
        for (size_t a = 0; a < n; a++) {
            for (size_t c = a + 1; c < n; c++) {
                if (out.partner[a] == (int32_t)c)
                    continue;
                int32_t b = out.partner[a];
                int32_t d = out.partner[c];
                if (b == (int32_t)c || d == (int32_t)a)
                    continue;
                double cur = pair_cost(a, b) + pair_cost(c, d);
                // Re-pair a with c; former partners go together or to boundary.
                double alt_rest = (b >= 0 && d >= 0)   ? std::min(cost[(size_t)b][(size_t)d],
                                                                  bnd[(size_t)b] + bnd[(size_t)d])
                                  : (b >= 0)           ? bnd[(size_t)b]
                                  : (d >= 0)           ? bnd[(size_t)d]
                                                       : 0;
                double alt = cost[a][c] + alt_rest;
                if (alt < cur - 1e-12) {
                    out.partner[a] = (int32_t)c;
                    out.partner[c] = (int32_t)a;
                    if (b >= 0 && d >= 0) {
                        bool together = cost[(size_t)b][(size_t)d] <= bnd[(size_t)b] + bnd[(size_t)d];
                        out.partner[b] = together ? d : -1;
                        out.partner[d] = together ? b : -1;
                    } else if (b >= 0) {
                        out.partner[b] = -1;
                    } else if (d >= 0) {
                        out.partner[d] = -1;
                    }
                    improved = true;
                }
            }
        }
    }
    return out;
}

// Flood-fill defects into clusters where a direct pairing can beat two
// boundary connections; distant defects never pair, so each cluster is
// solved independently (exponential DP on cluster size, not defect count).
std::vector<std::vector<size_t>> pairing_clusters(
    size_t n, const std::function<bool(size_t, size_t)>& linked) {
    std::vector<std::vector<size_t>> clusters;
    std::vector<bool> seen(n, false);
    for (size_t s = 0; s < n; s++) {
        if (seen[s])
            continue;
        std::vector<size_t> cluster = {s};
        seen[s] = true;
        for (size_t head = 0; head < cluster.size(); head++) {
            size_t i = cluster[head];
            for (size_t j = 0; j < n; j++) {
                if (!seen[j] && linked(i, j)) {
                    seen[j] = true;
                    cluster.push_back(j);
                }
            }
        }
        clusters.push_back(std::move(cluster));
    }
    return clusters;
}

Pairing solve_pairing(const std::vector<std::vector<double>>& cost, const std::vector<double>& bnd) {
    size_t n = bnd.size();
    Pairing out;
    out.partner.assign(n, -2);
    if (n == 0)
        return out;
    auto clusters = pairing_clusters(
        n, [&](size_t i, size_t j) { return cost[i][j] < bnd[i] + bnd[j] - 1e-12; });
    for (const auto& ids : clusters) {
        size_t m = ids.size();
        std::vector<std::vector<double>> sub_cost(m, std::vector<double>(m, kInf));
        std::vector<double> sub_bnd(m);
        for (size_t a = 0; a < m; a++) {
            sub_bnd[a] = bnd[ids[a]];
            for (size_t b = 0; b < m; b++)
                if (a != b)
                    sub_cost[a][b] = cost[ids[a]][ids[b]];
        }
        Pairing sub = solve_pairing_core(sub_cost, sub_bnd);
        out.exact = out.exact && sub.exact;
        for (size_t a = 0; a < m; a++)
            out.partner[ids[a]] = sub.partner[a] < 0 ? sub.partner[a] : (int32_t)ids[(size_t)sub.partner[a]];
    }
    return out;
}

}  // namespace

EdgeMatchResult match_edges(const DecomposedGraph::Basis& basis, size_t num_detectors,
                            const std::vector<uint32_t>& defects, const std::vector<double>& weights) {
    EdgeMatchResult result;
    size_t n = defects.size();
    if (n == 0)
        return result;

    double max_bnd = 0;
    for (uint32_t d : defects) {
        double bd = basis.boundary_dist[d];
        max_bnd = std::max(max_bnd, bd);
    }

    std::vector<DefectSearch> searches(n);
    for (size_t i = 0; i < n; i++) {
        double limit = basis.boundary_dist[defects[i]] == kInf || max_bnd == kInf
                           ? kInf
                           : basis.boundary_dist[defects[i]] + max_bnd + 1e-9;
        dijkstra_from(basis, num_detectors, weights, defects[i], limit, searches[i]);
    }

    std::vector<double> bnd(n);
    std::vector<std::vector<double>> cost(n, std::vector<double>(n, kInf));
    std::vector<std::vector<bool>> via_boundary(n, std::vector<bool>(n, false));
    for (size_t i = 0; i < n; i++)
        bnd[i] = searches[i].dist[num_detectors];
    for (size_t i = 0; i < n; i++) {
        for (size_t j = i + 1; j < n; j++) {
            double direct = searches[i].dist[defects[j]];
            double via = bnd[i] + bnd[j];
            if (via < direct) {
                cost[i][j] = cost[j][i] = via;
                via_boundary[i][j] = via_boundary[j][i] = true;
            } else {
                cost[i][j] = cost[j][i] = direct;
            }
        }
    }

    Pairing pairing = solve_pairing(cost, bnd);
    result.exact = pairing.exact;

    std::vector<uint8_t> edge_parity(basis.edges.size(), 0);
    for (size_t i = 0; i < n; i++) {
        int32_t j = pairing.partner[i];
        if (j == -1) {
            xor_path(basis, searches[i], num_detectors, edge_parity);
        } else if (j >= 0 && (size_t)j > i) {
            if (via_boundary[i][(size_t)j]) {
                xor_path(basis, searches[i], num_detectors, edge_parity);
                xor_path(basis, searches[(size_t)j], num_detectors, edge_parity);
            } else {
                xor_path(basis, searches[i], defects[(size_t)j], edge_parity);
            }
        }
    }
    for (uint32_t e = 0; e < edge_parity.size(); e++)
        if (edge_parity[e])
            result.graph_edges.push_back(e);
    return result;
}

namespace {

uint8_t obs_bit(const BasisEdge& be) {
    return be.observables ? 1 : 0;
}

struct ParitySearch {
    // State = node * 2 + parity; node index num_detectors is the boundary.
    std::vector<double> dist;
    std::vector<int32_t> parent;  // incoming basis-edge id, -1 at the source
};

// Dijkstra over (node, observable-parity) states.  `source` may be the
// boundary itself (for odd boundary-to-boundary loops); otherwise the
// boundary is absorbing.  Frontiers beyond `limit` are dropped (paths that
// long are dominated by boundary detours).
void dijkstra_parity(const DecomposedGraph::Basis& basis, size_t num_detectors,
                     const std::vector<double>& weights, size_t source, double limit,
                     ParitySearch& out) {
    size_t bnd = num_detectors;
    out.dist.assign((num_detectors + 1) * 2, kInf);
    out.parent.assign((num_detectors + 1) * 2, -1);
    using Item = std::pair<double, uint32_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    out.dist[source * 2] = 0;
    pq.push({0, (uint32_t)(source * 2)});
    auto relax = [&](size_t node, uint8_t parity, double nd, uint32_t ei) {
        size_t s = node * 2 + parity;
        if (nd < out.dist[s]) {
            out.dist[s] = nd;
            out.parent[s] = (int32_t)ei;
            pq.push({nd, (uint32_t)s});
        }
    };
    while (!pq.empty()) {
        auto [dist, state] = pq.top();
        pq.pop();
        if (dist > out.dist[(size_t)state] || dist > limit)
            continue;
        size_t u = state / 2;
        uint8_t p = state & 1;
        if (u == bnd) {
            if (u != source || p != 0)
                continue;  // absorbing except when leaving the source boundary
            for (uint32_t ei = 0; ei < basis.edges.size(); ei++) {
                const auto& be = basis.edges[ei];
                if (be.node_b == -1)
                    relax((size_t)be.node_a, p ^ obs_bit(be), dist + weights[ei], ei);
            }
            continue;
        }
        for (uint32_t ei : basis.adjacency[u]) {
            const auto& be = basis.edges[ei];
            int32_t v = be.node_a == (int32_t)u ? be.node_b : be.node_a;
            size_t vi = v < 0 ? bnd : (size_t)v;
            relax(vi, p ^ obs_bit(be), dist + weights[ei], ei);
        }
    }
}

// Walk parents from state (node, parity) back to the search source,
// toggling edges.
void xor_path_parity(const DecomposedGraph::Basis& basis, const ParitySearch& search,
                     size_t num_detectors, size_t node, uint8_t parity,
                     std::vector<uint8_t>& edge_parity) {
    size_t bnd = num_detectors;
    size_t state = node * 2 + parity;
    while (search.parent[state] >= 0) {
        uint32_t ei = (uint32_t)search.parent[state];
        edge_parity[ei] ^= 1;
        const auto& be = basis.edges[ei];
        size_t u = state / 2;
        uint8_t prev_p = (uint8_t)(state & 1) ^ obs_bit(be);
        size_t prev;
        if (u == bnd)
            prev = (size_t)be.node_a;
        else if (be.node_b == -1)
            prev = bnd;  // the edge was relaxed out of the boundary source
        else
            prev = (size_t)be.node_a == u ? (size_t)be.node_b : (size_t)be.node_a;
        state = prev * 2 + prev_p;
    }
}

}  // namespace

ParityMatchResult match_edges_parity(const DecomposedGraph::Basis& basis, size_t num_detectors,
                                     const std::vector<uint32_t>& defects,
                                     const std::vector<double>& weights, uint8_t target_parity) {
    ParityMatchResult result;
    size_t n = defects.size();
    size_t bnd = num_detectors;

    std::vector<uint8_t> edge_parity(basis.edges.size(), 0);
    auto finish = [&](bool exact) {
        for (uint32_t e = 0; e < edge_parity.size(); e++)
            if (edge_parity[e])
                result.graph_edges.push_back(e);
        result.exact = exact;
        result.ok = true;
        return result;
    };

    if (n == 0 && target_parity == 0)
        return finish(true);  // the empty matching

    // One search from the boundary supplies every defect-to-boundary cost
    // (the graph is undirected) and the lightest odd boundary-to-boundary
    // loop: the parity escape hatch when every defect connection is even.
    ParitySearch from_boundary;
    dijkstra_parity(basis, num_detectors, weights, bnd, kInf, from_boundary);
    double odd_loop = from_boundary.dist[bnd * 2 + 1];

    if (n == 0) {
        if (odd_loop == kInf)
            return result;
        xor_path_parity(basis, from_boundary, num_detectors, bnd, 1, edge_parity);
        return finish(true);
    }

    // bnd_cost[i][p]: defect i to boundary with path parity p.
    std::vector<std::array<double, 2>> bnd_cost(n);
    double max_bnd = 0;
    for (size_t i = 0; i < n; i++) {
        for (int p = 0; p < 2; p++)
            bnd_cost[i][p] = from_boundary.dist[defects[i] * 2 + p];
        max_bnd = std::max(max_bnd, std::max(bnd_cost[i][0], bnd_cost[i][1]));
    }

    // Direct paths longer than a both-parity boundary detour never win, so
    // the per-defect searches can stop there.
    std::vector<ParitySearch> searches(n);
    for (size_t i = 0; i < n; i++) {
        double limit = max_bnd == kInf
                           ? kInf
                           : std::max(bnd_cost[i][0], bnd_cost[i][1]) + max_bnd + 1e-9;
        dijkstra_parity(basis, num_detectors, weights, defects[i], limit, searches[i]);
    }

    // cost[i][j][p] with the realizing route: direct path of parity p, or
    // boundary detours with parities (p1, p ^ p1).
    struct Route {
        bool via_boundary = false;
        uint8_t p1 = 0;  // direct-path parity, or defect-i detour parity
    };
    std::vector<std::vector<std::array<double, 2>>> cost(
        n, std::vector<std::array<double, 2>>(n, {kInf, kInf}));
    std::vector<std::vector<std::array<Route, 2>>> route(
        n, std::vector<std::array<Route, 2>>(n));
    for (size_t i = 0; i < n; i++) {
        for (size_t j = i + 1; j < n; j++) {
            for (int p = 0; p < 2; p++) {
                double best = searches[i].dist[defects[j] * 2 + p];
                Route r{false, (uint8_t)p};
                for (int p1 = 0; p1 < 2; p1++) {
                    double via = bnd_cost[i][p1] + bnd_cost[j][p ^ p1];
                    if (via < best) {
                        best = via;
                        r = {true, (uint8_t)p1};
                    }
                }
                cost[i][j][p] = cost[j][i][p] = best;
                route[i][j][p] = r;
                route[j][i][p] = r.via_boundary ? Route{true, (uint8_t)(p ^ r.p1)} : r;
            }
        }
    }

    auto apply_boundary = [&](size_t i, uint8_t p) {
        xor_path_parity(basis, from_boundary, num_detectors, defects[i], p, edge_parity);
    };
    auto apply_pair = [&](size_t i, size_t j, uint8_t p) {
        const Route& r = route[i][j][p];
        if (r.via_boundary) {
            apply_boundary(i, r.p1);
            apply_boundary(j, p ^ r.p1);
        } else {
            xor_path_parity(basis, searches[i], num_detectors, defects[j], p, edge_parity);
        }
    };

    // Clusters combine only through their parity, so each gets its own
    // (mask, parity) DP and the parities are reconciled afterwards.
    auto min_via = [&](size_t i, size_t j, int p) {
        double best = kInf;
        for (int p1 = 0; p1 < 2; p1++)
            best = std::min(best, bnd_cost[i][p1] + bnd_cost[j][p ^ p1]);
        return best;
    };
    auto clusters = pairing_clusters(n, [&](size_t i, size_t j) {
        for (int p = 0; p < 2; p++)
            if (cost[i][j][p] < min_via(i, j, p) - 1e-12)
                return true;
        return false;
    });
    size_t max_cluster = 0;
    for (const auto& c : clusters)
        max_cluster = std::max(max_cluster, c.size());

    if (max_cluster <= kExactDefectLimit) {
        std::vector<std::vector<std::array<double, 2>>> dps(clusters.size());
        for (size_t c = 0; c < clusters.size(); c++) {
            const auto& ids = clusters[c];
            size_t m = ids.size();
            size_t full = size_t{1} << m;
            auto& dp = dps[c];
            dp.assign(full, {kInf, kInf});
            dp[0][0] = 0;
            for (size_t mask = 1; mask < full; mask++) {
                size_t a = (size_t)__builtin_ctzll(mask);
                size_t i = ids[a];
                size_t rest = mask ^ (size_t{1} << a);
                for (int q = 0; q < 2; q++) {
                    double best = kInf;
                    for (int p = 0; p < 2; p++) {
                        if (bnd_cost[i][p] != kInf && dp[rest][q ^ p] != kInf)
                            best = std::min(best, bnd_cost[i][p] + dp[rest][q ^ p]);
                        size_t mm = rest;
                        while (mm) {
                            size_t b = (size_t)__builtin_ctzll(mm);
                            mm &= mm - 1;
                            size_t j = ids[b];
                            if (cost[i][j][p] == kInf)
                                continue;
                            double sub = dp[rest ^ (size_t{1} << b)][q ^ p];
                            if (sub != kInf)
                                best = std::min(best, cost[i][j][p] + sub);
                        }
                    }
                    dp[mask][q] = best;
                }
            }
        }

        // Cheapest per-cluster parities, then fix the total parity by
        // flipping one cluster or adding the odd loop.
        std::vector<uint8_t> par(clusters.size());
        uint8_t parity = 0;
        for (size_t c = 0; c < clusters.size(); c++) {
            const auto& w = dps[c].back();
            if (w[0] == kInf && w[1] == kInf)
                return result;
            par[c] = w[1] < w[0] ? 1 : 0;
            parity ^= par[c];
        }
        if (parity != target_parity) {
            double best_delta = odd_loop;
            int64_t flip = -1;
            for (size_t c = 0; c < clusters.size(); c++) {
                const auto& w = dps[c].back();
                if (w[par[c] ^ 1] == kInf)
                    continue;
                double delta = w[par[c] ^ 1] - w[par[c]];
                if (delta < best_delta) {
                    best_delta = delta;
                    flip = (int64_t)c;
                }
            }
            if (best_delta == kInf)
                return result;
            if (flip >= 0)
                par[(size_t)flip] ^= 1;
            else
                xor_path_parity(basis, from_boundary, num_detectors, bnd, 1, edge_parity);
        }

        // Traceback each cluster by re-deriving the argmin at each step.
        for (size_t c = 0; c < clusters.size(); c++) {
            const auto& ids = clusters[c];
            const auto& dp = dps[c];
            size_t mask = (size_t{1} << ids.size()) - 1;
            uint8_t q = par[c];
            while (mask) {
                size_t a = (size_t)__builtin_ctzll(mask);
                size_t i = ids[a];
                size_t rest = mask ^ (size_t{1} << a);
                double want = dp[mask][q];
                bool found = false;
                for (int p = 0; p < 2 && !found; p++) {
                    if (bnd_cost[i][p] != kInf && dp[rest][q ^ p] != kInf &&
                        std::abs(bnd_cost[i][p] + dp[rest][q ^ p] - want) <= 1e-12 * (1 + want)) {
                        apply_boundary(i, (uint8_t)p);
                        mask = rest;
                        q ^= (uint8_t)p;
                        found = true;
                        break;
                    }
                    size_t mm = rest;
                    while (mm) {
                        size_t b = (size_t)__builtin_ctzll(mm);
                        mm &= mm - 1;
                        size_t j = ids[b];
                        if (cost[i][j][p] == kInf)
                            continue;
                        double sub = dp[rest ^ (size_t{1} << b)][q ^ p];
                        if (sub != kInf && std::abs(cost[i][j][p] + sub - want) <= 1e-12 * (1 + want)) {
                            apply_pair(i, j, (uint8_t)p);
                            mask = rest ^ (size_t{1} << b);
                            q ^= (uint8_t)p;
                            found = true;
                            break;
                        }
                    }
                }
                if (!found)
                    throw InfeasibleSyndromeError("parity pairing traceback failed");
            }
        }
        return finish(true);
    }

    // Heuristic path: parity-oblivious pairing, then the cheapest parity fix.
    std::vector<std::vector<double>> cmin(n, std::vector<double>(n, kInf));
    std::vector<double> bmin(n);
    for (size_t i = 0; i < n; i++) {
        bmin[i] = std::min(bnd_cost[i][0], bnd_cost[i][1]);
        for (size_t j = 0; j < n; j++)
            if (i != j)
                cmin[i][j] = std::min(cost[i][j][0], cost[i][j][1]);
    }
    Pairing pairing = solve_pairing(cmin, bmin);
    uint8_t parity = 0;
    std::vector<std::pair<size_t, int32_t>> conns;  // (i, partner) with i < partner
    std::vector<uint8_t> conn_parity;
    for (size_t i = 0; i < n; i++) {
        int32_t j = pairing.partner[i];
        if (j >= 0 && (size_t)j < i)
            continue;
        uint8_t p;
        if (j == -1)
            p = bnd_cost[i][0] <= bnd_cost[i][1] ? 0 : 1;
        else
            p = cost[i][(size_t)j][0] <= cost[i][(size_t)j][1] ? 0 : 1;
        conns.push_back({i, j});
        conn_parity.push_back(p);
        parity ^= p;
    }
    if (parity != target_parity) {
        // Flip one connection to its opposite-parity route, or add the odd
        // loop, whichever costs less.
        double best_delta = odd_loop;
        int64_t flip = -1;
        for (size_t c = 0; c < conns.size(); c++) {
            auto [i, j] = conns[c];
            uint8_t p = conn_parity[c];
            double delta = (j == -1 ? bnd_cost[i][p ^ 1] - bnd_cost[i][p]
                                    : cost[i][(size_t)j][p ^ 1] - cost[i][(size_t)j][p]);
            if (delta < best_delta) {
                best_delta = delta;
                flip = (int64_t)c;
            }
        }
        if (best_delta == kInf)
            return result;
        if (flip >= 0)
            conn_parity[(size_t)flip] ^= 1;
        else
            xor_path_parity(basis, from_boundary, num_detectors, bnd, 1, edge_parity);
    }
    for (size_t c = 0; c < conns.size(); c++) {
        auto [i, j] = conns[c];
        if (j == -1)
            apply_boundary(i, conn_parity[c]);
        else
            apply_pair(i, (size_t)j, conn_parity[c]);
    }
    return finish(false);
}

CorrelatedMatcher::CorrelatedMatcher(const ErrorModel& model)
    : model_(&model), graph_(decompose(model)) {}

// Posterior-mixture reweighting of companion components: if a matched
// basis-0 edge came from a multi-component hyperedge h, raise the
// probability of h's basis-1 components to pi + (1 - pi) q.
std::vector<double> CorrelatedMatcher::reweighted_weights1(
    const std::vector<uint32_t>& m0_edges) const {
    const ErrorModel& model = *model_;
    std::vector<double> weights1;
    weights1.reserve(graph_.basis[1].edges.size());
    std::vector<double> probs1;
    for (const auto& be : graph_.basis[1].edges) {
        weights1.push_back(be.weight);
        probs1.push_back(be.probability);
    }
    for (uint32_t ei : m0_edges) {
        const auto& be = graph_.basis[0].edges[ei];
        if (be.standalone)
            continue;
        double standalone_p = 0;
        if (auto it = graph_.basis[0].slot_prob.find({be.node_a, be.node_b});
            it != graph_.basis[0].slot_prob.end())
            standalone_p = it->second;
        double p_h = model.edge(be.source_edge).probability;
        double pi = p_h / (p_h + standalone_p);
        for (auto [basis, idx] : graph_.edges_of_source[be.source_edge]) {
            if (basis != 1)
                continue;
            double q = probs1[idx];
            double q_new = std::min(pi + (1 - pi) * q, kProbClamp);
            if (q_new > q) {
                probs1[idx] = q_new;
                weights1[idx] = weight_from_probability(q_new);
            }
        }
    }
    return weights1;
}

MatcherResult CorrelatedMatcher::decode(const Syndrome& syndrome) const {
    const ErrorModel& model = *model_;
    std::vector<uint32_t> defects[2];
    syndrome.for_each_set([&](size_t d) { defects[graph_.detector_basis[d]].push_back((uint32_t)d); });

    std::vector<double> weights0;
    weights0.reserve(graph_.basis[0].edges.size());
    for (const auto& be : graph_.basis[0].edges)
        weights0.push_back(be.weight);
    EdgeMatchResult m0 = match_edges(graph_.basis[0], model.num_detectors(), defects[0], weights0);
    std::vector<double> weights1 = reweighted_weights1(m0.graph_edges);
    EdgeMatchResult m1 = match_edges(graph_.basis[1], model.num_detectors(), defects[1], weights1);
    return assemble(m0.graph_edges, m1.graph_edges, m0.exact && m1.exact);
}

std::optional<MatcherResult> CorrelatedMatcher::decode_with_parity(const Syndrome& syndrome,
                                                                   uint8_t target_parity) const {
    const ErrorModel& model = *model_;
    int ob = graph_.obs_basis;
    if (ob < 0)
        return std::nullopt;
    std::vector<uint32_t> defects[2];
    syndrome.for_each_set([&](size_t d) { defects[graph_.detector_basis[d]].push_back((uint32_t)d); });

    std::vector<double> weights0;
    weights0.reserve(graph_.basis[0].edges.size());
    for (const auto& be : graph_.basis[0].edges)
        weights0.push_back(be.weight);
    try {
        if (ob == 0) {
            ParityMatchResult f = match_edges_parity(graph_.basis[0], model.num_detectors(),
                                                     defects[0], weights0, target_parity);
            if (!f.ok)
                return std::nullopt;
            std::vector<double> weights1 = reweighted_weights1(f.graph_edges);
            EdgeMatchResult m1 =
                match_edges(graph_.basis[1], model.num_detectors(), defects[1], weights1);
            return assemble(f.graph_edges, m1.graph_edges, f.exact && m1.exact);
        }
        EdgeMatchResult m0 = match_edges(graph_.basis[0], model.num_detectors(), defects[0], weights0);
        std::vector<double> weights1 = reweighted_weights1(m0.graph_edges);
        ParityMatchResult f = match_edges_parity(graph_.basis[1], model.num_detectors(), defects[1],
                                                 weights1, target_parity);
        if (!f.ok)
            return std::nullopt;
        return assemble(m0.graph_edges, f.graph_edges, m0.exact && f.exact);
    } catch (const InfeasibleSyndromeError&) {
        return std::nullopt;
    }
}

MatcherResult CorrelatedMatcher::assemble(const std::vector<uint32_t>& m0_edges,
                                          const std::vector<uint32_t>& m1_edges, bool exact) const {
    const ErrorModel& model = *model_;
    // Hyperedge assignment: a hyperedge with all components matched is taken
    // whole; leftover matched components fall back to their stand-alone
    // mechanisms.
    std::vector<std::pair<uint32_t, uint32_t>> matched;  // (source, component)
    for (uint32_t ei : m0_edges)
        matched.push_back({graph_.basis[0].edges[ei].source_edge, graph_.basis[0].edges[ei].component});
    for (uint32_t ei : m1_edges)
        matched.push_back({graph_.basis[1].edges[ei].source_edge, graph_.basis[1].edges[ei].component});
    std::sort(matched.begin(), matched.end());

    MatcherResult result;
    result.config = model.empty_config();
    result.exact = exact;
    size_t k = 0;
    while (k < matched.size()) {
        uint32_t source = matched[k].first;
        std::vector<uint32_t> odd_components;
        while (k < matched.size() && matched[k].first == source) {
            uint32_t comp = matched[k].second;
            size_t count = 0;
            while (k < matched.size() && matched[k].first == source && matched[k].second == comp) {
                count++;
                k++;
            }
            if (count % 2)
                odd_components.push_back(comp);
        }
        if (odd_components.empty())
            continue;
        if (odd_components.size() == graph_.edges_of_source[source].size()) {
            result.config.flip(source);
            continue;
        }
        const Hyperedge& h = model.edge(source);
        auto comps = components_of(h);
        for (uint32_t ci : odd_components) {
            auto key = std::make_pair(comps[ci].detectors, comps[ci].observables);
            auto it = graph_.standalone_by_shape.find(key);
            if (it == graph_.standalone_by_shape.end())
                throw DecompositionError("no stand-alone mechanism for component " + std::to_string(ci) +
                                         " of hyperedge " + std::to_string(source));
            result.config.flip(it->second);
        }
    }
    result.weight = config_weight(result.config, model);
    return result;
}

MatcherResult correlated_decode(const ErrorModel& model, const Syndrome& syndrome) {
    CorrelatedMatcher matcher(model);
    return matcher.decode(syndrome);
}

namespace {

MatcherResult exact_mwhpm_gray(const ErrorModel& model, const Syndrome& syndrome) {
    size_t n = model.num_edges();
    Syndrome current = model.empty_syndrome();
    double weight = 0;
    uint32_t mask = 0;
    double best_weight = kInf;
    uint32_t best_mask = 0;
    bool found = false;

    auto exact_weight = [&](uint32_t m) {
        double w = 0;
        for (size_t e = 0; e < n; e++)
            if (m & (uint32_t{1} << e))
                w += model.edge(e).weight;
        return w;
    };
    auto consider = [&](uint32_t m) {
        double w = exact_weight(m);
        if (!found || w < best_weight - 1e-12) {
            best_weight = w;
            best_mask = m;
            found = true;
        } else if (w <= best_weight + 1e-12) {
            // Tie: keep the lexicographically smallest member-index list.
            ErrorConfig a = model.empty_config(), b = model.empty_config();
            for (size_t e = 0; e < n; e++) {
                if (m & (uint32_t{1} << e))
                    a.set(e);
                if (best_mask & (uint32_t{1} << e))
                    b.set(e);
            }
            if (a.lex_less(b)) {
                best_weight = w;
                best_mask = m;
            }
        }
    };

    if (current == syndrome)
        consider(mask);
    uint64_t total = uint64_t{1} << n;
    for (uint64_t k = 1; k < total; k++) {
        size_t bit = (size_t)__builtin_ctzll(k);
        mask ^= uint32_t{1} << bit;
        current ^= model.edge_detectors(bit);
        weight += (mask & (uint32_t{1} << bit)) ? model.edge(bit).weight : -model.edge(bit).weight;
        if (current == syndrome && weight <= best_weight + 1e-6)
            consider(mask);
    }
    if (!found)
        throw InfeasibleSyndromeError("no error configuration produces this syndrome");
    MatcherResult result;
    result.config = model.empty_config();
    for (size_t e = 0; e < n; e++)
        if (best_mask & (uint32_t{1} << e))
            result.config.set(e);
    result.weight = best_weight;
    return result;
}

// Lexicographic order on sorted index lists, single-word edge sets.
bool lex_less_mask(uint32_t x, uint32_t y) {
    uint32_t diff = x ^ y;
    if (!diff)
        return false;
    uint32_t low = diff & (~diff + 1);
    uint32_t above = ~((low << 1) - 1);
    // Whoever holds the smaller next element wins, unless the other side
    // is a proper prefix (no members above the differing index).
    if (x & low)
        return (y & above) != 0;
    return (x & above) == 0;
}

// Meet-in-the-middle oracle for single-word syndromes: enumerate the high
// half of the edges into a per-syndrome table, then scan the low half.
// Weight tolerance and tie-breaking mirror the Gray enumeration.
MatcherResult exact_mwhpm_mitm(const ErrorModel& model, const Syndrome& syndrome) {
    size_t n = model.num_edges();
    size_t nd = model.num_detectors();
    std::vector<uint32_t> edge_syn(n, 0);
    for (size_t e = 0; e < n; e++)
        model.edge_detectors(e).for_each_set([&](size_t d) { edge_syn[e] |= uint32_t{1} << d; });
    uint32_t target = 0;
    syndrome.for_each_set([&](size_t d) { target |= uint32_t{1} << d; });

    struct Entry {
        double weight = 0;
        uint32_t mask = 0;
        bool found = false;
    };
    size_t h = n / 2;  // low half [0, h), high half [h, n)
    std::vector<Entry> table(size_t{1} << nd);
    auto offer = [](Entry& slot, double w, uint32_t m) {
        if (!slot.found || w < slot.weight - 1e-12 ||
            (w <= slot.weight + 1e-12 && lex_less_mask(m, slot.mask))) {
            slot.weight = w;
            slot.mask = m;
            slot.found = true;
        }
    };

    uint32_t syn = 0, mask = 0;
    double weight = 0;
    offer(table[0], 0.0, 0);
    for (uint64_t k = 1; k < (uint64_t{1} << (n - h)); k++) {
        size_t bit = h + (size_t)__builtin_ctzll(k);
        mask ^= uint32_t{1} << bit;
        syn ^= edge_syn[bit];
        weight += (mask & (uint32_t{1} << bit)) ? model.edge(bit).weight : -model.edge(bit).weight;
        offer(table[syn], weight, mask);
    }

    Entry best;
    syn = mask = 0;
    weight = 0;
    uint64_t k = 0;
    do {
        const Entry& slot = table[syn ^ target];
        if (slot.found)
            offer(best, weight + slot.weight, mask | slot.mask);
        if (++k >= (uint64_t{1} << h))
            break;
        size_t bit = (size_t)__builtin_ctzll(k);
        mask ^= uint32_t{1} << bit;
        syn ^= edge_syn[bit];
        weight += (mask & (uint32_t{1} << bit)) ? model.edge(bit).weight : -model.edge(bit).weight;
    } while (true);

    if (!best.found)
        throw InfeasibleSyndromeError("no error configuration produces this syndrome");
    MatcherResult result;
    result.config = model.empty_config();
    for (size_t e = 0; e < n; e++)
        if (best.mask & (uint32_t{1} << e))
            result.config.set(e);
    result.weight = best.weight;
    return result;
}

struct BnBState {
    const ErrorModel* model;
    Syndrome target;
    std::vector<BitVec> suffix_cover;  // union of detector sets of edges >= k
    // min_touch[k][d]: lightest edge with index >= k touching detector d.
    std::vector<std::vector<double>> min_touch;
    std::vector<size_t> max_degree;  // largest degree among edges >= k
    uint64_t budget;
    uint64_t nodes = 0;
    double best_weight = kInf;
    ErrorConfig best;
    bool found = false;
};

void bnb_recurse(BnBState& st, size_t k, Syndrome& current, double weight, ErrorConfig& chosen) {
    if (++st.nodes > st.budget)
        throw OracleOverflowError("branch-and-bound budget exceeded");
    if (current == st.target && (!st.found || weight < st.best_weight - 1e-12 ||
                                 (weight <= st.best_weight + 1e-12 && chosen.lex_less(st.best)))) {
        st.best_weight = weight;
        st.best = chosen;
        st.found = true;
    }
    if (k >= st.model->num_edges())
        return;
    // Bound: every outstanding detector needs a remaining edge at least as
    // heavy as its lightest remaining incident edge.
    Syndrome need = current ^ st.target;
    double max_min = 0, sum_min = 0;
    bool coverable = true;
    need.for_each_set([&](size_t d) {
        double t = st.min_touch[k][d];
        if (t == kInf) {
            coverable = false;
        } else {
            sum_min += t;
            if (t > max_min)
                max_min = t;
        }
    });
    // Every outstanding detector needs a remaining incident edge; one edge
    // can serve at most max_degree of them.
    double lower = std::max(max_min, sum_min / (double)st.max_degree[k]);
    if (!coverable || weight + lower > st.best_weight + 1e-12)
        return;

    // Include edge k first: feasible solutions appear early and tighten
    // the bound for the rest of the search.
    current ^= st.model->edge_detectors(k);
    chosen.set(k);
    bnb_recurse(st, k + 1, current, weight + st.model->edge(k).weight, chosen);
    chosen.set(k, false);
    current ^= st.model->edge_detectors(k);
    // Exclude edge k.
    bnb_recurse(st, k + 1, current, weight, chosen);
}

}  // namespace

MatcherResult exact_mwhpm(const ErrorModel& model, const Syndrome& syndrome, uint64_t node_budget) {
    if (syndrome.size() != model.num_detectors())
        throw ConfigError("syndrome width does not match the model");
    if (model.num_edges() <= 25)
        return model.num_detectors() <= 16 ? exact_mwhpm_mitm(model, syndrome)
                                           : exact_mwhpm_gray(model, syndrome);
    if (node_budget == 0)
        throw OracleOverflowError("model has more than 25 edges; supply a branch-and-bound budget");

    BnBState st;
    st.model = &model;
    st.target = syndrome;
    st.budget = node_budget;
    st.best = model.empty_config();
    st.suffix_cover.assign(model.num_edges() + 1, BitVec(model.num_detectors()));
    st.min_touch.assign(model.num_edges() + 1, std::vector<double>(model.num_detectors(), kInf));
    st.max_degree.assign(model.num_edges() + 1, 1);
    for (size_t k = model.num_edges(); k-- > 0;) {
        st.suffix_cover[k] = st.suffix_cover[k + 1];
        st.min_touch[k] = st.min_touch[k + 1];
        st.max_degree[k] = std::max(st.max_degree[k + 1], model.edge(k).degree());
        model.edge_detectors(k).for_each_set([&](size_t d) {
            st.suffix_cover[k].set(d);
            st.min_touch[k][d] = std::min(st.min_touch[k][d], model.edge(k).weight);
        });
    }
    // Seed the bound with any feasible solution; optimality is unaffected,
    // and the seed competes in the final tie-break like any visited config.
    try {
        MatcherResult seed = correlated_decode(model, syndrome);
        st.best = seed.config;
        st.best_weight = seed.weight;
        st.found = true;
    } catch (const Error&) {
    }
    Syndrome current = model.empty_syndrome();
    ErrorConfig chosen = model.empty_config();
    bnb_recurse(st, 0, current, 0, chosen);
    if (!st.found)
        throw InfeasibleSyndromeError("no error configuration produces this syndrome");
    MatcherResult result;
    result.config = st.best;
    result.weight = st.best_weight;
    return result;
}

}  // namespace libra
