#include <cmath>
#include <limits>

#include "doctest.h"
#include "libra/matcher.hpp"
#include "libra/rng.hpp"
#include "libra/sampler.hpp"
#include "libra/surface.hpp"
#include "support/fixtures.hpp"
#include "support/random_models.hpp"

using namespace libra;

TEST_CASE("decompose is the identity on degree <= 2 models") {
    Rng rng(51, 0);
    support::StripModel strip = support::strip_model(rng);
    DecomposedGraph g = decompose(strip.model);
    size_t total = g.basis[0].edges.size() + g.basis[1].edges.size();
    CHECK(total == strip.model.num_edges());
    for (int b = 0; b < 2; b++)
        for (const auto& be : g.basis[b].edges) {
            CHECK(be.standalone);
            const Hyperedge& src = strip.model.edge(be.source_edge);
            CHECK(be.weight == doctest::Approx(src.weight));
        }
}

TEST_CASE("surface Y hyperedges split into one component per basis") {
    ErrorModel m = generate_surface_model(SurfaceParams::from_noise(3, 2, 2e-3));
    DecomposedGraph g = decompose(m);
    bool found = false;
    for (size_t i = 0; i < m.num_edges(); i++) {
        if (m.edge(i).decomposition.size() != 2)
            continue;
        REQUIRE(g.edges_of_source[i].size() == 2);
        CHECK(g.edges_of_source[i][0].first != g.edges_of_source[i][1].first);
        found = true;
    }
    CHECK(found);
}

TEST_CASE("degree-3 edge without hint is rejected") {
    std::vector<Hyperedge> edges = {fixtures::edge(0, {0, 1, 2}, 1.0)};
    ErrorModel m(3, 1, std::move(edges));
    CHECK_THROWS_AS(decompose(m), DecompositionError);
}

TEST_CASE("match_edges trivial and two-defect cases") {
    // D0 -- D1 joined by weight 1.0; each also has a 0.8 boundary edge.
    std::vector<Hyperedge> edges = {
        fixtures::edge(0, {0, 1}, 1.0),
        fixtures::edge(1, {0}, 0.8),
        fixtures::edge(2, {1}, 0.8),
    };
    ErrorModel m(2, 1, std::move(edges));
    DecomposedGraph g = decompose(m);
    const auto& basis = g.basis[g.detector_basis[0]];
    REQUIRE(basis.edges.size() == 3);
    std::vector<double> weights;
    for (const auto& be : basis.edges)
        weights.push_back(be.weight);

    CHECK(match_edges(basis, 2, {}, weights).graph_edges.empty());

    EdgeMatchResult r = match_edges(basis, 2, {0, 1}, weights);
    REQUIRE(r.graph_edges.size() == 1);
    CHECK(basis.edges[r.graph_edges[0]].weight == doctest::Approx(1.0));
    CHECK(r.exact);
}

TEST_CASE("match_edges picks boundary pair when cheaper") {
    std::vector<Hyperedge> edges = {
        fixtures::edge(0, {0, 1}, 2.0),
        fixtures::edge(1, {0}, 0.8),
        fixtures::edge(2, {1}, 0.8),
    };
    ErrorModel m(2, 1, std::move(edges));
    DecomposedGraph g = decompose(m);
    const auto& basis = g.basis[g.detector_basis[0]];
    std::vector<double> weights;
    for (const auto& be : basis.edges)
        weights.push_back(be.weight);
    EdgeMatchResult r = match_edges(basis, 2, {0, 1}, weights);
    REQUIRE(r.graph_edges.size() == 2);
    double total = 0;
    for (uint32_t e : r.graph_edges)
        total += basis.edges[e].weight;
    CHECK(total == doctest::Approx(1.6));
}

TEST_CASE("random 10-defect instances match the brute-force pairing minimum") {
    Rng rng(52, 0);
    for (int trial = 0; trial < 100; trial++) {
        // Pure chain: n detectors, chain edges, two boundary edges.
        size_t nd = 12 + rng.next_u64() % 6;
        std::vector<Hyperedge> edges;
        std::vector<double> chain_w;
        auto add = [&](std::vector<uint32_t> dets) {
            Hyperedge e;
            e.id = (uint32_t)edges.size();
            e.detectors = std::move(dets);
            e.probability = 0.02 + 0.28 * rng.next_double();
            edges.push_back(e);
        };
        add({0});
        for (uint32_t i = 0; i + 1 < nd; i++)
            add({i, i + 1});
        add({(uint32_t)nd - 1});
        ErrorModel m(nd, 1, std::move(edges));

        DecomposedGraph g = decompose(m);
        const auto& basis = g.basis[g.detector_basis[0]];
        std::vector<double> weights;
        for (const auto& be : basis.edges)
            weights.push_back(be.weight);

        // Independent distances along the chain.
        double wl = m.edge(0).weight, wr = m.edge(m.num_edges() - 1).weight;
        std::vector<double> prefix(nd, 0);  // distance from detector 0 to i
        for (size_t i = 1; i < nd; i++)
            prefix[i] = prefix[i - 1] + m.edge(i).weight;

        std::vector<uint32_t> defects;
        for (uint32_t d = 0; d < nd && defects.size() < 10; d++)
            if (rng.next_double() < 0.55)
                defects.push_back(d);
        size_t n = defects.size();
        std::vector<double> bdist(n);
        std::vector<std::vector<double>> pdist(n, std::vector<double>(n, 0));
        for (size_t i = 0; i < n; i++) {
            bdist[i] = std::min(wl + prefix[defects[i]], wr + prefix[nd - 1] - prefix[defects[i]]);
            for (size_t j = 0; j < n; j++)
                pdist[i][j] = std::abs(prefix[defects[i]] - prefix[defects[j]]);
        }
        double expected = support::brute_force_pairing(pdist, bdist);

        EdgeMatchResult r = match_edges(basis, nd, defects, weights);
        CHECK(r.exact);
        double got = 0;
        Syndrome s(nd);
        for (uint32_t e : r.graph_edges) {
            got += basis.edges[e].weight;
            const auto& be = basis.edges[e];
            s.flip((size_t)be.node_a);
            if (be.node_b >= 0)
                s.flip((size_t)be.node_b);
        }
        Syndrome want(nd);
        for (uint32_t d : defects)
            want.flip(d);
        CHECK(s == want);
        CHECK(got == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("unmatchable defect raises infeasible-syndrome") {
    std::vector<Hyperedge> edges = {fixtures::edge(0, {0, 1}, 1.0)};
    ErrorModel m(2, 1, std::move(edges));
    DecomposedGraph g = decompose(m);
    const auto& basis = g.basis[g.detector_basis[0]];
    std::vector<double> weights = {1.0};
    CHECK_THROWS_AS(match_edges(basis, 2, {0}, weights), InfeasibleSyndromeError);
}

TEST_CASE("decode_with_parity on T1") {
    ErrorModel m = fixtures::t1();
    CorrelatedMatcher matcher(m);
    Syndrome s(2);
    s.set(0);
    auto even = matcher.decode_with_parity(s, 0);
    REQUIRE(even.has_value());
    CHECK(even->config.indices() == std::vector<uint32_t>{0});
    CHECK(even->weight == doctest::Approx(1.0));
    auto odd = matcher.decode_with_parity(s, 1);
    REQUIRE(odd.has_value());
    CHECK(odd->config.indices() == std::vector<uint32_t>{1, 2});
    CHECK(odd->weight == doctest::Approx(3.5));
    // Empty syndrome, odd parity: the cheapest boundary-to-boundary loop.
    auto loop = matcher.decode_with_parity(m.empty_syndrome(), 1);
    REQUIRE(loop.has_value());
    CHECK(loop->config.indices() == std::vector<uint32_t>{0, 1, 2});
    CHECK(syndrome_of(loop->config, m).none());
    CHECK(observable_of(loop->config, m) == 1);
}

TEST_CASE("decode_with_parity unavailable without observable edges") {
    ErrorModel m = fixtures::t3();
    CorrelatedMatcher matcher(m);
    CHECK(!matcher.decode_with_parity(m.empty_syndrome(), 1).has_value());
}

TEST_CASE("parity-forced decode against class-constrained enumeration") {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    Rng rng(57, 0);
    size_t equal = 0, total = 0;
    for (int trial = 0; trial < 25; trial++) {
        support::StripModel strip = support::strip_model(rng, 6, 14);
        const ErrorModel& m = strip.model;
        CorrelatedMatcher matcher(m);
        for (uint64_t i = 0; i < 4; i++) {
            ShotRecord shot = sample_shot(m, 29, trial * 10 + i);
            // Gray-code sweep for the exact per-class minima.
            double best[2] = {kInf, kInf};
            Syndrome cur = m.empty_syndrome();
            ObsMask obs = 0;
            double w = 0;
            uint32_t mask = 0;
            auto consider = [&] {
                if (cur == shot.syndrome && w < best[obs & 1])
                    best[obs & 1] = w;
            };
            consider();
            for (uint64_t k = 1; k < (uint64_t{1} << m.num_edges()); k++) {
                size_t bit = (size_t)__builtin_ctzll(k);
                mask ^= uint32_t{1} << bit;
                cur ^= m.edge_detectors(bit);
                obs ^= m.edge(bit).observables;
                w += (mask & (uint32_t{1} << bit)) ? m.edge(bit).weight : -m.edge(bit).weight;
                consider();
            }
            for (uint8_t target = 0; target < 2; target++) {
                auto forced = matcher.decode_with_parity(shot.syndrome, target);
                if (best[target] == kInf) {
                    CHECK(!forced.has_value());
                    continue;
                }
                REQUIRE(forced.has_value());
                CHECK(syndrome_of(forced->config, m) == shot.syndrome);
                CHECK(observable_of(forced->config, m) == target);
                CHECK(forced->weight >= best[target] - 1e-9);
                total++;
                if (forced->weight <= best[target] + 1e-9)
                    equal++;
            }
        }
    }
    CHECK(total == 200);
    // Pinned regression floor, measured once on this seed.
    CHECK(equal >= 190);
}

TEST_CASE("correlated_decode empty syndrome") {
    ErrorModel m = generate_surface_model(SurfaceParams::from_noise(3, 2, 2e-3));
    MatcherResult r = correlated_decode(m, m.empty_syndrome());
    CHECK(r.config.none());
    CHECK(r.weight == 0.0);
}

TEST_CASE("correlated_decode result always reproduces the syndrome") {
    Rng rng(53, 0);
    ErrorModel m = generate_surface_model(SurfaceParams::from_noise(3, 2, 0.02));
    CorrelatedMatcher matcher(m);
    for (uint64_t i = 0; i < 100; i++) {
        ShotRecord shot = sample_shot(m, 11, i);
        MatcherResult r = matcher.decode(shot.syndrome);
        CHECK(syndrome_of(r.config, m) == shot.syndrome);
        CHECK(r.weight == doctest::Approx(config_weight(r.config, m)));
    }
}

TEST_CASE("single Y error decodes to the right syndrome and observables") {
    // Per-basis matching may swap a hyperedge for its stand-alone parts of
    // equal shape; the observables prediction must still agree with the edge.
    ErrorModel m = generate_surface_model(SurfaceParams::from_noise(3, 2, 2e-3));
    CorrelatedMatcher matcher(m);
    size_t tested = 0;
    for (size_t i = 0; i < m.num_edges() && tested < 5; i++) {
        if (m.edge(i).degree() < 3)
            continue;
        tested++;
        Syndrome s = syndrome_of(m.make_config({(uint32_t)i}), m);
        MatcherResult r = matcher.decode(s);
        CHECK(syndrome_of(r.config, m) == s);
        CHECK(observable_of(r.config, m) == m.edge(i).observables);
        CHECK(r.weight >= m.edge(i).weight - 1e-9);  // the edge itself is optimal
    }
    CHECK(tested == 5);
}

TEST_CASE("exact_mwhpm on fixtures") {
    SUBCASE("T1") {
        ErrorModel m = fixtures::t1();
        Syndrome s(2);
        s.set(0);
        MatcherResult r = exact_mwhpm(m, s);
        CHECK(r.config.indices() == std::vector<uint32_t>{0});
        CHECK(r.weight == doctest::Approx(1.0));
    }
    SUBCASE("empty syndrome") {
        ErrorModel m = fixtures::t1();
        MatcherResult r = exact_mwhpm(m, m.empty_syndrome());
        CHECK(r.config.none());
        CHECK(r.weight == 0.0);
    }
    SUBCASE("T3") {
        ErrorModel m = fixtures::t3();
        Syndrome s(3);
        s.set(0);
        s.set(2);
        MatcherResult r = exact_mwhpm(m, s);
        CHECK(r.config.indices() == std::vector<uint32_t>{0, 2});
        CHECK(r.weight == doctest::Approx(2.0));
    }
}

TEST_CASE("exact_mwhpm deterministic lexicographic tie-break") {
    // Two equal-weight solutions for S={0}: {0} and {1}.
    std::vector<Hyperedge> edges = {
        fixtures::edge(0, {0}, 1.0),
        fixtures::edge(1, {0}, 1.0),
    };
    ErrorModel m(1, 1, std::move(edges));
    Syndrome s(1);
    s.set(0);
    CHECK(exact_mwhpm(m, s).config.indices() == std::vector<uint32_t>{0});
}

TEST_CASE("exact_mwhpm errors") {
    Rng rng(54, 0);
    ErrorModel big = generate_surface_model(SurfaceParams::from_noise(3, 2, 2e-3));
    SUBCASE("budget required above 25 edges") {
        CHECK_THROWS_AS(exact_mwhpm(big, big.empty_syndrome(), 0), OracleOverflowError);
    }
    SUBCASE("tiny budget overflows") {
        ShotRecord shot = sample_shot(big, 1, 4);
        CHECK_THROWS_AS(exact_mwhpm(big, shot.syndrome, 3), OracleOverflowError);
    }
    SUBCASE("infeasible syndrome") {
        ErrorModel m = fixtures::t3();
        Syndrome s(3);
        s.set(1);  // no edge touches D1
        CHECK_THROWS_AS(exact_mwhpm(m, s), InfeasibleSyndromeError);
    }
}

TEST_CASE("branch-and-bound agrees with Gray enumeration") {
    Rng rng(55, 0);
    for (int trial = 0; trial < 30; trial++) {
        ErrorModel m = support::random_hypergraph(rng, 10, 18);
        for (uint64_t i = 0; i < 5; i++) {
            ShotRecord shot = sample_shot(m, 13, trial * 10 + i);
            MatcherResult gray = exact_mwhpm(m, shot.syndrome);
            // Force the branch-and-bound path by padding the model with
            // unrelated edges beyond the Gray limit.
            std::vector<Hyperedge> edges = m.edges();
            size_t nd = m.num_detectors();
            size_t extra = 26 - edges.size() + 2;
            for (size_t k = 0; k < extra; k++) {
                Hyperedge e;
                e.id = (uint32_t)edges.size();
                e.detectors = {(uint32_t)(nd + k)};
                e.probability = 0.05;
                edges.push_back(e);
            }
            ErrorModel padded(nd + extra, 1, std::move(edges));
            Syndrome s(padded.num_detectors());
            shot.syndrome.for_each_set([&](size_t d) { s.set(d); });
            MatcherResult bnb = exact_mwhpm(padded, s, 2'000'000);
            CHECK(bnb.weight == doctest::Approx(gray.weight).epsilon(1e-9));
            CHECK(bnb.config.indices() == gray.config.indices());
        }
    }
}

TEST_CASE("oracle dominance and pinned equality rate on random strips") {
    Rng rng(56, 0);
    size_t equal = 0, total = 0;
    for (int trial = 0; trial < 40; trial++) {
        support::StripModel strip = support::strip_model(rng);
        CorrelatedMatcher matcher(strip.model);
        for (uint64_t i = 0; i < 5; i++) {
            ShotRecord shot = sample_shot(strip.model, 17, trial * 10 + i);
            MatcherResult corr = matcher.decode(shot.syndrome);
            MatcherResult exact = exact_mwhpm(strip.model, shot.syndrome);
            CHECK(syndrome_of(corr.config, strip.model) == shot.syndrome);
            CHECK(corr.weight >= exact.weight - 1e-9);
            total++;
            if (corr.weight <= exact.weight + 1e-9)
                equal++;
        }
    }
    // Pinned regression floor, measured once on this seed.
    CHECK(total == 200);
    CHECK(equal >= 190);
}

TEST_CASE("surface d=3 r=2 shots: correlated weight within oracle bound") {
    ErrorModel m = generate_surface_model(SurfaceParams::from_noise(3, 2, 0.02));
    CorrelatedMatcher matcher(m);
    size_t equal = 0, solved = 0;
    for (uint64_t i = 0; i < 100; i++) {
        ShotRecord shot = sample_shot(m, 19, i);
        MatcherResult corr = matcher.decode(shot.syndrome);
        try {
            MatcherResult exact = exact_mwhpm(m, shot.syndrome, 5'000'000);
            solved++;
            CHECK(corr.weight >= exact.weight - 1e-9);
            if (corr.weight <= exact.weight + 1e-9)
                equal++;
        } catch (const OracleOverflowError&) {
            // A rare dense shot can exhaust the node budget; skip it.
        }
    }
    // Pinned regression floors, measured once on this seed.
    CHECK(solved >= 95);
    CHECK(equal >= 90);
}

TEST_CASE("reweighted probabilities never go below base weight zero") {
    ErrorModel m = generate_surface_model(SurfaceParams::from_noise(3, 2, 0.02));
    CorrelatedMatcher matcher(m);
    for (uint64_t i = 0; i < 50; i++) {
        ShotRecord shot = sample_shot(m, 23, i);
        MatcherResult r = matcher.decode(shot.syndrome);
        CHECK(r.weight >= 0.0);
    }
}
