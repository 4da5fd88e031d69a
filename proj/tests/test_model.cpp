#include <cmath>

#include "doctest.h"
#include "libra/model.hpp"
#include "libra/rng.hpp"
#include "support/fixtures.hpp"
#include "support/random_models.hpp"

using namespace libra;

TEST_CASE("weight_from_probability closed forms") {
    CHECK(weight_from_probability(0.25) == doctest::Approx(1.0986122886681098).epsilon(1e-12));
    CHECK(weight_from_probability(1.0 / (1.0 + std::exp(1.0))) == doctest::Approx(1.0).epsilon(1e-12));
    // Frozen high-precision value of ln((1-p)/p) at p = 0.4999.
    CHECK(weight_from_probability(0.4999) == doctest::Approx(4.000000053332894e-4).epsilon(1e-9));
    CHECK_THROWS_AS(weight_from_probability(0.0), InvalidProbabilityError);
    CHECK_THROWS_AS(weight_from_probability(-0.1), InvalidProbabilityError);
    CHECK_THROWS_AS(weight_from_probability(0.5), InvalidProbabilityError);
    CHECK_THROWS_AS(weight_from_probability(0.6), InvalidProbabilityError);
}

TEST_CASE("weight is strictly decreasing in p") {
    double prev = weight_from_probability(0.001);
    for (double p = 0.01; p < 0.5; p += 0.01) {
        double w = weight_from_probability(p);
        CHECK(w < prev);
        CHECK(w > 0);
        prev = w;
    }
}

TEST_CASE("syndrome_of basics") {
    ErrorModel m = fixtures::t1();
    CHECK(syndrome_of(m.empty_config(), m).none());
    ErrorConfig just_a = m.make_config({0});
    CHECK(syndrome_of(just_a, m).indices() == std::vector<uint32_t>{0});
    ErrorConfig ab = m.make_config({0, 1});  // D{0} xor D{0,1} = D{1}
    CHECK(syndrome_of(ab, m).indices() == std::vector<uint32_t>{1});
}

TEST_CASE("observable_of basics") {
    ErrorModel m = fixtures::t1();
    CHECK(observable_of(m.empty_config(), m) == 0);
    CHECK(observable_of(m.make_config({2}), m) == 1);
    std::vector<Hyperedge> edges = {
        fixtures::edge(0, {0}, 1.0, 1),
        fixtures::edge(1, {0}, 1.0, 1),
    };
    ErrorModel dup(1, 1, std::move(edges));
    CHECK(observable_of(dup.make_config({0, 1}), dup) == 0);
}

TEST_CASE("config_weight sums member weights") {
    ErrorModel m = fixtures::t1();
    CHECK(config_weight(m.empty_config(), m) == 0.0);
    CHECK(config_weight(m.make_config({0, 1}), m) == doctest::Approx(3.0).epsilon(1e-9));
    ErrorModel t3 = fixtures::t3();
    CHECK(config_weight(t3.make_config({0, 3}), t3) == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("config_xor is symmetric difference") {
    ErrorModel m = fixtures::t3();
    ErrorConfig x = m.make_config({0, 1});
    ErrorConfig y = m.make_config({1, 2});
    CHECK(config_xor(x, y).indices() == std::vector<uint32_t>{0, 2});
    CHECK(config_xor(x, x).none());
    CHECK(config_xor(x, m.empty_config()) == x);
}

TEST_CASE("linearity of syndrome_of and observable_of") {
    Rng rng(21, 0);
    for (int trial = 0; trial < 200; trial++) {
        ErrorModel m = support::random_hypergraph(rng);
        ErrorConfig a = m.empty_config(), b = m.empty_config();
        for (size_t i = 0; i < m.num_edges(); i++) {
            if (rng.next_double() < 0.4)
                a.set(i);
            if (rng.next_double() < 0.4)
                b.set(i);
        }
        CHECK(syndrome_of(a ^ b, m) == (syndrome_of(a, m) ^ syndrome_of(b, m)));
        CHECK(observable_of(a ^ b, m) == (observable_of(a, m) ^ observable_of(b, m)));
    }
}

TEST_CASE("model validation") {
    SUBCASE("detector index out of range") {
        std::vector<Hyperedge> edges = {fixtures::edge(0, {5}, 1.0)};
        CHECK_THROWS_AS(ErrorModel(2, 1, std::move(edges)), Error);
    }
    SUBCASE("probability bounds") {
        std::vector<Hyperedge> edges = {fixtures::edge(0, {0}, 1.0)};
        edges[0].probability = 0.6;
        CHECK_THROWS_AS(ErrorModel(1, 1, std::move(edges)), InvalidProbabilityError);
        std::vector<Hyperedge> edges2 = {fixtures::edge(0, {0}, 1.0)};
        edges2[0].probability = 0.0;
        CHECK_THROWS_AS(ErrorModel(1, 1, std::move(edges2)), InvalidProbabilityError);
    }
    SUBCASE("unsorted detectors") {
        Hyperedge e = fixtures::edge(0, {1, 0}, 1.0);
        std::vector<Hyperedge> edges = {e};
        CHECK_THROWS_AS(ErrorModel(2, 1, std::move(edges)), Error);
    }
    SUBCASE("representative must be null-syndrome with nonzero observable") {
        std::vector<Hyperedge> edges = {fixtures::edge(0, {0}, 1.0, 1)};
        CHECK_THROWS_AS(ErrorModel(1, 1, std::move(edges), {{0}}), Error);
    }
    SUBCASE("weights recomputed from probabilities") {
        Hyperedge e = fixtures::edge(0, {0}, 1.0);
        e.weight = 123.0;  // ignored
        std::vector<Hyperedge> edges = {e};
        ErrorModel m(1, 1, std::move(edges));
        CHECK(m.edge(0).weight == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("edge_detectors cache matches edge lists") {
    Rng rng(22, 0);
    ErrorModel m = support::random_hypergraph(rng);
    for (size_t i = 0; i < m.num_edges(); i++)
        CHECK(m.edge_detectors(i).indices() == m.edge(i).detectors);
}
