#include "doctest.h"
#include "libra/bitvec.hpp"
#include "libra/rng.hpp"

using libra::BitVec;

TEST_CASE("set, test, flip, count") {
    BitVec b(130);
    CHECK(b.none());
    CHECK(b.count() == 0);
    b.set(0);
    b.set(64);
    b.set(129);
    CHECK(b.test(0));
    CHECK(b.test(64));
    CHECK(b.test(129));
    CHECK(!b.test(1));
    CHECK(b.count() == 3);
    b.flip(64);
    CHECK(!b.test(64));
    CHECK(b.count() == 2);
    b.clear();
    CHECK(b.none());
}

TEST_CASE("xor algebra") {
    BitVec a(100), b(100);
    a.set(3);
    a.set(70);
    b.set(70);
    b.set(99);
    BitVec c = a ^ b;
    CHECK(c.test(3));
    CHECK(!c.test(70));
    CHECK(c.test(99));
    CHECK((c ^ c).none());
    CHECK((c ^ BitVec(100)) == c);
    CHECK((a ^ b) == (b ^ a));
}

TEST_CASE("indices and for_each_set") {
    BitVec b(200);
    b.set(5);
    b.set(64);
    b.set(191);
    CHECK(b.indices() == std::vector<uint32_t>{5, 64, 191});
    size_t visited = 0;
    b.for_each_set([&](size_t i) {
        visited++;
        CHECK(b.test(i));
    });
    CHECK(visited == 3);
}

TEST_CASE("intersects") {
    BitVec a(100), b(100);
    a.set(42);
    b.set(43);
    CHECK(!a.intersects(b));
    b.set(42);
    CHECK(a.intersects(b));
}

TEST_CASE("lex_less matches sorted index-list comparison") {
    libra::Rng rng(11, 0);
    for (int trial = 0; trial < 2000; trial++) {
        BitVec a(130), b(130);
        for (int k = 0; k < 5; k++) {
            if (rng.next_double() < 0.7)
                a.set(rng.next_u64() % 130);
            if (rng.next_double() < 0.7)
                b.set(rng.next_u64() % 130);
        }
        bool expected = a.indices() < b.indices();
        CHECK(a.lex_less(b) == expected);
    }
}

TEST_CASE("lex_less proper prefix") {
    BitVec a(64), b(64);
    a.set(2);
    b.set(2);
    b.set(9);
    CHECK(a.lex_less(b));   // {2} < {2,9}
    CHECK(!b.lex_less(a));
    CHECK(!a.lex_less(a));
    BitVec empty(64);
    CHECK(empty.lex_less(a));  // {} < {2}
}

TEST_CASE("hash equal for equal sets") {
    BitVec a(100), b(100);
    a.set(17);
    b.set(17);
    CHECK(a.hash() == b.hash());
    b.set(18);
    CHECK(a != b);
}
