#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace libra {

// Dynamic fixed-width bitset used for detector sets (Syndrome) and
// hyperedge-index sets (ErrorConfig).  Width is fixed at construction.
class BitVec {
  public:
    BitVec() = default;
    explicit BitVec(size_t num_bits) : num_bits_(num_bits), words_((num_bits + 63) / 64, 0) {}

    size_t size() const {
        return num_bits_;
    }

    bool test(size_t i) const {
        return (words_[i >> 6] >> (i & 63)) & 1;
    }

    void set(size_t i, bool value = true) {
        if (value)
            words_[i >> 6] |= uint64_t{1} << (i & 63);
        else
            words_[i >> 6] &= ~(uint64_t{1} << (i & 63));
    }

    void flip(size_t i) {
        words_[i >> 6] ^= uint64_t{1} << (i & 63);
    }

    void clear() {
        for (auto& w : words_)
            w = 0;
    }

    BitVec& operator^=(const BitVec& other) {
        for (size_t k = 0; k < words_.size(); k++)
            words_[k] ^= other.words_[k];
        return *this;
    }

    friend BitVec operator^(BitVec a, const BitVec& b) {
        a ^= b;
        return a;
    }

    bool operator==(const BitVec& other) const {
        return num_bits_ == other.num_bits_ && words_ == other.words_;
    }

    bool operator!=(const BitVec& other) const {
        return !(*this == other);
    }

    // Lexicographic order on the sorted index lists (smallest member first).
    bool lex_less(const BitVec& other) const {
        for (size_t k = 0; k < words_.size() && k < other.words_.size(); k++) {
            uint64_t diff = words_[k] ^ other.words_[k];
            if (diff == 0)
                continue;
            uint64_t low = diff & (~diff + 1);
            // We hold the smaller next element: smaller unless the other
            // side has already ended (then it is a proper prefix of us).
            if (words_[k] & low)
                return other.tail_any(k, low);
            // The other side holds the smaller next element: it is smaller
            // unless we have already ended (then we are its proper prefix).
            return !tail_any(k, low);
        }
        return false;
    }

    bool any() const {
        for (auto w : words_)
            if (w)
                return true;
        return false;
    }

    bool none() const {
        return !any();
    }

    size_t count() const {
        size_t c = 0;
        for (auto w : words_)
            c += (size_t)__builtin_popcountll(w);
        return c;
    }

    bool intersects(const BitVec& other) const {
        size_t n = words_.size() < other.words_.size() ? words_.size() : other.words_.size();
        for (size_t k = 0; k < n; k++)
            if (words_[k] & other.words_[k])
                return true;
        return false;
    }

    template <typename F>
    void for_each_set(F&& f) const {
        for (size_t k = 0; k < words_.size(); k++) {
            uint64_t w = words_[k];
            while (w) {
                uint64_t low = w & (~w + 1);
                f(k * 64 + (size_t)__builtin_ctzll(w));
                w ^= low;
            }
        }
    }

    std::vector<uint32_t> indices() const {
        std::vector<uint32_t> out;
        out.reserve(count());
        for_each_set([&](size_t i) { out.push_back((uint32_t)i); });
        return out;
    }

    size_t hash() const {
        uint64_t h = 0xcbf29ce484222325ull;
        for (auto w : words_) {
            h ^= w;
            h *= 0x100000001b3ull;
        }
        return (size_t)h;
    }

  private:
    bool tail_any(size_t word_index, uint64_t low_bit) const {
        // Any set bit strictly above low_bit (in this word or later words)?
        uint64_t above = words_[word_index] & ~(low_bit | (low_bit - 1));
        if (above)
            return true;
        for (size_t k = word_index + 1; k < words_.size(); k++)
            if (words_[k])
                return true;
        return false;
    }

    size_t num_bits_ = 0;
    std::vector<uint64_t> words_;
};

struct BitVecHash {
    size_t operator()(const BitVec& b) const {
        return b.hash();
    }
};

}  // namespace libra
