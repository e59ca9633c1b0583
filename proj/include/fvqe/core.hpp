#pragma once

// Shared domain types: fixed-width bit strings, cost rescaling,
// approximation ratios, and deterministic seeded randomness.

#include <cstdint>
#include <cmath>
#include <stdexcept>
#include <string>
#include <random>

namespace fvqe {

// Candidate solution of N bits. Bit q corresponds to qubit q, with qubit 0
// the most significant bit, so `value` doubles as the state-vector index.
struct BitString {
    std::uint32_t width = 0;
    std::uint64_t value = 0;

    BitString() = default;
    BitString(std::uint32_t n, std::uint64_t v) : width(n), value(v) {
        if (n == 0 || n > 63) throw std::invalid_argument("BitString width out of range");
        if (n < 64 && (v >> n) != 0) throw std::invalid_argument("BitString value exceeds width");
    }

    int bit(std::uint32_t q) const {
        if (q >= width) throw std::out_of_range("bit index");
        return static_cast<int>((value >> (width - 1 - q)) & 1u);
    }

    std::string to_string() const {
        std::string s(width, '0');
        for (std::uint32_t q = 0; q < width; ++q) s[q] = bit(q) ? '1' : '0';
        return s;
    }

    static BitString parse(const std::string& s) {
        std::uint64_t v = 0;
        for (char c : s) {
            if (c != '0' && c != '1') throw std::invalid_argument("BitString parse: bad digit");
            v = (v << 1) | static_cast<std::uint64_t>(c - '0');
        }
        return BitString(static_cast<std::uint32_t>(s.size()), v);
    }

    friend bool operator==(const BitString& a, const BitString& b) {
        return a.width == b.width && a.value == b.value;
    }
    friend bool operator!=(const BitString& a, const BitString& b) { return !(a == b); }
    friend bool operator<(const BitString& a, const BitString& b) {
        return a.width != b.width ? a.width < b.width : a.value < b.value;
    }
};

inline BitString xor_bits(const BitString& a, const BitString& b) {
    if (a.width != b.width) throw std::invalid_argument("xor: width mismatch");
    return BitString(a.width, a.value ^ b.value);
}

// A(x) = (c_max - C(x)) / (c_max - c_min); 1 at the optimum, 0 at the worst.
inline double approximation_ratio(double cost, double c_min, double c_max) {
    if (!(c_min < c_max)) throw std::domain_error("approximation_ratio: degenerate cost range");
    return (c_max - cost) / (c_max - c_min);
}

// Deterministic stream. mt19937_64 is fully specified by the standard, so
// identical seeds reproduce identical sequences on every platform. No
// std::*_distribution is used anywhere (those are implementation-defined).
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : seed_(seed), gen_(seed) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t next_u64() { return gen_(); }

    // Uniform on [0, 1) with 53-bit resolution.
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    // Uniform on (0, 1]; used for weights that must be strictly positive.
    double uniform_pos() { return 1.0 - uniform(); }

    // Uniform integer in [0, n) by masked rejection.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("below(0)");
        if (n == 1) return 0;
        std::uint64_t mask = ~std::uint64_t{0} >> __builtin_clzll(n - 1);
        for (;;) {
            std::uint64_t r = gen_() & mask;
            if (r < n) return r;
        }
    }

    bool bernoulli(double p) { return uniform() < p; }

private:
    std::uint64_t seed_;
    std::mt19937_64 gen_;
};

// Derive an independent stream deterministically from a base seed and a tag
// (splitmix64 finalizer; used to give each run its own stream).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ull * (tag + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Affine rescale of a raw cost into (0,1]. `lower` must sit strictly below
// every attainable raw cost (callers shift attainable bounds by delta).
struct CostModel {
    double lower = 0.0;
    double upper = 1.0;

    CostModel() = default;
    CostModel(double lo, double hi) : lower(lo), upper(hi) {
        if (!(lo < hi)) throw std::domain_error("CostModel: lower must be < upper");
    }

    double rescale(double raw) const { return (raw - lower) / (upper - lower); }
};

} // namespace fvqe
