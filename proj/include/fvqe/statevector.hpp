#pragma once

// Dense noiseless statevector over up to 29 qubits. Only what the X-type
// generator family needs: rotations exp(-i theta/2 X_mask) and basis
// sampling. Masks live in value space (bit width-1-q of the word is qubit q),
// so x ^ mask is directly the flipped basis index.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "fvqe/core.hpp"

namespace fvqe {

inline constexpr std::uint32_t kMaxQubits = 29;

// Mask with exactly qubit q set, in value space.
inline std::uint64_t qubit_mask(std::uint32_t width, std::uint32_t q) {
    if (q >= width) throw std::out_of_range("qubit_mask: qubit out of range");
    return std::uint64_t{1} << (width - 1 - q);
}

class StateVector {
public:
    explicit StateVector(std::uint32_t n_qubits) : n_(n_qubits) {
        if (n_ == 0 || n_ > kMaxQubits) throw std::invalid_argument("StateVector: need 1..29 qubits");
        amps_.assign(std::size_t{1} << n_, {0.0, 0.0});
        amps_[0] = {1.0, 0.0};
    }

    std::uint32_t qubits() const { return n_; }
    std::size_t dim() const { return amps_.size(); }
    const std::vector<std::complex<double>>& amplitudes() const { return amps_; }

    // exp(-i theta/2 X_mask): pairs (x, x^mask) mix as
    //   a'[x] = cos(theta/2) a[x] - i sin(theta/2) a[x^mask].
    void apply_generator(std::uint64_t mask, double theta) {
        if (mask == 0 || (mask >> n_) != 0)
            throw std::invalid_argument("apply_generator: mask outside register");
        const double c = std::cos(0.5 * theta);
        const std::complex<double> ms = {0.0, -std::sin(0.5 * theta)};
        const std::size_t dim = amps_.size();
        for (std::size_t x = 0; x < dim; ++x) {
            std::size_t y = x ^ mask;
            if (x < y) {
                std::complex<double> ax = amps_[x], ay = amps_[y];
                amps_[x] = c * ax + ms * ay;
                amps_[y] = c * ay + ms * ax;
            }
        }
    }

    double probability(std::size_t x) const { return std::norm(amps_[x]); }

    std::vector<double> probabilities() const {
        std::vector<double> p(amps_.size());
        for (std::size_t x = 0; x < amps_.size(); ++x) p[x] = std::norm(amps_[x]);
        return p;
    }

    double norm_squared() const {
        double s = 0.0;
        for (const auto& a : amps_) s += std::norm(a);
        return s;
    }

    // `count` basis measurements. One sorted sweep over the probability mass
    // stands in for per-shot CDF searches: shot i lands on the first x whose
    // cumulative probability exceeds u_i. Shots are returned in draw order.
    std::vector<BitString> sample(SeededRng& rng, std::size_t count) const {
        std::vector<double> u(count);
        for (auto& v : u) v = rng.uniform();
        std::vector<std::size_t> order(count);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(),
                  [&u](std::size_t a, std::size_t b) { return u[a] < u[b]; });

        std::vector<std::uint64_t> hit(count, amps_.size() - 1);
        double cum = 0.0;
        std::size_t next = 0;
        for (std::size_t x = 0; x < amps_.size() && next < count; ++x) {
            cum += std::norm(amps_[x]);
            while (next < count && u[order[next]] < cum) hit[order[next++]] = x;
        }
        std::vector<BitString> out;
        out.reserve(count);
        for (std::size_t i = 0; i < count; ++i) out.emplace_back(n_, hit[i]);
        return out;
    }

private:
    std::uint32_t n_;
    std::vector<std::complex<double>> amps_;
};

} // namespace fvqe
