#pragma once

// Probabilistic mirror of the IQP ansatz: the same generator subsets acting
// as bit-flip channels, each flipping its mask with probability
// sin^2(theta/2). Includes the exact distribution (XOR convolution) and a
// test-only dephased density-evolution oracle that certifies the reduction
// from the quantum circuit.

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "fvqe/core.hpp"
#include "fvqe/iqp.hpp"

namespace fvqe {

struct ClassicalAnsatz {
    std::uint32_t n_bits = 0;
    std::vector<Generator> channels;  // same masks, same order as the circuit

    static ClassicalAnsatz from_circuit(const IqpCircuit& c) {
        return {c.n_qubits, c.generators};
    }

    std::size_t parameter_count() const { return channels.size(); }

    std::vector<double> parameters() const {
        std::vector<double> theta;
        theta.reserve(channels.size());
        for (const auto& g : channels) theta.push_back(g.theta);
        return theta;
    }

    void set_parameters(const std::vector<double>& theta) {
        if (theta.size() != channels.size())
            throw std::invalid_argument("set_parameters: size mismatch");
        for (std::size_t k = 0; k < theta.size(); ++k) channels[k].theta = theta[k];
    }
};

// Each shot starts at 0..0 and XORs mask k with probability sin^2(theta_k/2).
inline std::vector<BitString> sample_classical(const ClassicalAnsatz& a, std::size_t shots,
                                               SeededRng& rng) {
    std::vector<double> flip(a.channels.size());
    for (std::size_t k = 0; k < a.channels.size(); ++k) {
        double s = std::sin(0.5 * a.channels[k].theta);
        flip[k] = s * s;
    }
    std::vector<BitString> out;
    out.reserve(shots);
    for (std::size_t i = 0; i < shots; ++i) {
        std::uint64_t x = 0;
        for (std::size_t k = 0; k < a.channels.size(); ++k)
            if (rng.bernoulli(flip[k])) x ^= a.channels[k].mask.value;
        out.emplace_back(a.n_bits, x);
    }
    return out;
}

// Full 2^N table: each channel is a two-point convolution
//   p'[x] = (1-s) p[x] + s p[x^mask],  s = sin^2(theta/2).
inline std::vector<double> exact_classical_distribution(const ClassicalAnsatz& a) {
    if (a.n_bits == 0 || a.n_bits > 20)
        throw std::invalid_argument("exact_classical_distribution: need 1..20 bits");
    std::vector<double> p(std::size_t{1} << a.n_bits, 0.0);
    p[0] = 1.0;
    for (const auto& ch : a.channels) {
        double s = std::sin(0.5 * ch.theta);
        s *= s;
        std::uint64_t m = ch.mask.value;
        for (std::size_t x = 0; x < p.size(); ++x) {
            std::size_t y = x ^ m;
            if (x < y) {
                double px = p[x], py = p[y];
                p[x] = (1.0 - s) * px + s * py;
                p[y] = (1.0 - s) * py + s * px;
            }
        }
    }
    return p;
}

// Test-only oracle: literal density evolution of the layered circuit with a
// complete dephasing channel D_q(rho) = (rho + Z_q rho Z_q)/2 on every qubit
// after each rotation, CNOT columns applied as basis permutations between
// layers. Returns the diagonal, which must equal the classical distribution.
inline std::vector<double> dephased_iqp_oracle(const IqpCircuit& c, const CnotPattern& pattern) {
    if (c.n_qubits > 6) throw std::invalid_argument("dephased_iqp_oracle: capped at 6 qubits");
    const std::uint32_t n = c.n_qubits;
    const std::size_t dim = std::size_t{1} << n;

    // Recover which (layer, qubit) rotations survived deduplication; the
    // survivors must line up with the circuit's generator list.
    std::vector<std::uint64_t> masks = propagated_masks(n, c.layers, pattern);
    std::vector<std::size_t> survivors;
    for (std::size_t k = 0; k < masks.size(); ++k) {
        bool repeated_later = false;
        for (std::size_t j = k + 1; j < masks.size() && !repeated_later; ++j)
            repeated_later = (masks[j] == masks[k]);
        if (!repeated_later) survivors.push_back(k);
    }
    if (survivors.size() != c.generators.size())
        throw std::invalid_argument("dephased_iqp_oracle: circuit does not match the pattern");
    for (std::size_t i = 0; i < survivors.size(); ++i)
        if (masks[survivors[i]] != c.generators[i].mask.value)
            throw std::invalid_argument("dephased_iqp_oracle: circuit does not match the pattern");

    std::vector<std::vector<std::complex<double>>> rho(
        dim, std::vector<std::complex<double>>(dim, {0.0, 0.0}));
    rho[0][0] = {1.0, 0.0};

    auto rotate = [&](std::uint32_t q0, double theta) {
        std::uint64_t m = qubit_mask(n, q0);
        double cs = std::cos(0.5 * theta), sn = std::sin(0.5 * theta);
        std::complex<double> mi = {0.0, -sn}, pi_ = {0.0, sn};
        for (std::size_t col = 0; col < dim; ++col)  // rho <- U rho
            for (std::size_t x = 0; x < dim; ++x) {
                std::size_t y = x ^ m;
                if (x < y) {
                    auto ax = rho[x][col], ay = rho[y][col];
                    rho[x][col] = cs * ax + mi * ay;
                    rho[y][col] = cs * ay + mi * ax;
                }
            }
        for (std::size_t row = 0; row < dim; ++row)  // rho <- rho U+
            for (std::size_t x = 0; x < dim; ++x) {
                std::size_t y = x ^ m;
                if (x < y) {
                    auto ax = rho[row][x], ay = rho[row][y];
                    rho[row][x] = cs * ax + pi_ * ay;
                    rho[row][y] = cs * ay + pi_ * ax;
                }
            }
    };
    auto dephase_all = [&]() {
        for (std::uint32_t q = 0; q < n; ++q) {
            std::uint64_t m = qubit_mask(n, q);
            for (std::size_t r = 0; r < dim; ++r)
                for (std::size_t col = 0; col < dim; ++col)
                    if ((r & m) != (col & m)) rho[r][col] = {0.0, 0.0};
        }
    };
    auto apply_cnot = [&](const Cnot& g) {
        std::uint64_t cm = qubit_mask(n, g.control - 1), tm = qubit_mask(n, g.target - 1);
        auto perm = [&](std::size_t x) { return (x & cm) ? (x ^ tm) : x; };
        std::vector<std::vector<std::complex<double>>> out(
            dim, std::vector<std::complex<double>>(dim, {0.0, 0.0}));
        for (std::size_t r = 0; r < dim; ++r)
            for (std::size_t col = 0; col < dim; ++col) out[perm(r)][perm(col)] = rho[r][col];
        rho = std::move(out);
    };

    std::size_t next = 0;
    for (std::uint32_t l = 1; l <= c.layers; ++l) {
        for (std::uint32_t q = 0; q < n; ++q) {
            std::size_t k = std::size_t{l - 1} * n + q;
            if (next < survivors.size() && survivors[next] == k) {
                rotate(q, c.generators[next].theta);
                dephase_all();
                ++next;
            }
        }
        if (l < c.layers) {
            for (const auto& g : pattern.first) apply_cnot(g);
            for (const auto& g : pattern.second) apply_cnot(g);
        }
    }

    std::vector<double> diag(dim);
    for (std::size_t x = 0; x < dim; ++x) diag[x] = rho[x][x].real();
    return diag;
}

inline std::vector<double> dephased_iqp_oracle(const IqpCircuit& c) {
    return dephased_iqp_oracle(c, line_pattern(c.n_qubits));
}

} // namespace fvqe
