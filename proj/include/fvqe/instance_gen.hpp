#pragma once

// Random instances: connected 3-regular graphs by the pairing model with
// rejection, fully random positive travel costs, and the exhaustive
// solution-spectrum report (fraction of candidates at or above each
// approximation-ratio threshold).

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fvqe/core.hpp"
#include "fvqe/encodings.hpp"

namespace fvqe {

namespace detail {

// One pairing attempt: shuffle 3n stubs, pair consecutively; reject
// self-loops and parallel edges.
inline bool try_pairing(int n, SeededRng& rng, std::vector<std::pair<int, int>>& edges) {
    std::vector<int> stubs(static_cast<std::size_t>(3 * n));
    for (std::size_t i = 0; i < stubs.size(); ++i) stubs[i] = static_cast<int>(i) / 3 + 1;
    for (std::size_t i = 0; i + 1 < stubs.size(); ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.below(stubs.size() - i));
        std::swap(stubs[i], stubs[j]);
    }
    edges.clear();
    for (std::size_t i = 0; i < stubs.size(); i += 2) {
        int u = stubs[i], v = stubs[i + 1];
        if (u == v) return false;
        if (u > v) std::swap(u, v);
        edges.emplace_back(u, v);
    }
    std::sort(edges.begin(), edges.end());
    return std::adjacent_find(edges.begin(), edges.end()) == edges.end();
}

inline bool all_reachable(int n, const std::vector<std::pair<int, int>>& edges) {
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n + 1));
    for (auto [u, v] : edges) {
        adj[static_cast<std::size_t>(u)].push_back(v);
        adj[static_cast<std::size_t>(v)].push_back(u);
    }
    std::vector<char> seen(static_cast<std::size_t>(n + 1), 0);
    std::vector<int> stack{1};
    seen[1] = 1;
    int count = 1;
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (int v : adj[static_cast<std::size_t>(u)])
            if (!seen[static_cast<std::size_t>(v)]) {
                seen[static_cast<std::size_t>(v)] = 1;
                ++count;
                stack.push_back(v);
            }
    }
    return count == n;
}

} // namespace detail

// Uniform connected 3-regular graph (pairing model, rejection) with i.i.d.
// uniform (0,1] weights on sorted edges.
inline MaxCutInstance generate_maxcut(int n, std::uint64_t seed) {
    if (n < 4 || n % 2 != 0)
        throw std::invalid_argument("generate_maxcut: 3-regularity needs even n >= 4");
    SeededRng rng(seed);
    std::vector<std::pair<int, int>> edges;
    while (!(detail::try_pairing(n, rng, edges) && detail::all_reachable(n, edges))) {}
    MaxCutInstance inst;
    inst.n = n;
    for (auto [u, v] : edges) inst.edges.push_back({u, v, rng.uniform_pos()});
    validate(inst);
    return inst;
}

// Travel costs i.i.d. uniform on (0,1] off the diagonal, generally
// asymmetric.
inline AtspInstance generate_atsp(int n, std::uint64_t seed) {
    if (n < 4) throw std::invalid_argument("generate_atsp: need n >= 4");
    SeededRng rng(seed);
    AtspInstance inst;
    inst.n = n;
    inst.W.assign(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n), 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j)
                inst.W[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = rng.uniform_pos();
    validate(inst);
    return inst;
}

inline constexpr std::uint32_t kMaxSpectrumQubits = 29;

struct SpectrumReport {
    std::vector<double> thresholds;  // ascending ratio thresholds
    std::vector<double> fractions;   // fraction of all 2^N candidates with ratio >= threshold
    double reference = 0.0;          // single-optimum line: 2^-N, or 1/(n-1)! for routes
};

inline std::vector<double> default_spectrum_thresholds() {
    std::vector<double> t;
    for (int i = 0; i <= 100; ++i) t.push_back(static_cast<double>(i) / 100.0);
    return t;
}

// Streams all 2^N candidates; retains only per-threshold counters.
inline SpectrumReport spectrum(const Problem& pr, std::vector<double> thresholds = {}) {
    if (pr.n_qubits > kMaxSpectrumQubits)
        throw std::invalid_argument("spectrum: exhaustive cap exceeded");
    SpectrumReport rep;
    rep.thresholds = thresholds.empty() ? default_spectrum_thresholds() : std::move(thresholds);
    std::sort(rep.thresholds.begin(), rep.thresholds.end());
    std::vector<std::uint64_t> counts(rep.thresholds.size(), 0);
    const std::uint64_t space = std::uint64_t{1} << pr.n_qubits;
    for (std::uint64_t x = 0; x < space; ++x) {
        double a = pr.ratio_of(pr.raw(BitString(pr.n_qubits, x)));
        // thresholds ascending: once one fails, all larger ones fail
        for (std::size_t t = 0; t < counts.size(); ++t) {
            if (a < rep.thresholds[t]) break;
            ++counts[t];
        }
    }
    for (std::uint64_t c : counts)
        rep.fractions.push_back(static_cast<double>(c) / static_cast<double>(space));
    if (std::holds_alternative<MaxCutInstance>(pr.instance)) {
        rep.reference = 1.0 / static_cast<double>(space);
    } else {
        const auto& a = std::get<AtspInstance>(pr.instance);
        rep.reference = 1.0 / static_cast<double>(factorial(static_cast<std::uint32_t>(a.n - 1)));
    }
    return rep;
}

} // namespace fvqe
