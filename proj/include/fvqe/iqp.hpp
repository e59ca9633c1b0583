#pragma once

// Layered hardware-efficient IQP ansatz on a chain (or an adapted coupling
// graph): per-qubit X rotations interleaved with two-column CNOT blocks.
// Commuting the CNOTs to the circuit end turns every rotation into a
// multi-qubit X generator; duplicates keep their last occurrence so the
// final layer stays free for the uniform-state initialization.

#include <algorithm>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fvqe/core.hpp"
#include "fvqe/statevector.hpp"

namespace fvqe {

// Qubits are 1-based in gate descriptions, matching circuit diagrams.
struct Cnot {
    std::uint32_t control = 0, target = 0;
};

// One CNOT block: the first column is applied before the second. Columns are
// ordered gate lists, not matchings (adapted layouts may share targets).
struct CnotPattern {
    std::vector<Cnot> first, second;
};

// Chain block: odd controls pointing down, then even controls pointing down.
inline CnotPattern line_pattern(std::uint32_t n_qubits) {
    if (n_qubits < 2) throw std::invalid_argument("line_pattern: need >= 2 qubits");
    CnotPattern p;
    for (std::uint32_t q = 1; q + 1 <= n_qubits; q += 2) p.first.push_back({q, q + 1});
    for (std::uint32_t q = 2; q + 1 <= n_qubits; q += 2) p.second.push_back({q, q + 1});
    return p;
}

struct Generator {
    BitString mask;           // qubit subset the propagated rotation acts on
    double theta = 0.0;
    std::uint32_t layer = 0;  // originating rotation layer, 1-based
};

struct IqpCircuit {
    std::uint32_t n_qubits = 0;
    std::uint32_t layers = 0;
    std::vector<Generator> generators;

    std::size_t parameter_count() const { return generators.size(); }

    std::vector<double> parameters() const {
        std::vector<double> theta;
        theta.reserve(generators.size());
        for (const auto& g : generators) theta.push_back(g.theta);
        return theta;
    }

    void set_parameters(const std::vector<double>& theta) {
        if (theta.size() != generators.size())
            throw std::invalid_argument("set_parameters: size mismatch");
        for (std::size_t k = 0; k < theta.size(); ++k) generators[k].theta = theta[k];
    }
};

namespace detail {

// Push a single CNOT past an X-type mask: a control inside the subset
// toggles the target, a target inside it changes nothing.
inline std::uint64_t propagate_cnot(std::uint64_t mask, const Cnot& g, std::uint32_t n) {
    if (mask & qubit_mask(n, g.control - 1)) mask ^= qubit_mask(n, g.target - 1);
    return mask;
}

inline std::uint64_t propagate_pattern(std::uint64_t mask, const CnotPattern& p, std::uint32_t n) {
    for (const auto& g : p.first) mask = propagate_cnot(mask, g, n);
    for (const auto& g : p.second) mask = propagate_cnot(mask, g, n);
    return mask;
}

} // namespace detail

// All rotation masks in rotation order (layer-major, qubit 1..N within each
// layer), each pushed through the blocks that follow its layer. Blocks sit
// between rotation layers only, so layer l passes through layers-l blocks.
inline std::vector<std::uint64_t> propagated_masks(std::uint32_t n_qubits, std::uint32_t layers,
                                                   const CnotPattern& pattern) {
    if (n_qubits < 2) throw std::invalid_argument("propagated_masks: need >= 2 qubits");
    if (layers < 1) throw std::invalid_argument("propagated_masks: need >= 1 layer");
    std::vector<std::uint64_t> masks;
    masks.reserve(std::size_t{n_qubits} * layers);
    for (std::uint32_t l = 1; l <= layers; ++l)
        for (std::uint32_t q = 0; q < n_qubits; ++q) {
            std::uint64_t m = qubit_mask(n_qubits, q);
            for (std::uint32_t b = l; b < layers; ++b)
                m = detail::propagate_pattern(m, pattern, n_qubits);
            masks.push_back(m);
        }
    return masks;
}

inline IqpCircuit build_circuit(std::uint32_t n_qubits, std::uint32_t layers,
                                const CnotPattern& pattern) {
    std::vector<std::uint64_t> masks = propagated_masks(n_qubits, layers, pattern);
    IqpCircuit c;
    c.n_qubits = n_qubits;
    c.layers = layers;
    // Deduplicate from the left: of equal masks only the last one survives.
    for (std::size_t k = 0; k < masks.size(); ++k) {
        bool repeated_later = false;
        for (std::size_t j = k + 1; j < masks.size() && !repeated_later; ++j)
            repeated_later = (masks[j] == masks[k]);
        if (!repeated_later)
            c.generators.push_back({BitString(n_qubits, masks[k]), 0.0,
                                    static_cast<std::uint32_t>(k / n_qubits) + 1});
    }
    return c;
}

inline IqpCircuit build_line_circuit(std::uint32_t n_qubits, std::uint32_t layers) {
    return build_circuit(n_qubits, layers, line_pattern(n_qubits));
}

// Every pair of qubits shares at least one generator subset.
inline bool pair_coverage(const IqpCircuit& c) {
    for (std::uint32_t i = 0; i + 1 < c.n_qubits; ++i)
        for (std::uint32_t j = i + 1; j < c.n_qubits; ++j) {
            std::uint64_t pair = qubit_mask(c.n_qubits, i) | qubit_mask(c.n_qubits, j);
            bool covered = false;
            for (const auto& g : c.generators)
                if ((g.mask.value & pair) == pair) { covered = true; break; }
            if (!covered) return false;
        }
    return true;
}

// Smallest layer count whose chain circuit satisfies pair coverage.
inline std::uint32_t choose_layers(std::uint32_t n_qubits) {
    for (std::uint32_t l = 1; l <= 2 * n_qubits + 2; ++l)
        if (pair_coverage(build_line_circuit(n_qubits, l))) return l;
    throw std::logic_error("choose_layers: coverage not reached");
}

// Zero everywhere except the final rotation layer at pi/2, which prepares
// the uniform superposition over all candidates.
inline std::vector<double> initial_parameters(const IqpCircuit& c) {
    std::vector<double> theta(c.generators.size(), 0.0);
    for (std::size_t k = 0; k < theta.size(); ++k)
        if (c.generators[k].layer == c.layers) theta[k] = std::numbers::pi / 2;
    return theta;
}

inline StateVector apply_generators(const IqpCircuit& c) {
    StateVector psi(c.n_qubits);
    for (const auto& g : c.generators) psi.apply_generator(g.mask.value, g.theta);
    return psi;
}

// Samples of the +pi/2-shifted circuit on parameter k, XORed with q_k, are
// distributed exactly as the -pi/2-shifted circuit.
inline std::vector<BitString> xor_pushforward(const std::vector<BitString>& samples,
                                              const BitString& mask) {
    std::vector<BitString> out;
    out.reserve(samples.size());
    for (const auto& x : samples) out.push_back(xor_bits(x, mask));
    return out;
}

// ---- coupling-graph layout adaptation ----

struct ConnectivityGraph {
    std::uint32_t nodes = 0;                                  // labeled 1..nodes
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
};

namespace detail {

inline std::vector<std::vector<std::uint32_t>> adjacency(const ConnectivityGraph& g) {
    std::vector<std::vector<std::uint32_t>> adj(g.nodes + 1);
    for (auto [u, v] : g.edges) {
        if (u < 1 || v < 1 || u > g.nodes || v > g.nodes || u == v)
            throw std::invalid_argument("ConnectivityGraph: bad edge");
        if (std::find(adj[u].begin(), adj[u].end(), v) == adj[u].end()) {
            adj[u].push_back(v);
            adj[v].push_back(u);
        }
    }
    for (auto& nb : adj) std::sort(nb.begin(), nb.end());
    return adj;
}

inline bool connected(const ConnectivityGraph& g,
                      const std::vector<std::vector<std::uint32_t>>& adj) {
    if (g.nodes == 0) return false;
    std::vector<char> seen(g.nodes + 1, 0);
    std::vector<std::uint32_t> stack = {1};
    seen[1] = 1;
    while (!stack.empty()) {
        std::uint32_t u = stack.back();
        stack.pop_back();
        for (std::uint32_t v : adj[u])
            if (!seen[v]) { seen[v] = 1; stack.push_back(v); }
    }
    for (std::uint32_t v = 1; v <= g.nodes; ++v)
        if (!seen[v]) return false;
    return true;
}

// Exhaustive search shared by longest-cycle and longest-path. Ties resolve
// to the lexicographically smallest vertex sequence, which also fixes the
// traversal direction (second vertex is the smaller neighbor).
struct SpineSearch {
    const std::vector<std::vector<std::uint32_t>>& adj;
    bool want_cycle;
    std::vector<std::uint32_t> best, cur;
    std::vector<char> used;

    void consider(const std::vector<std::uint32_t>& cand) {
        if (cand.size() > best.size() || (cand.size() == best.size() && cand < best)) best = cand;
    }

    void dfs(std::uint32_t start) {
        std::uint32_t u = cur.back();
        if (!want_cycle) consider(cur);
        for (std::uint32_t v : adj[u]) {
            if (want_cycle && v == start && cur.size() >= 3) consider(cur);
            // Cycles canonicalize by making the start their minimum vertex;
            // paths may pass below their start, so only cycles prune on it.
            if (used[v] || (want_cycle && v <= start)) continue;
            used[v] = 1;
            cur.push_back(v);
            dfs(start);
            cur.pop_back();
            used[v] = 0;
        }
    }
};

inline std::vector<std::uint32_t> longest_spine(const ConnectivityGraph& g,
                                                const std::vector<std::vector<std::uint32_t>>& adj,
                                                bool want_cycle) {
    SpineSearch s{adj, want_cycle, {}, {}, std::vector<char>(g.nodes + 1, 0)};
    for (std::uint32_t v = 1; v <= g.nodes; ++v) {
        s.cur = {v};
        s.used.assign(g.nodes + 1, 0);
        s.used[v] = 1;
        s.dfs(v);
    }
    return s.best;
}

} // namespace detail

// Two-column CNOT pattern for an arbitrary coupling graph: directed CNOTs
// alternate colors around the longest cycle (first column first), then each
// remaining qubit hooks on pointing inward, reusing the color that already
// enters its anchor. A forest falls back to the longest path, which on a
// plain chain reproduces line_pattern.
inline CnotPattern adapt_layout(const ConnectivityGraph& g,
                                const std::vector<std::uint32_t>& explicit_cycle = {}) {
    auto adj = detail::adjacency(g);
    if (!detail::connected(g, adj)) throw std::invalid_argument("adapt_layout: graph not connected");
    if (g.nodes > 20 && explicit_cycle.empty())
        throw std::invalid_argument(
            "adapt_layout: exhaustive cycle search capped at 20 nodes; pass the cycle explicitly");

    std::vector<std::uint32_t> spine = explicit_cycle;
    bool cyclic = !spine.empty();
    if (spine.empty()) {
        spine = detail::longest_spine(g, adj, true);
        cyclic = !spine.empty();
        if (!cyclic) spine = detail::longest_spine(g, adj, false);
    }
    if (spine.size() < 2) throw std::invalid_argument("adapt_layout: no usable spine");

    CnotPattern p;
    // in_color[v]: column (1 or 2) of an arrow already pointing into v.
    std::vector<int> in_color(g.nodes + 1, 0), out_color(g.nodes + 1, 0);
    std::vector<char> placed(g.nodes + 1, 0);
    auto emit = [&p](std::uint32_t c, std::uint32_t t, int color) {
        (color == 1 ? p.first : p.second).push_back({c, t});
    };

    std::size_t arrows = cyclic ? spine.size() : spine.size() - 1;
    for (std::size_t i = 0; i < arrows; ++i) {
        std::uint32_t u = spine[i], v = spine[(i + 1) % spine.size()];
        int color = (i % 2 == 0) ? 1 : 2;
        emit(u, v, color);
        out_color[u] = color;
        in_color[v] = color;
    }
    for (std::uint32_t v : spine) placed[v] = 1;

    // Attach the rest, smallest new label first, to its smallest placed
    // neighbor; no entering arrow yet means alternate off the outgoing one.
    for (;;) {
        std::uint32_t u = 0, anchor = 0;
        for (std::uint32_t v = 1; v <= g.nodes && u == 0; ++v) {
            if (placed[v]) continue;
            for (std::uint32_t w : adj[v])
                if (placed[w]) { u = v; anchor = w; break; }
        }
        if (u == 0) break;
        int color = in_color[anchor] != 0 ? in_color[anchor] : (out_color[anchor] == 1 ? 2 : 1);
        emit(u, anchor, color);
        out_color[u] = color;
        in_color[anchor] = color;
        placed[u] = 1;
    }
    for (std::uint32_t v = 1; v <= g.nodes; ++v)
        if (!placed[v]) throw std::logic_error("adapt_layout: unattached qubit");
    return p;
}

} // namespace fvqe
