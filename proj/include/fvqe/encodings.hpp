#pragma once

// Problem encodings: weighted MaxCut with the last vertex's tag fixed to 0,
// and the generalized ATSP cost (binary index -> Lehmer permutation -> route
// length), plus rescaling bounds for both.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <tuple>
#include <variant>
#include <vector>

#include "fvqe/core.hpp"

namespace fvqe {

// Vertices are 1-based to match the instance file format.
struct MaxCutEdge {
    int u = 0, v = 0;
    double w = 0.0;
};

struct MaxCutInstance {
    int n = 0;
    std::vector<MaxCutEdge> edges;

    std::uint32_t qubits() const { return static_cast<std::uint32_t>(n - 1); }
};

struct AtspInstance {
    int n = 0;
    std::vector<std::vector<double>> W;  // W[i][j]: cost of i -> j, 0-based

    std::uint32_t qubits() const;
};

inline std::uint64_t factorial(std::uint32_t m) {
    if (m > 20) throw std::overflow_error("factorial: m > 20");
    std::uint64_t f = 1;
    for (std::uint32_t i = 2; i <= m; ++i) f *= i;
    return f;
}

inline std::uint32_t AtspInstance::qubits() const {
    std::uint64_t routes = factorial(static_cast<std::uint32_t>(n - 1));
    std::uint32_t N = 0;
    while ((std::uint64_t{1} << N) < routes) ++N;
    return N;
}

// Cut cost with vertex n fixed on side 0; bit v-1 of x is the tag of vertex v.
// Always <= 0: the negated total weight of edges cut by the partition.
inline double maxcut_cost(const MaxCutInstance& inst, const BitString& x) {
    if (x.width != inst.qubits()) throw std::invalid_argument("maxcut_cost: width mismatch");
    double c = 0.0;
    for (const auto& e : inst.edges) {
        if (e.v == inst.n || e.u == inst.n) {
            int other = (e.u == inst.n) ? e.v : e.u;
            c -= e.w * x.bit(static_cast<std::uint32_t>(other - 1));
        } else {
            int xu = x.bit(static_cast<std::uint32_t>(e.u - 1));
            int xv = x.bit(static_cast<std::uint32_t>(e.v - 1));
            c -= e.w * (xu + xv - 2 * xu * xv);
        }
    }
    return c;
}

// upper = 0 (empty cut); lower = -(total weight), attained only by bipartite
// graphs but always valid.
inline std::pair<double, double> maxcut_bounds(const MaxCutInstance& inst) {
    if (inst.edges.empty()) throw std::invalid_argument("maxcut_bounds: no edges");
    double total = 0.0;
    for (const auto& e : inst.edges) total += e.w;
    return {-total, 0.0};
}

// index-th permutation of {0,..,m-1} in factoradic (lexicographic) order.
inline std::vector<std::uint32_t> lehmer_decode(std::uint64_t index, std::uint32_t m) {
    if (index >= factorial(m)) throw std::out_of_range("lehmer_decode: index >= m!");
    std::vector<std::uint32_t> avail(m);
    for (std::uint32_t i = 0; i < m; ++i) avail[i] = i;
    std::vector<std::uint32_t> perm;
    perm.reserve(m);
    for (std::uint32_t i = m; i >= 1; --i) {
        std::uint64_t f = factorial(i - 1);
        std::uint64_t d = index / f;
        index %= f;
        perm.push_back(avail[static_cast<std::size_t>(d)]);
        avail.erase(avail.begin() + static_cast<std::ptrdiff_t>(d));
    }
    return perm;
}

// Inverse of lehmer_decode; used by the annealer to re-encode routes.
inline std::uint64_t lehmer_encode(const std::vector<std::uint32_t>& perm) {
    std::uint32_t m = static_cast<std::uint32_t>(perm.size());
    std::vector<std::uint32_t> avail(m);
    for (std::uint32_t i = 0; i < m; ++i) avail[i] = i;
    std::uint64_t index = 0;
    for (std::uint32_t i = 0; i < m; ++i) {
        auto it = std::find(avail.begin(), avail.end(), perm[i]);
        if (it == avail.end()) throw std::invalid_argument("lehmer_encode: not a permutation");
        index += static_cast<std::uint64_t>(it - avail.begin()) * factorial(m - 1 - i);
        avail.erase(it);
    }
    return index;
}

// Permutation of the first n-1 cities (0-based); city n-1 is implicitly last.
inline std::vector<std::uint32_t> atsp_route(const AtspInstance& inst, const BitString& x) {
    if (x.width != inst.qubits()) throw std::invalid_argument("atsp_route: width mismatch");
    std::uint64_t routes = factorial(static_cast<std::uint32_t>(inst.n - 1));
    return lehmer_decode(x.value % routes, static_cast<std::uint32_t>(inst.n - 1));
}

// Directed cycle length: last city -> sigma_1 -> ... -> sigma_{n-1} -> last.
// Excess indices (>= (n-1)!) wrap around, doubling the first few routes.
inline double atsp_cost(const AtspInstance& inst, const BitString& x) {
    std::vector<std::uint32_t> sigma = atsp_route(inst, x);
    std::uint32_t last = static_cast<std::uint32_t>(inst.n - 1);
    double c = inst.W[last][sigma.front()];
    for (std::size_t i = 0; i + 1 < sigma.size(); ++i) c += inst.W[sigma[i]][sigma[i + 1]];
    c += inst.W[sigma.back()][last];
    return c;
}

namespace detail {

// Minimum spanning arborescence rooted at `root` (iterative cycle
// contraction). Edge weights may be negative; infinities mean no edge.
inline double min_arborescence(const std::vector<std::vector<double>>& w0, int root) {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    struct E { int u, v; double w; };
    int n = static_cast<int>(w0.size());
    std::vector<E> edges;
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v)
            if (u != v && w0[u][v] != kInf) edges.push_back({u, v, w0[u][v]});

    double total = 0.0;
    for (;;) {
        std::vector<double> in(static_cast<std::size_t>(n), kInf);
        std::vector<int> pre(static_cast<std::size_t>(n), -1);
        for (const auto& e : edges)
            if (e.u != e.v && e.w < in[static_cast<std::size_t>(e.v)]) {
                in[static_cast<std::size_t>(e.v)] = e.w;
                pre[static_cast<std::size_t>(e.v)] = e.u;
            }
        for (int v = 0; v < n; ++v)
            if (v != root && in[static_cast<std::size_t>(v)] == kInf)
                throw std::domain_error("arborescence: disconnected graph");
        in[static_cast<std::size_t>(root)] = 0.0;

        int comp = 0;
        std::vector<int> id(static_cast<std::size_t>(n), -1), mark(static_cast<std::size_t>(n), -1);
        for (int v = 0; v < n; ++v) total += in[static_cast<std::size_t>(v)];
        for (int v = 0; v < n; ++v) {
            int u = v;
            while (u != root && mark[static_cast<std::size_t>(u)] == -1 &&
                   id[static_cast<std::size_t>(u)] == -1) {
                mark[static_cast<std::size_t>(u)] = v;
                u = pre[static_cast<std::size_t>(u)];
            }
            if (u != root && id[static_cast<std::size_t>(u)] == -1 &&
                mark[static_cast<std::size_t>(u)] == v) {
                id[static_cast<std::size_t>(u)] = comp;
                for (int x = pre[static_cast<std::size_t>(u)]; x != u;
                     x = pre[static_cast<std::size_t>(x)])
                    id[static_cast<std::size_t>(x)] = comp;
                ++comp;
            }
        }
        if (comp == 0) return total;
        for (int v = 0; v < n; ++v)
            if (id[static_cast<std::size_t>(v)] == -1) id[static_cast<std::size_t>(v)] = comp++;

        // Contract: entering a cycle refunds the displaced cycle edge.
        std::vector<E> next;
        for (const auto& e : edges) {
            int cu = id[static_cast<std::size_t>(e.u)], cv = id[static_cast<std::size_t>(e.v)];
            if (cu != cv) next.push_back({cu, cv, e.w - in[static_cast<std::size_t>(e.v)]});
        }
        edges = std::move(next);
        root = id[static_cast<std::size_t>(root)];
        n = comp;
    }
}

inline double max_arborescence(const std::vector<std::vector<double>>& w, int root) {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> neg(w.size(), std::vector<double>(w.size(), kInf));
    for (std::size_t u = 0; u < w.size(); ++u)
        for (std::size_t v = 0; v < w.size(); ++v)
            if (u != v && w[u][v] != kInf) neg[u][v] = -w[u][v];
    return -min_arborescence(neg, root);
}

} // namespace detail

// Any tour minus the edge entering root r is a spanning arborescence rooted
// at r, so per-root branchings bound the tour from both sides:
//   lower = max over roots of the min arborescence  (< min tour, edges > 0)
//   upper = min over roots of (max arborescence + max single edge)
inline std::pair<double, double> atsp_bounds(const AtspInstance& inst) {
    if (inst.n < 3) throw std::invalid_argument("atsp_bounds: n < 3");
    double w_max = 0.0;
    for (int i = 0; i < inst.n; ++i)
        for (int j = 0; j < inst.n; ++j) {
            if (i == j) continue;
            if (inst.W[i][j] == std::numeric_limits<double>::infinity())
                throw std::domain_error("atsp_bounds: disconnected cost graph");
            w_max = std::max(w_max, inst.W[i][j]);
        }
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();
    for (int r = 0; r < inst.n; ++r) {
        lower = std::max(lower, detail::min_arborescence(inst.W, r));
        upper = std::min(upper, detail::max_arborescence(inst.W, r) + w_max);
    }
    return {lower, upper};
}

// ---- unified problem handle ----

using ProblemInstance = std::variant<MaxCutInstance, AtspInstance>;

inline void validate(const MaxCutInstance& inst) {
    if (inst.n < 2) throw std::invalid_argument("maxcut: need >= 2 vertices");
    if (inst.edges.empty()) throw std::invalid_argument("maxcut: no edges");
    for (const auto& e : inst.edges) {
        if (e.u < 1 || e.v < 1 || e.u > inst.n || e.v > inst.n || e.u == e.v)
            throw std::invalid_argument("maxcut: bad edge endpoints");
        if (!(e.w > 0.0) || e.w > 1.0)
            throw std::invalid_argument("maxcut: edge weight must be in (0,1]");
    }
    for (std::size_t i = 0; i < inst.edges.size(); ++i)
        for (std::size_t j = i + 1; j < inst.edges.size(); ++j) {
            const auto &a = inst.edges[i], &b = inst.edges[j];
            if ((a.u == b.u && a.v == b.v) || (a.u == b.v && a.v == b.u))
                throw std::invalid_argument("maxcut: parallel edge");
        }
}

inline void validate(const AtspInstance& inst) {
    if (inst.n < 3) throw std::invalid_argument("atsp: need >= 3 cities");
    if (inst.W.size() != static_cast<std::size_t>(inst.n))
        throw std::invalid_argument("atsp: cost matrix shape");
    for (int i = 0; i < inst.n; ++i) {
        if (inst.W[static_cast<std::size_t>(i)].size() != static_cast<std::size_t>(inst.n))
            throw std::invalid_argument("atsp: cost matrix shape");
        for (int j = 0; j < inst.n; ++j) {
            double w = inst.W[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if (i == j && w != 0.0) throw std::invalid_argument("atsp: nonzero diagonal");
            if (i != j && !(w > 0.0)) throw std::invalid_argument("atsp: travel costs must be > 0");
        }
    }
}

inline void validate(const ProblemInstance& p) {
    std::visit([](const auto& i) { validate(i); }, p);
}

inline std::uint32_t qubits(const ProblemInstance& p) {
    return std::visit([](const auto& i) { return i.qubits(); }, p);
}

inline double raw_cost(const ProblemInstance& p, const BitString& x) {
    if (std::holds_alternative<MaxCutInstance>(p)) return maxcut_cost(std::get<MaxCutInstance>(p), x);
    return atsp_cost(std::get<AtspInstance>(p), x);
}

// The MaxCut lower bound is attainable (bipartite graphs), so it is shifted
// strictly below by delta to keep rescaled costs in (0,1]. The ATSP lower
// bound is already strictly below every tour.
inline CostModel make_cost_model(const ProblemInstance& p) {
    if (std::holds_alternative<MaxCutInstance>(p)) {
        auto [lo, hi] = maxcut_bounds(std::get<MaxCutInstance>(p));
        double delta = 1e-9 * (hi - lo);
        return CostModel(lo - delta, hi);
    }
    auto [lo, hi] = atsp_bounds(std::get<AtspInstance>(p));
    return CostModel(lo, hi);
}

// Ready-to-train handle: rescaling model plus the exact attainable cost
// extrema (for approximation ratios), with a full cost table cached at
// desk scale so hot loops avoid re-decoding.
struct Problem {
    ProblemInstance instance;
    std::string id;
    std::uint32_t n_qubits = 0;
    CostModel model;
    double c_min = 0.0, c_max = 0.0;
    std::vector<double> table;  // 2^N raw costs; empty above the cache cap

    double raw(const BitString& x) const {
        return table.empty() ? raw_cost(instance, x) : table[x.value];
    }
    double rescaled(const BitString& x) const { return model.rescale(raw(x)); }
    double ratio_of(double raw_c) const { return approximation_ratio(raw_c, c_min, c_max); }
};

inline Problem make_problem(ProblemInstance inst, std::string id, std::uint32_t table_cap = 22) {
    validate(inst);
    Problem p;
    p.n_qubits = qubits(inst);
    p.instance = std::move(inst);
    p.id = std::move(id);
    p.model = make_cost_model(p.instance);

    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    if (p.n_qubits <= table_cap) {
        p.table.resize(std::size_t{1} << p.n_qubits);
        for (std::size_t x = 0; x < p.table.size(); ++x) {
            p.table[x] = raw_cost(p.instance, BitString(p.n_qubits, x));
            lo = std::min(lo, p.table[x]);
            hi = std::max(hi, p.table[x]);
        }
    } else if (std::holds_alternative<AtspInstance>(p.instance)) {
        // Route space is smaller than bit space and covers the same costs.
        const auto& a = std::get<AtspInstance>(p.instance);
        std::vector<std::uint32_t> sigma(static_cast<std::size_t>(a.n - 1));
        for (std::size_t i = 0; i < sigma.size(); ++i) sigma[i] = static_cast<std::uint32_t>(i);
        std::uint32_t last = static_cast<std::uint32_t>(a.n - 1);
        do {
            double c = a.W[last][sigma.front()];
            for (std::size_t i = 0; i + 1 < sigma.size(); ++i) c += a.W[sigma[i]][sigma[i + 1]];
            c += a.W[sigma.back()][last];
            lo = std::min(lo, c);
            hi = std::max(hi, c);
        } while (std::next_permutation(sigma.begin(), sigma.end()));
    } else {
        for (std::size_t x = 0; x < (std::size_t{1} << p.n_qubits); ++x) {
            double c = raw_cost(p.instance, BitString(p.n_qubits, x));
            lo = std::min(lo, c);
            hi = std::max(hi, c);
        }
    }
    p.c_min = lo;
    p.c_max = hi;
    return p;
}

} // namespace fvqe
