#pragma once

// Classical baselines sharing the RunTrace format: brute-force uniform
// search without repetition, and Metropolis simulated annealing on the
// rescaled cost with a geometric temperature schedule. One proposal is one
// cost evaluation, keeping effort accounting comparable across algorithms.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "fvqe/core.hpp"
#include "fvqe/encodings.hpp"
#include "fvqe/trace.hpp"

namespace fvqe {

namespace detail {

struct BestTracker {
    const Problem* pr;
    RunTrace* trace;
    double best_ratio = -1.0;

    void see(const BitString& x, double raw_c, std::uint64_t draws) {
        double a = pr->ratio_of(raw_c);
        if (a > best_ratio) {
            best_ratio = a;
            trace->best_bits = x.to_string();
            trace->best_cost = raw_c;
            trace->best_ratio = a;
            trace->points.push_back({draws, draws, a});
        }
    }
};

} // namespace detail

// Uniform draws without repetition; budgets beyond 2^N truncate at
// exhaustion. Desk-scale sizes walk a lazily shuffled index table so each
// draw costs exactly one RNG call; larger registers fall back to rejection.
inline RunTrace bfs_run(const Problem& pr, std::uint64_t budget, std::uint64_t seed) {
    RunTrace trace;
    trace.algorithm = "bfs";
    trace.instance_id = pr.id;
    trace.seed = seed;
    SeededRng rng(seed);
    detail::BestTracker best{&pr, &trace};

    const std::uint64_t space = std::uint64_t{1} << pr.n_qubits;
    const std::uint64_t total = budget < space ? budget : space;
    std::uint64_t draws = 0;
    if (pr.n_qubits <= 22) {
        std::vector<std::uint64_t> pool(space);
        for (std::uint64_t i = 0; i < space; ++i) pool[i] = i;
        for (std::uint64_t i = 0; i < total; ++i) {
            std::uint64_t j = i + rng.below(space - i);
            std::swap(pool[i], pool[j]);
            BitString x(pr.n_qubits, pool[i]);
            ++draws;
            best.see(x, pr.raw(x), draws);
        }
    } else {
        std::unordered_set<std::uint64_t> seen;
        while (draws < total) {
            std::uint64_t v = rng.below(space);
            if (!seen.insert(v).second) continue;
            BitString x(pr.n_qubits, v);
            ++draws;
            best.see(x, pr.raw(x), draws);
        }
    }
    if (trace.points.empty() || trace.points.back().evals != draws)
        trace.points.push_back({draws, draws, best.best_ratio});
    return trace;
}

struct SaConfig {
    double t_init = 5.0;
    double t_final = 0.1;        // chosen from {1, 0.1, 0.01, 0.001}
    std::uint64_t budget = 0;    // total cost evaluations, including the initial one
};

// Accept a move with rescaled cost increase delta at temperature t.
inline bool metropolis_accept(double delta, double t, SeededRng& rng) {
    if (delta <= 0.0) return true;
    return rng.uniform() < std::exp(-delta / t);
}

namespace detail {

// Neighbor proposal. MaxCut flips one random bit; the travel problem swaps a
// random adjacent pair in the decoded route and re-encodes, so proposals
// stay inside valid permutations and the fixed last city never moves.
inline BitString sa_neighbor(const Problem& pr, const BitString& x, SeededRng& rng) {
    if (std::holds_alternative<MaxCutInstance>(pr.instance)) {
        std::uint32_t q = static_cast<std::uint32_t>(rng.below(pr.n_qubits));
        return BitString(x.width, x.value ^ (std::uint64_t{1} << (x.width - 1 - q)));
    }
    const auto& inst = std::get<AtspInstance>(pr.instance);
    std::vector<std::uint32_t> sigma = atsp_route(inst, x);
    std::size_t j = static_cast<std::size_t>(rng.below(sigma.size() - 1));
    std::swap(sigma[j], sigma[j + 1]);
    return BitString(x.width, lehmer_encode(sigma));
}

} // namespace detail

inline RunTrace sa_run(const Problem& pr, const SaConfig& cfg, std::uint64_t seed) {
    if (cfg.budget == 0) throw std::invalid_argument("sa_run: zero budget");
    if (!(cfg.t_init > 0.0) || !(cfg.t_final > 0.0) || cfg.t_final > cfg.t_init)
        throw std::invalid_argument("sa_run: need t_init >= t_final > 0");
    RunTrace trace;
    trace.algorithm = "sa";
    trace.instance_id = pr.id;
    trace.seed = seed;
    SeededRng rng(seed);
    detail::BestTracker best{&pr, &trace};

    BitString cur(pr.n_qubits, rng.below(std::uint64_t{1} << pr.n_qubits));
    double cur_raw = pr.raw(cur);
    double cur_c = pr.model.rescale(cur_raw);
    std::uint64_t evals = 1;
    best.see(cur, cur_raw, evals);

    const double ratio = cfg.t_final / cfg.t_init;
    const double denom = cfg.budget > 1 ? static_cast<double>(cfg.budget - 1) : 1.0;
    while (evals < cfg.budget) {
        double t = cfg.t_init * std::pow(ratio, static_cast<double>(evals) / denom);
        BitString cand = detail::sa_neighbor(pr, cur, rng);
        double cand_raw = pr.raw(cand);
        double cand_c = pr.model.rescale(cand_raw);
        ++evals;
        best.see(cand, cand_raw, evals);
        if (metropolis_accept(cand_c - cur_c, t, rng)) {
            cur = cand;
            cur_raw = cand_raw;
            cur_c = cand_c;
        }
    }
    if (trace.points.back().evals != evals)
        trace.points.push_back({evals, evals, best.best_ratio});
    return trace;
}

// Runs every candidate final temperature over the problem set and returns
// the one solving the most instances optimally; ties go to the larger
// temperature (candidates are tried in descending order).
inline double select_final_temperature(const std::vector<Problem>& problems, std::uint64_t budget,
                                       std::uint64_t seed,
                                       std::vector<double> candidates = {1.0, 0.1, 0.01, 0.001}) {
    if (problems.empty()) throw std::invalid_argument("select_final_temperature: empty set");
    std::sort(candidates.begin(), candidates.end(), std::greater<>());
    double best_t = candidates.front();
    std::size_t best_solved = 0;
    for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
        std::size_t solved = 0;
        for (std::size_t i = 0; i < problems.size(); ++i) {
            SaConfig cfg{5.0, candidates[ci], budget};
            RunTrace t = sa_run(problems[i], cfg, derive_seed(seed, ci * problems.size() + i));
            if (t.best_ratio >= 1.0 - 1e-12) ++solved;
        }
        if (solved > best_solved) {
            best_solved = solved;
            best_t = candidates[ci];
        }
    }
    return best_t;
}

} // namespace fvqe
