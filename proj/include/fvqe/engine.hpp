#pragma once

// Filtering-VQE training core: inverse filter, infidelity loss, the
// single-circuit parameter-shift gradient estimator, exact gradients for
// analysis, normalized updates, hyperparameter presets, and the step driver.
// tau = -1 selects VQE mode: the filter degenerates to the cost itself and
// the shifted-expectation difference points along -2 d<C>/dtheta, so the
// normalized update ascends that vector instead of descending it.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "fvqe/classical.hpp"
#include "fvqe/encodings.hpp"
#include "fvqe/iqp.hpp"
#include "fvqe/statevector.hpp"
#include "fvqe/trace.hpp"

namespace fvqe {

// ---- filtering ----

struct FilterSpec {
    double tau = 2.5;

    explicit FilterSpec(double t) : tau(t) {
        if (!(t > 0.0) && t != -1.0)
            throw std::invalid_argument("FilterSpec: tau must be > 0, or -1 for VQE mode");
    }
    bool vqe_mode() const { return tau == -1.0; }
};

// Inverse filter c^{-tau} on rescaled costs; tau = -1 returns c itself.
inline double filter(double c, double tau) {
    if (!(c > 0.0)) throw std::domain_error("filter: rescaled cost must be positive");
    return std::pow(c, -tau);
}

// P^f(x) = f^2(c(x)) P(x) / E_P(f^2).
inline std::vector<double> exact_filtered_distribution(const std::vector<double>& p,
                                                       const std::vector<double>& rescaled_costs,
                                                       double tau) {
    if (p.size() != rescaled_costs.size())
        throw std::invalid_argument("exact_filtered_distribution: size mismatch");
    std::vector<double> out(p.size());
    double z = 0.0;
    for (std::size_t x = 0; x < p.size(); ++x) {
        double f = filter(rescaled_costs[x], tau);
        out[x] = f * f * p[x];
        z += out[x];
    }
    if (!(z > 0.0)) throw std::domain_error("exact_filtered_distribution: zero mass");
    for (auto& v : out) v /= z;
    return out;
}

// Infidelity between two distributions: 1 - (sum_x sqrt(p q))^2.
inline double loss_between(const std::vector<double>& p, const std::vector<double>& q) {
    if (p.size() != q.size()) throw std::invalid_argument("loss_between: size mismatch");
    double bc = 0.0;
    for (std::size_t x = 0; x < p.size(); ++x) bc += std::sqrt(p[x] * q[x]);
    return 1.0 - bc * bc;
}

// ---- ansatz handle ----

enum class AnsatzKind { iqp, classical };

inline const char* ansatz_name(AnsatzKind k) {
    return k == AnsatzKind::iqp ? "iqp" : "classical";
}

// One circuit structure drives both ansaetze: the quantum state applies the
// generators as rotations, the classical one as bit-flip channels on the
// same masks.
struct AnsatzSampler {
    AnsatzKind kind = AnsatzKind::iqp;
    IqpCircuit circuit;

    static AnsatzSampler line(AnsatzKind k, std::uint32_t n_qubits) {
        return {k, build_line_circuit(n_qubits, choose_layers(n_qubits))};
    }

    std::size_t parameter_count() const { return circuit.generators.size(); }
    std::uint32_t qubits() const { return circuit.n_qubits; }
    const BitString& mask(std::size_t k) const { return circuit.generators.at(k).mask; }

    StateVector state(const std::vector<double>& theta) const {
        if (kind != AnsatzKind::iqp) throw std::logic_error("state: classical ansatz has none");
        IqpCircuit c = circuit;
        c.set_parameters(theta);
        return apply_generators(c);
    }

    std::vector<double> exact_distribution(const std::vector<double>& theta) const {
        if (kind == AnsatzKind::iqp) return state(theta).probabilities();
        ClassicalAnsatz a = ClassicalAnsatz::from_circuit(circuit);
        a.set_parameters(theta);
        return exact_classical_distribution(a);
    }

    std::vector<BitString> draw(const std::vector<double>& theta, std::size_t shots,
                                SeededRng& rng) const {
        if (kind == AnsatzKind::iqp) return state(theta).sample(rng, shots);
        ClassicalAnsatz a = ClassicalAnsatz::from_circuit(circuit);
        a.set_parameters(theta);
        return sample_classical(a, shots, rng);
    }
};

// ---- loss and gradients ----

inline std::vector<double> rescaled_cost_table(const Problem& pr) {
    if (pr.n_qubits > 22) throw std::invalid_argument("rescaled_cost_table: needs small N");
    std::vector<double> c(std::size_t{1} << pr.n_qubits);
    for (std::size_t x = 0; x < c.size(); ++x)
        c[x] = pr.model.rescale(pr.raw(BitString(pr.n_qubits, x)));
    return c;
}

// Training loss at theta toward the filtered previous distribution.
inline double loss(const AnsatzSampler& a, const std::vector<double>& theta,
                   const std::vector<double>& prev_dist, const Problem& pr, double tau) {
    std::vector<double> costs = rescaled_cost_table(pr);
    return loss_between(a.exact_distribution(theta),
                        exact_filtered_distribution(prev_dist, costs, tau));
}

// Energy <c> of a distribution over rescaled costs (the VQE objective).
inline double energy(const std::vector<double>& dist, const std::vector<double>& rescaled_costs) {
    double e = 0.0;
    for (std::size_t x = 0; x < dist.size(); ++x) e += dist[x] * rescaled_costs[x];
    return e;
}

namespace detail {

// From the exact +pi/2-shifted distribution of parameter k, expectations of
// the filter under both shifted circuits: the -shift is the XOR-q_k
// pushforward of the +shift, so one distribution serves both.
inline std::pair<double, double> shifted_filter_expectations(const std::vector<double>& dist_plus,
                                                             std::uint64_t mask,
                                                             const std::vector<double>& costs,
                                                             double tau) {
    double e_plus = 0.0, e_minus = 0.0;
    for (std::size_t x = 0; x < dist_plus.size(); ++x) {
        e_plus += dist_plus[x] * filter(costs[x], tau);
        e_minus += dist_plus[x] * filter(costs[x ^ mask], tau);
    }
    return {e_plus, e_minus};
}

} // namespace detail

// E_{-k}(f) - E_{+k}(f) from exact shifted distributions; the quantity whose
// sampled estimate drives the update (true loss partial up to a positive
// constant).
inline double exact_gradient(const AnsatzSampler& a, const std::vector<double>& theta,
                             std::size_t k, const Problem& pr, double tau) {
    std::vector<double> shifted = theta;
    shifted.at(k) += std::numbers::pi / 2;
    std::vector<double> costs = rescaled_cost_table(pr);
    auto [e_plus, e_minus] = detail::shifted_filter_expectations(
        a.exact_distribution(shifted), a.mask(k).value, costs, tau);
    return e_minus - e_plus;
}

// Positive constant relating the shifted-expectation difference to the true
// loss partial: E(f) / (2 E(f^2)) at the unshifted point. The one-half comes
// from the parameter-shift rule.
inline double loss_gradient_prefactor(const std::vector<double>& dist,
                                      const std::vector<double>& rescaled_costs, double tau) {
    double ef = 0.0, ef2 = 0.0;
    for (std::size_t x = 0; x < dist.size(); ++x) {
        double f = filter(rescaled_costs[x], tau);
        ef += dist[x] * f;
        ef2 += dist[x] * f * f;
    }
    return ef / (2.0 * ef2);
}

// Sampled estimator: s shots from the +shifted circuit only; each shot x
// contributes f(c(x ^ q_k)) - f(c(x)).
inline double estimate_gradient_single_circuit(const AnsatzSampler& a,
                                               const std::vector<double>& theta, std::size_t k,
                                               std::size_t shots, const Problem& pr, double tau,
                                               SeededRng& rng) {
    if (shots == 0) throw std::invalid_argument("estimate_gradient_single_circuit: zero shots");
    std::vector<double> shifted = theta;
    shifted.at(k) += std::numbers::pi / 2;
    const std::uint64_t mask = a.mask(k).value;
    double acc = 0.0;
    for (const auto& x : a.draw(shifted, shots, rng)) {
        BitString y(x.width, x.value ^ mask);
        acc += filter(pr.rescaled(y), tau) - filter(pr.rescaled(x), tau);
    }
    return acc / static_cast<double>(shots);
}

// Normalized step theta -> theta -+ eta g/|g|. Returns false (and leaves
// theta untouched) on a zero gradient so the caller can log the stall.
inline bool apply_update(std::vector<double>& theta, const std::vector<double>& g, double eta,
                         bool ascend = false) {
    if (theta.size() != g.size()) throw std::invalid_argument("apply_update: size mismatch");
    double norm2 = 0.0;
    for (double v : g) norm2 += v * v;
    if (norm2 == 0.0) return false;
    double scale = eta / std::sqrt(norm2) * (ascend ? 1.0 : -1.0);
    for (std::size_t k = 0; k < theta.size(); ++k) theta[k] += scale * g[k];
    return true;
}

// ---- hyperparameters ----

struct Hyperparameters {
    std::size_t shots = 0;
    double eta = 0.0;
    double tau = 0.0;
    std::size_t steps = 200;
};

enum class Preset { hp1, hp2, hp3, hp4 };

inline const char* preset_name(Preset p) {
    switch (p) {
        case Preset::hp1: return "hp1";
        case Preset::hp2: return "hp2";
        case Preset::hp3: return "hp3";
        case Preset::hp4: return "hp4";
    }
    throw std::logic_error("preset_name");
}

inline constexpr Preset kDefaultPreset = Preset::hp2;

// Size-dependent schedules; non-integer shot formulas round to nearest.
inline Hyperparameters make_hyperparameters(Preset p, std::uint32_t n_qubits,
                                            std::size_t steps = 200) {
    double nd = n_qubits;
    long wide = std::lround(25.0 * nd - 100.0);
    long narrow = std::lround(2.5 * nd - 10.0);
    Hyperparameters hp;
    hp.steps = steps;
    switch (p) {
        case Preset::hp1: hp = {static_cast<std::size_t>(wide), 0.45 - 0.01 * nd, 1.0 + 0.1 * nd, steps}; break;
        case Preset::hp2: hp = {static_cast<std::size_t>(wide), 0.25, 2.5, steps}; break;
        case Preset::hp3: hp = {static_cast<std::size_t>(narrow), (0.45 - 0.01 * nd) / 1.5, (1.0 + 0.1 * nd) / 5.0, steps}; break;
        case Preset::hp4: hp = {static_cast<std::size_t>(narrow), 0.125, 0.25, steps}; break;
    }
    long s = (p == Preset::hp1 || p == Preset::hp2) ? wide : narrow;
    if (s < 1) throw std::invalid_argument("make_hyperparameters: shot formula nonpositive at this size");
    if (!(hp.eta > 0.0)) throw std::invalid_argument("make_hyperparameters: learning rate nonpositive at this size");
    return hp;
}

// VQE mode keeps the wide shot count and uses its own learning rate.
inline Hyperparameters make_vqe_hyperparameters(std::uint32_t n_qubits, std::size_t steps = 200) {
    long wide = std::lround(25.0 * n_qubits - 100.0);
    if (wide < 1) throw std::invalid_argument("make_vqe_hyperparameters: shot formula nonpositive");
    return {static_cast<std::size_t>(wide), 0.35, -1.0, steps};
}

// ---- training driver ----

struct RunOptions {
    std::uint64_t eval_budget = 0;  // 0: unlimited; else stop before a step would exceed it
    bool record_partials = false;   // exact loss partials per step (small N only)
    bool record_success = false;    // exact threshold probabilities per step (small N only)
};

struct TrainerState {
    std::vector<double> theta;
    std::uint64_t step = 0;
    AnsatzKind kind = AnsatzKind::iqp;
    std::uint64_t samples_consumed = 0;
    std::uint64_t evals_consumed = 0;
    std::uint64_t stalls = 0;
    bool has_best = false;
    BitString best{1, 0};
    double best_cost = 0.0;
    double best_ratio = -1.0;
};

class Trainer {
public:
    Trainer(const Problem& pr, AnsatzKind kind, const Hyperparameters& hp, std::uint64_t seed,
            const RunOptions& opt = {})
        : pr_(&pr),
          ansatz_(AnsatzSampler::line(kind, pr.n_qubits)),
          hp_(hp),
          opt_(opt),
          filter_(FilterSpec(hp.tau)),
          rng_(seed) {
        if (hp_.shots == 0) throw std::invalid_argument("Trainer: zero shots");
        st_.kind = kind;
        st_.theta = initial_parameters(ansatz_.circuit);
        if (opt_.record_partials || opt_.record_success) costs_ = rescaled_cost_table(pr);
        trace_.algorithm = std::string(filter_.vqe_mode() ? "vqe-" : "fvqe-") + ansatz_name(kind);
        trace_.instance_id = pr.id;
        trace_.seed = seed;
    }

    const TrainerState& state() const { return st_; }
    const RunTrace& trace() const { return trace_; }
    RunTrace take_trace() && { return std::move(trace_); }

    std::uint64_t evals_per_step() const {
        return (2 * ansatz_.parameter_count() + 1) * static_cast<std::uint64_t>(hp_.shots);
    }

    // One training step: M gradient circuits at the current point, the
    // normalized update, then s shots from the updated state. Returns false
    // without consuming anything if the step budget or count is exhausted.
    bool step() {
        if (st_.step >= hp_.steps) return false;
        if (opt_.eval_budget != 0 && st_.evals_consumed + evals_per_step() > opt_.eval_budget)
            return false;

        const std::size_t M = ansatz_.parameter_count();
        const std::size_t s = hp_.shots;
        const double tau = hp_.tau;
        StepRecord rec;
        rec.step = st_.step + 1;

        StateVector base(1);
        bool quantum = ansatz_.kind == AnsatzKind::iqp;
        if (quantum) base = ansatz_.state(st_.theta);
        if (opt_.record_partials && !filter_.vqe_mode()) {
            std::vector<double> dist0 =
                quantum ? base.probabilities() : ansatz_.exact_distribution(st_.theta);
            prefactor_ = loss_gradient_prefactor(dist0, costs_, tau);
        }

        std::vector<double> g(M, 0.0);
        for (std::size_t k = 0; k < M; ++k) {
            const std::uint64_t mask = ansatz_.mask(k).value;
            std::vector<BitString> shots;
            StateVector shifted_state(1);
            if (quantum) {
                shifted_state = base;
                shifted_state.apply_generator(mask, std::numbers::pi / 2);
                shots = shifted_state.sample(rng_, s);
            } else {
                std::vector<double> shifted = st_.theta;
                shifted[k] += std::numbers::pi / 2;
                shots = ansatz_.draw(shifted, s, rng_);
            }
            double acc = 0.0;
            for (const auto& x : shots) {
                st_.samples_consumed += 1;
                BitString y(x.width, x.value ^ mask);
                double raw_x = pr_->raw(x), raw_y = pr_->raw(y);
                st_.evals_consumed += 1;
                see(x, raw_x);
                st_.evals_consumed += 1;
                see(y, raw_y);
                acc += filter(pr_->model.rescale(raw_y), tau) -
                       filter(pr_->model.rescale(raw_x), tau);
            }
            g[k] = acc / static_cast<double>(s);

            if (opt_.record_partials) {
                std::vector<double> dist_plus;
                if (quantum) {
                    dist_plus = shifted_state.probabilities();
                } else {
                    std::vector<double> shifted = st_.theta;
                    shifted[k] += std::numbers::pi / 2;
                    dist_plus = ansatz_.exact_distribution(shifted);
                }
                auto [e_plus, e_minus] =
                    detail::shifted_filter_expectations(dist_plus, mask, costs_, tau);
                double partial = filter_.vqe_mode() ? 0.5 * (e_plus - e_minus)
                                                    : prefactor_ * (e_minus - e_plus);
                rec.partials.push_back(partial);
            }
        }

        if (!apply_update(st_.theta, g, hp_.eta, filter_.vqe_mode())) {
            ++st_.stalls;
            ++trace_.stalls;
        }
        ++st_.step;

        for (const auto& x : ansatz_.draw(st_.theta, s, rng_)) {
            st_.samples_consumed += 1;
            st_.evals_consumed += 1;
            see(x, pr_->raw(x));
        }

        if (opt_.record_success) {
            std::vector<double> dist = ansatz_.exact_distribution(st_.theta);
            rec.success.assign(kSuccessThresholds.size(), 0.0);
            for (std::size_t x = 0; x < dist.size(); ++x) {
                double a = pr_->ratio_of(pr_->raw(BitString(pr_->n_qubits, x)));
                for (std::size_t t = 0; t < kSuccessThresholds.size(); ++t)
                    if (a >= kSuccessThresholds[t]) rec.success[t] += dist[x];
            }
        }
        if (opt_.record_partials || opt_.record_success) trace_.steps.push_back(std::move(rec));

        trace_.points.push_back({st_.samples_consumed, st_.evals_consumed, st_.best_ratio});
        return true;
    }

    void run() {
        while (step()) {}
    }

private:
    void see(const BitString& x, double raw_c) {
        double a = pr_->ratio_of(raw_c);
        if (!st_.has_best || a > st_.best_ratio) {
            st_.has_best = true;
            st_.best = x;
            st_.best_cost = raw_c;
            st_.best_ratio = a;
            trace_.best_bits = x.to_string();
            trace_.best_cost = raw_c;
            trace_.best_ratio = a;
            trace_.points.push_back({st_.samples_consumed, st_.evals_consumed, a});
        }
    }

    const Problem* pr_;
    AnsatzSampler ansatz_;
    Hyperparameters hp_;
    RunOptions opt_;
    FilterSpec filter_;
    SeededRng rng_;
    TrainerState st_;
    RunTrace trace_;
    std::vector<double> costs_;
    double prefactor_ = 0.0;
};

inline RunTrace run_fvqe(const Problem& pr, AnsatzKind kind, const Hyperparameters& hp,
                         std::uint64_t seed, const RunOptions& opt = {}) {
    Trainer t(pr, kind, hp, seed, opt);
    t.run();
    return std::move(t).take_trace();
}

} // namespace fvqe
