#include <catch2/catch_amalgamated.hpp>

#include <fvqe/engine.hpp>
#include <fvqe/instance_gen.hpp>

#include <cmath>
#include <functional>
#include <numbers>

using namespace fvqe;

namespace {

Problem triangle_problem() {
    return make_problem(MaxCutInstance{3, {{1, 2, 1.0}, {1, 3, 0.5}, {2, 3, 0.5}}}, "tri");
}

Problem small_maxcut(std::uint64_t seed, int n = 6) {
    return make_problem(generate_maxcut(n, seed), "mc");
}

std::vector<double> random_theta(const AnsatzSampler& a, std::uint64_t seed) {
    SeededRng rng(seed);
    std::vector<double> theta(a.parameter_count());
    for (auto& t : theta) t = (rng.uniform() - 0.5) * 2.0 * std::numbers::pi;
    return theta;
}

// Five-point central difference, O(h^4).
double finite_difference(const std::function<double(double)>& f, double x, double h) {
    return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h);
}

} // namespace

TEST_CASE("the inverse filter raises rescaled costs to the negative exponent") {
    CHECK(filter(0.5, 2.5) == Catch::Approx(5.65685424949238).epsilon(1e-12));
    CHECK(filter(1.0, 3.7) == 1.0);
    CHECK(filter(0.25, 0.5) == Catch::Approx(2.0));
    CHECK(filter(0.3, 0.0) == 1.0);
    CHECK(filter(0.3, -1.0) == Catch::Approx(0.3));  // VQE mode degenerates to the cost
    CHECK_THROWS_AS(filter(0.0, 2.0), std::domain_error);
    CHECK_THROWS_AS(filter(-0.1, 2.0), std::domain_error);
}

TEST_CASE("filter spec accepts positive strengths and the VQE sentinel only") {
    CHECK_NOTHROW(FilterSpec(2.5));
    CHECK(FilterSpec(-1.0).vqe_mode());
    CHECK_FALSE(FilterSpec(0.5).vqe_mode());
    CHECK_THROWS_AS(FilterSpec(0.0), std::invalid_argument);
    CHECK_THROWS_AS(FilterSpec(-2.0), std::invalid_argument);
}

TEST_CASE("filtering reweights a two-point distribution as the squared filter ratio") {
    std::vector<double> p{0.5, 0.5};
    std::vector<double> costs{0.5, 1.0};
    std::vector<double> out = exact_filtered_distribution(p, costs, 0.5);
    CHECK(out[0] == Catch::Approx(2.0 / 3.0));
    CHECK(out[1] == Catch::Approx(1.0 / 3.0));

    std::vector<double> same = exact_filtered_distribution(p, costs, 0.0);
    CHECK(same[0] == Catch::Approx(0.5));
    CHECK(same[1] == Catch::Approx(0.5));
}

TEST_CASE("filtering strictly increases the optimum's mass for positive strength") {
    Problem pr = triangle_problem();
    std::vector<double> costs = rescaled_cost_table(pr);
    std::vector<double> p(costs.size(), 1.0 / static_cast<double>(costs.size()));
    std::vector<double> f = exact_filtered_distribution(p, costs, 2.0);
    std::size_t opt = 0;
    for (std::size_t x = 1; x < costs.size(); ++x)
        if (costs[x] < costs[opt]) opt = x;
    CHECK(f[opt] > p[opt]);
    double total = 0.0;
    for (double v : f) total += v;
    CHECK(total == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("infidelity is zero on identical and one on disjoint distributions") {
    CHECK(loss_between({0.3, 0.7}, {0.3, 0.7}) == Catch::Approx(0.0).margin(1e-15));
    CHECK(loss_between({1.0, 0.0}, {0.0, 1.0}) == 1.0);
    CHECK(loss_between({1.0, 0.0}, {0.5, 0.5}) == Catch::Approx(0.5));
    CHECK_THROWS_AS(loss_between({1.0}, {0.5, 0.5}), std::invalid_argument);
}

TEST_CASE("analytic loss partials match finite differences for both ansatz kinds") {
    for (AnsatzKind kind : {AnsatzKind::iqp, AnsatzKind::classical}) {
        Problem pr = triangle_problem();
        AnsatzSampler a = AnsatzSampler::line(kind, pr.n_qubits);
        std::vector<double> costs = rescaled_cost_table(pr);
        const double tau = 1.8;
        for (std::uint64_t rep = 0; rep < 5; ++rep) {
            std::vector<double> theta = random_theta(a, 100 + rep);
            std::vector<double> prev = a.exact_distribution(theta);
            double pref = loss_gradient_prefactor(prev, costs, tau);
            for (std::size_t k = 0; k < a.parameter_count(); ++k) {
                double analytic = pref * exact_gradient(a, theta, k, pr, tau);
                auto f = [&](double t) {
                    std::vector<double> th = theta;
                    th[k] = t;
                    return loss(a, th, prev, pr, tau);
                };
                double fd = finite_difference(f, theta[k], 1e-3);
                CHECK(std::abs(fd - analytic) <= 1e-6 * (std::abs(analytic) + 1e-9));
            }
        }
    }
}

TEST_CASE("the sampled estimator is unbiased for the shifted-expectation difference") {
    Problem pr = triangle_problem();
    AnsatzSampler a = AnsatzSampler::line(AnsatzKind::iqp, pr.n_qubits);
    std::vector<double> theta = random_theta(a, 7);
    const double tau = 2.0;
    const std::size_t k = 1, shots = 8;

    double exact = exact_gradient(a, theta, k, pr, tau);
    double mean = 0.0, m2 = 0.0;
    const int reps = 4000;
    for (int r = 0; r < reps; ++r) {
        SeededRng rng(derive_seed(555, static_cast<std::uint64_t>(r)));
        double g = estimate_gradient_single_circuit(a, theta, k, shots, pr, tau, rng);
        double d = g - mean;
        mean += d / (r + 1);
        m2 += d * (g - mean);
    }
    double se = std::sqrt(m2 / (reps - 1.0) / reps);
    CHECK(std::abs(mean - exact) < 3.5 * se + 1e-12);
}

TEST_CASE("plus-shift samples pushed through the mask match the minus-shift circuit") {
    Problem pr = small_maxcut(4, 6);
    AnsatzSampler a = AnsatzSampler::line(AnsatzKind::iqp, pr.n_qubits);
    std::vector<double> theta = random_theta(a, 13);
    for (std::size_t k = 0; k < a.parameter_count(); ++k) {
        std::vector<double> tp = theta, tm = theta;
        tp[k] += std::numbers::pi / 2;
        tm[k] -= std::numbers::pi / 2;
        std::vector<double> pp = a.exact_distribution(tp);
        std::vector<double> pm = a.exact_distribution(tm);
        std::uint64_t m = a.mask(k).value;
        for (std::size_t x = 0; x < pp.size(); ++x)
            CHECK(std::abs(pm[x] - pp[x ^ m]) < 1e-10);
    }
}

TEST_CASE("normalized updates move exactly the learning rate") {
    std::vector<double> theta{1.0, 1.0};
    CHECK(apply_update(theta, {3.0, 4.0}, 1.0));
    CHECK(theta[0] == Catch::Approx(0.4));
    CHECK(theta[1] == Catch::Approx(0.2));

    std::vector<double> up{0.0};
    CHECK(apply_update(up, {2.0}, 0.5, true));
    CHECK(up[0] == Catch::Approx(0.5));

    std::vector<double> frozen{1.0, 2.0};
    CHECK_FALSE(apply_update(frozen, {0.0, 0.0}, 1.0));
    CHECK(frozen[0] == 1.0);
    CHECK(frozen[1] == 2.0);
    CHECK_THROWS_AS(apply_update(frozen, {1.0}, 1.0), std::invalid_argument);
}

TEST_CASE("preset schedules at thirteen qubits") {
    Hyperparameters hp2 = make_hyperparameters(Preset::hp2, 13);
    CHECK(hp2.shots == 225);
    CHECK(hp2.eta == Catch::Approx(0.25));
    CHECK(hp2.tau == Catch::Approx(2.5));
    CHECK(hp2.steps == 200);

    Hyperparameters hp1 = make_hyperparameters(Preset::hp1, 13);
    CHECK(hp1.shots == 225);
    CHECK(hp1.eta == Catch::Approx(0.32));
    CHECK(hp1.tau == Catch::Approx(2.3));

    Hyperparameters hp3 = make_hyperparameters(Preset::hp3, 13);
    CHECK(hp3.shots == 23);  // 22.5 rounds half away from zero
    CHECK(hp3.eta == Catch::Approx(0.32 / 1.5));
    CHECK(hp3.tau == Catch::Approx(0.46));

    Hyperparameters hp4 = make_hyperparameters(Preset::hp4, 13);
    CHECK(hp4.shots == 23);
    CHECK(hp4.eta == Catch::Approx(0.125));
    CHECK(hp4.tau == Catch::Approx(0.25));

    Hyperparameters vqe = make_vqe_hyperparameters(13);
    CHECK(vqe.shots == 225);
    CHECK(vqe.eta == Catch::Approx(0.35));
    CHECK(vqe.tau == -1.0);
}

TEST_CASE("preset formulas reject sizes where they degenerate") {
    CHECK_THROWS_AS(make_hyperparameters(Preset::hp1, 4), std::invalid_argument);
    CHECK_THROWS_AS(make_hyperparameters(Preset::hp1, 45), std::invalid_argument);
    CHECK_THROWS_AS(make_hyperparameters(Preset::hp3, 4), std::invalid_argument);
    CHECK_NOTHROW(make_hyperparameters(Preset::hp2, 5));
    CHECK_THROWS_AS(make_vqe_hyperparameters(4), std::invalid_argument);
}

TEST_CASE("uniform prefactor on equal costs is half the inverse filter value") {
    std::vector<double> dist{0.25, 0.25, 0.25, 0.25};
    std::vector<double> costs{0.5, 0.5, 0.5, 0.5};
    // E(f)/. (2 E(f^2)) = 1/(2 f) = c^tau / 2
    CHECK(loss_gradient_prefactor(dist, costs, 2.0) == Catch::Approx(0.125));
}

TEST_CASE("training consumes exactly the documented samples and evaluations") {
    Problem pr = triangle_problem();
    Hyperparameters hp{5, 0.3, 2.5, 3};
    Trainer t(pr, AnsatzKind::iqp, hp, 42);
    const std::uint64_t M = t.evals_per_step();
    AnsatzSampler a = AnsatzSampler::line(AnsatzKind::iqp, pr.n_qubits);
    CHECK(M == (2 * a.parameter_count() + 1) * 5);

    t.run();
    const TrainerState& st = t.state();
    CHECK(st.step == 3);
    CHECK(st.samples_consumed == 3 * (a.parameter_count() + 1) * 5);
    CHECK(st.evals_consumed == 3 * M);
    CHECK(st.has_best);
    CHECK(st.best_ratio >= 0.0);
}

TEST_CASE("the evaluation budget stops before a step would overshoot") {
    Problem pr = triangle_problem();
    Hyperparameters hp{5, 0.3, 2.5, 200};
    Trainer probe(pr, AnsatzKind::iqp, hp, 1);
    const std::uint64_t per_step = probe.evals_per_step();

    RunOptions opt;
    opt.eval_budget = per_step + per_step / 2;
    Trainer t(pr, AnsatzKind::iqp, hp, 1, opt);
    t.run();
    CHECK(t.state().step == 1);
    CHECK(t.state().evals_consumed == per_step);

    RunOptions tight;
    tight.eval_budget = per_step - 1;
    Trainer none(pr, AnsatzKind::iqp, hp, 1, tight);
    none.run();
    CHECK(none.state().step == 0);
    CHECK(none.state().evals_consumed == 0);
}

TEST_CASE("trace points are sorted with a non-decreasing best ratio") {
    Problem pr = small_maxcut(9, 6);
    Hyperparameters hp = make_hyperparameters(Preset::hp4, pr.n_qubits, 10);
    for (AnsatzKind kind : {AnsatzKind::iqp, AnsatzKind::classical}) {
        RunTrace tr = run_fvqe(pr, kind, hp, 77);
        REQUIRE(!tr.points.empty());
        for (std::size_t i = 1; i < tr.points.size(); ++i) {
            CHECK(tr.points[i].samples >= tr.points[i - 1].samples);
            CHECK(tr.points[i].evals >= tr.points[i - 1].evals);
            CHECK(tr.points[i].best_ratio >= tr.points[i - 1].best_ratio);
        }
        CHECK(tr.best_ratio == tr.points.back().best_ratio);
        CHECK(tr.algorithm == std::string("fvqe-") + ansatz_name(kind));
    }
}

TEST_CASE("filtering training improves the best candidate on a small instance") {
    Problem pr = small_maxcut(3, 6);
    Hyperparameters hp = make_hyperparameters(Preset::hp2, pr.n_qubits, 25);
    RunTrace tr = run_fvqe(pr, AnsatzKind::iqp, hp, 11);
    CHECK(tr.best_ratio >= 0.95);
}

TEST_CASE("VQE mode lowers the exact energy from the uniform start") {
    Problem pr = small_maxcut(8, 6);
    Hyperparameters hp = make_vqe_hyperparameters(pr.n_qubits, 30);
    std::vector<double> costs = rescaled_cost_table(pr);

    AnsatzSampler a = AnsatzSampler::line(AnsatzKind::iqp, pr.n_qubits);
    IqpCircuit c = build_line_circuit(pr.n_qubits, choose_layers(pr.n_qubits));
    double e0 = energy(a.exact_distribution(initial_parameters(c)), costs);

    Trainer t(pr, AnsatzKind::iqp, hp, 5);
    t.run();
    double e1 = energy(a.exact_distribution(t.state().theta), costs);
    CHECK(t.trace().algorithm == "vqe-iqp");
    CHECK(e1 < e0);
}

TEST_CASE("recorded partials equal the analytic loss derivative at the step start") {
    Problem pr = triangle_problem();
    Hyperparameters hp{50, 0.3, 1.5, 1};
    RunOptions opt;
    opt.record_partials = true;
    Trainer t(pr, AnsatzKind::iqp, hp, 21, opt);
    REQUIRE(t.step());
    REQUIRE(t.trace().steps.size() == 1);
    const StepRecord& rec = t.trace().steps[0];

    AnsatzSampler a = AnsatzSampler::line(AnsatzKind::iqp, pr.n_qubits);
    IqpCircuit c = build_line_circuit(pr.n_qubits, choose_layers(pr.n_qubits));
    std::vector<double> theta0 = initial_parameters(c);
    std::vector<double> costs = rescaled_cost_table(pr);
    double pref = loss_gradient_prefactor(a.exact_distribution(theta0), costs, hp.tau);
    REQUIRE(rec.partials.size() == a.parameter_count());
    for (std::size_t k = 0; k < rec.partials.size(); ++k)
        CHECK(rec.partials[k] ==
              Catch::Approx(pref * exact_gradient(a, theta0, k, pr, hp.tau)).margin(1e-12));
}

TEST_CASE("recorded success probabilities match the exact post-update distribution") {
    Problem pr = triangle_problem();
    Hyperparameters hp{30, 0.3, 2.0, 1};
    RunOptions opt;
    opt.record_success = true;
    Trainer t(pr, AnsatzKind::iqp, hp, 33, opt);
    REQUIRE(t.step());
    const StepRecord& rec = t.trace().steps[0];
    REQUIRE(rec.success.size() == kSuccessThresholds.size());

    AnsatzSampler a = AnsatzSampler::line(AnsatzKind::iqp, pr.n_qubits);
    std::vector<double> dist = a.exact_distribution(t.state().theta);
    for (std::size_t ti = 0; ti < kSuccessThresholds.size(); ++ti) {
        double expect = 0.0;
        for (std::size_t x = 0; x < dist.size(); ++x)
            if (pr.ratio_of(pr.raw(BitString(pr.n_qubits, x))) >= kSuccessThresholds[ti])
                expect += dist[x];
        CHECK(rec.success[ti] == Catch::Approx(expect).margin(1e-12));
    }
}

TEST_CASE("trainer rejects zero shots and invalid filters") {
    Problem pr = triangle_problem();
    CHECK_THROWS_AS(Trainer(pr, AnsatzKind::iqp, Hyperparameters{0, 0.3, 2.5, 5}, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(Trainer(pr, AnsatzKind::iqp, Hyperparameters{5, 0.3, 0.0, 5}, 1),
                    std::invalid_argument);
}

TEST_CASE("identical seeds and configs reproduce identical runs") {
    Problem pr = small_maxcut(6, 6);
    Hyperparameters hp = make_hyperparameters(Preset::hp4, pr.n_qubits, 8);
    RunTrace a = run_fvqe(pr, AnsatzKind::iqp, hp, 31);
    RunTrace b = run_fvqe(pr, AnsatzKind::iqp, hp, 31);
    RunTrace c = run_fvqe(pr, AnsatzKind::iqp, hp, 32);
    CHECK(trace_to_string(a) == trace_to_string(b));
    CHECK(trace_to_string(a) != trace_to_string(c));
}
