// Trains the filtering sampler on a seeded 13-qubit weighted cut instance
// and races unbiased random search on the same evaluation budget.

#include <fvqe/fvqe.hpp>

#include <cstdio>

using namespace fvqe;

int main() {
    const std::uint64_t seed = 7;
    const std::uint64_t budget = 200000;

    Problem pr = make_problem(generate_maxcut(14, derive_seed(seed, 0)), "demo-cut-13q");
    std::printf("instance: 3-regular graph, 14 vertices, 13 qubits\n");
    std::printf("cost range: best %.6f, worst %.6f\n\n", pr.c_min, pr.c_max);

    Hyperparameters hp = make_hyperparameters(Preset::hp2, pr.n_qubits);
    std::printf("filtering run: %zu shots per circuit, eta %.2f, tau %.2f, budget %llu evals\n",
                hp.shots, hp.eta, hp.tau, static_cast<unsigned long long>(budget));

    RunOptions opt;
    opt.eval_budget = budget;
    Trainer trainer(pr, AnsatzKind::iqp, hp, derive_seed(seed, 1), opt);
    while (trainer.step()) {
        const TrainerState& st = trainer.state();
        std::printf("  step %2llu: %7llu evals, best ratio %.4f\n",
                    static_cast<unsigned long long>(st.step),
                    static_cast<unsigned long long>(st.evals_consumed), st.best_ratio);
    }
    const RunTrace& t = trainer.trace();
    std::printf("filtering best: ratio %.4f, cut value %.6f\n\n", t.best_ratio, -t.best_cost);

    RunTrace b = bfs_run(pr, budget, derive_seed(seed, 2));
    std::printf("random search: %llu evals, best ratio %.4f\n",
                static_cast<unsigned long long>(b.points.back().evals), b.best_ratio);

    for (double thr : kSuccessThresholds) {
        auto hq = first_success(t, thr);
        auto hb = first_success(b, thr);
        std::printf("first evals to ratio %.2f: filtering %s, random %s\n", thr,
                    hq ? std::to_string(*hq).c_str() : "never",
                    hb ? std::to_string(*hb).c_str() : "never");
    }
    return 0;
}
