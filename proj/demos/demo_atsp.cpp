// Runs the filtering sampler and simulated annealing on a seeded 6-city
// asymmetric tour instance and prints the decoded best routes.

#include <fvqe/fvqe.hpp>

#include <cstdio>
#include <string>

using namespace fvqe;

namespace {

// City n is the fixed tour start; the bit string indexes the visit order of
// the remaining cities.
std::string tour_of(const AtspInstance& inst, const std::string& bits) {
    std::vector<std::uint32_t> route = atsp_route(inst, BitString::parse(bits));
    std::string s = std::to_string(inst.n);
    for (std::uint32_t c : route) s += " -> " + std::to_string(c + 1);
    return s + " -> " + std::to_string(inst.n);
}

} // namespace

int main() {
    const std::uint64_t seed = 11;
    const std::uint64_t budget = 30000;

    AtspInstance inst = generate_atsp(6, derive_seed(seed, 0));
    Problem pr = make_problem(inst, "demo-route-7q");
    std::printf("instance: 6 cities, %u qubits for %llu routes\n", pr.n_qubits,
                static_cast<unsigned long long>(factorial(5)));
    std::printf("tour length range: best %.6f, worst %.6f\n", pr.c_min, pr.c_max);

    SpectrumReport rep = spectrum(pr);
    std::printf("fraction of bit strings that are optimal: %.4f\n\n", rep.fractions.back());

    RunOptions opt;
    opt.eval_budget = budget;
    Hyperparameters hp = make_hyperparameters(Preset::hp2, pr.n_qubits);
    RunTrace q = run_fvqe(pr, AnsatzKind::iqp, hp, derive_seed(seed, 1), opt);
    std::printf("filtering sampler: best ratio %.4f, length %.6f\n", q.best_ratio, q.best_cost);
    std::printf("  tour %s\n", tour_of(inst, q.best_bits).c_str());

    RunTrace s = sa_run(pr, {5.0, 0.1, budget}, derive_seed(seed, 2));
    std::printf("simulated annealing: best ratio %.4f, length %.6f\n", s.best_ratio, s.best_cost);
    std::printf("  tour %s\n", tour_of(inst, s.best_bits).c_str());

    RunTrace b = bfs_run(pr, budget, derive_seed(seed, 3));
    std::printf("random search: best ratio %.4f, length %.6f\n", b.best_ratio, b.best_cost);
    return 0;
}
