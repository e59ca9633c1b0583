// Command-line front end: seeded instance generation, batched optimization
// runs with an idempotent manifest, trace analysis into CSV, exhaustive
// solution spectra, and pooled gradient-decay statistics.

#include <CLI11.hpp>
#include <json.hpp>

#include <fvqe/fvqe.hpp>

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace {

using namespace fvqe;
namespace fs = std::filesystem;

// Qubit counts are the user-facing size axis. Cut instances on n vertices
// use n-1 qubits (3-regularity needs even n), route instances the smallest
// register holding (n-1)! indices.
int vertices_for(const std::string& problem, std::uint32_t n_qubits) {
    if (problem == "maxcut") {
        if (n_qubits < 3 || n_qubits % 2 == 0)
            throw std::runtime_error(
                "maxcut sizes are odd qubit counts >= 3 (instances use N+1 vertices)");
        return static_cast<int>(n_qubits) + 1;
    }
    for (int n = 4; n <= 13; ++n) {
        AtspInstance a;
        a.n = n;
        if (a.qubits() == n_qubits) return n;
    }
    throw std::runtime_error("no city count in 4..13 encodes to " + std::to_string(n_qubits) +
                             " qubits (valid sizes: 3 5 7 10 13 16 19 22 26 29)");
}

std::string instance_label(const std::string& problem, std::uint32_t n_qubits,
                           std::uint64_t base_seed, std::uint64_t index) {
    return problem + "-" + std::to_string(n_qubits) + "q-s" + std::to_string(base_seed) + "-" +
           std::to_string(index);
}

std::uint64_t instance_seed(std::uint64_t base_seed, const std::string& problem,
                            std::uint32_t n_qubits, std::uint64_t index) {
    return derive_seed(base_seed, fnv1a(problem + "|" + std::to_string(n_qubits) + "|" +
                                        std::to_string(index)));
}

ProblemInstance make_instance(const std::string& problem, std::uint32_t n_qubits,
                              std::uint64_t seed) {
    int n = vertices_for(problem, n_qubits);
    if (problem == "maxcut") return generate_maxcut(n, seed);
    return generate_atsp(n, seed);
}

Problem make_labeled_problem(const std::string& problem, std::uint32_t n_qubits,
                             std::uint64_t base_seed, std::uint64_t index) {
    std::string label = instance_label(problem, n_qubits, base_seed, index);
    return make_problem(make_instance(problem, n_qubits,
                                      instance_seed(base_seed, problem, n_qubits, index)),
                        label);
}

Preset parse_preset(const std::string& name) {
    if (name == "hp1") return Preset::hp1;
    if (name == "hp2") return Preset::hp2;
    if (name == "hp3") return Preset::hp3;
    if (name == "hp4") return Preset::hp4;
    throw std::runtime_error("unknown preset " + name);
}

// "<N>q" token of an instance label, e.g. maxcut-13q-s7-0 -> 13.
std::optional<std::uint32_t> qubits_from_id(const std::string& id) {
    std::stringstream ss(id);
    std::string tok;
    while (std::getline(ss, tok, '-')) {
        if (tok.size() < 2 || tok.back() != 'q') continue;
        bool digits = true;
        for (std::size_t i = 0; i + 1 < tok.size(); ++i)
            digits = digits && std::isdigit(static_cast<unsigned char>(tok[i]));
        if (digits) return static_cast<std::uint32_t>(std::stoul(tok.substr(0, tok.size() - 1)));
    }
    return std::nullopt;
}

int cmd_generate(const std::string& problem, const std::vector<std::uint32_t>& sizes,
                 std::uint64_t count, std::uint64_t seed, const std::string& out_dir) {
    fs::create_directories(out_dir);
    for (std::uint32_t n_qubits : sizes)
        for (std::uint64_t i = 0; i < count; ++i) {
            std::string label = instance_label(problem, n_qubits, seed, i);
            std::uint64_t s = instance_seed(seed, problem, n_qubits, i);
            Problem pr = make_problem(make_instance(problem, n_qubits, s), label);
            write_instance((fs::path(out_dir) / (label + ".json")).string(), pr.instance);

            nlohmann::json params = problem == "maxcut"
                                        ? nlohmann::json{{"regular", 3}, {"weights", "uniform(0,1]"}}
                                        : nlohmann::json{{"costs", "uniform(0,1]"}};
            nlohmann::json meta{{"schema", "instance-meta-v1"}, {"label", label},
                                {"type", problem},   {"seed", s},
                                {"n", vertices_for(problem, n_qubits)}, {"qubits", n_qubits},
                                {"c_min", pr.c_min}, {"c_max", pr.c_max},
                                {"params", std::move(params)}};
            std::ofstream f(fs::path(out_dir) / (label + ".meta.json"), std::ios::binary);
            if (!f) throw std::runtime_error("cannot write meta for " + label);
            f << meta.dump(1) << "\n";
            std::printf("wrote %s.json (%u qubits, c_min %.6f, c_max %.6f)\n", label.c_str(),
                        n_qubits, pr.c_min, pr.c_max);
        }
    return 0;
}

int cmd_run(const std::string& problem, const std::vector<std::uint32_t>& sizes,
            std::uint64_t count, std::uint64_t seed, const std::vector<std::string>& algorithms,
            const std::string& ansatz, const std::string& preset, std::size_t steps,
            std::uint64_t budget, unsigned workers, const std::string& out_dir) {
    Preset p = parse_preset(preset);
    std::vector<BatchJob> jobs;
    for (std::uint32_t n_qubits : sizes) {
        for (std::uint64_t i = 0; i < count; ++i) {
            Problem pr = make_labeled_problem(problem, n_qubits, seed, i);
            for (const std::string& alg : algorithms) {
                std::string full = alg;
                BatchJob j;
                if (alg == "fvqe" || alg == "vqe") {
                    full = alg + "-" + ansatz;
                    j.hp = alg == "fvqe" ? make_hyperparameters(p, n_qubits, steps)
                                         : make_vqe_hyperparameters(n_qubits, steps);
                } else if (alg == "bfs" || alg == "sa") {
                    if (budget == 0)
                        throw std::runtime_error("--budget is required for " + alg + " runs");
                } else {
                    throw std::runtime_error("unknown algorithm " + alg +
                                             " (use fvqe, vqe, bfs, sa)");
                }
                j.label = full + "-" + pr.id;
                j.algorithm = full;
                j.problem = pr;
                j.seed = derive_seed(seed, fnv1a(full + "|" + pr.id));
                j.budget = budget;
                jobs.push_back(std::move(j));
            }
        }
    }

    Manifest m = run_batch(jobs, out_dir, workers);
    write_manifest((fs::path(out_dir) / "manifest.json").string(), m);
    std::size_t ok = 0, cached = 0, failed = 0;
    for (const auto& e : m.entries) {
        if (e.status == "ok") ++ok;
        if (e.status == "cached") ++cached;
        if (e.status == "failed") {
            ++failed;
            std::fprintf(stderr, "failed: %s: %s\n", e.label.c_str(), e.error.c_str());
        }
    }
    std::printf("%zu runs: %zu new, %zu cached, %zu failed; manifest in %s\n", m.entries.size(),
                ok, cached, failed, out_dir.c_str());
    return m.all_ok() ? 0 : 1;
}

int cmd_analyze(const std::string& out_dir) {
    std::map<std::pair<std::string, std::uint32_t>, std::vector<RunTrace>> groups;
    for (const auto& entry : fs::directory_iterator(out_dir)) {
        if (entry.path().extension() != ".json") continue;
        RunTrace t;
        try {
            t = read_trace(entry.path().string());
        } catch (const std::exception&) {
            continue;  // manifests, instances and metadata are not traces
        }
        auto n = qubits_from_id(t.instance_id);
        if (!n) continue;
        groups[{t.algorithm, *n}].push_back(std::move(t));
    }
    if (groups.empty()) {
        std::fprintf(stderr, "analyze: no trace files with sized instance labels in %s\n",
                     out_dir.c_str());
        return 1;
    }

    std::vector<std::tuple<std::string, std::uint32_t, double, Curve>> curves;
    std::vector<std::tuple<std::string, std::uint32_t, SuccessTable>> tables;
    for (const auto& [key, traces] : groups) {
        std::printf("%s at %u qubits: %zu runs", key.first.c_str(), key.second, traces.size());
        for (double thr : kSuccessThresholds) {
            Curve c = fraction_solved_curve(traces, thr);
            std::printf(", solved@%g %.2f", thr, c.empty() ? 0.0 : c.back().fraction);
            curves.emplace_back(key.first, key.second, thr, std::move(c));
        }
        std::printf("\n");
        tables.emplace_back(key.first, key.second, success_table(traces));
    }
    emit_curves_csv((fs::path(out_dir) / "curves.csv").string(), curves);
    emit_success_csv((fs::path(out_dir) / "success.csv").string(), tables);
    std::printf("wrote curves.csv and success.csv to %s\n", out_dir.c_str());
    return 0;
}

int cmd_spectrum(const std::string& problem, const std::vector<std::uint32_t>& sizes,
                 std::uint64_t count, std::uint64_t seed, const std::string& out_dir) {
    fs::create_directories(out_dir);
    for (std::uint32_t n_qubits : sizes)
        for (std::uint64_t i = 0; i < count; ++i) {
            Problem pr = make_labeled_problem(problem, n_qubits, seed, i);
            SpectrumReport rep = spectrum(pr);
            std::string path = (fs::path(out_dir) / ("spectrum-" + pr.id + ".csv")).string();
            emit_spectrum_csv(path, rep);
            std::printf("%s: optimum fraction %.3g, single-solution reference %.3g\n",
                        pr.id.c_str(), rep.fractions.back(), rep.reference);
        }
    return 0;
}

int cmd_grads(const std::string& problem, const std::vector<std::uint32_t>& sizes,
              std::uint64_t count, std::uint64_t seed, const std::string& preset,
              const std::string& ansatz, std::size_t steps, const std::string& out_dir) {
    Preset p = parse_preset(preset);
    AnsatzKind kind = ansatz == "classical" ? AnsatzKind::classical : AnsatzKind::iqp;
    std::vector<std::uint32_t> ordered = sizes;
    std::sort(ordered.begin(), ordered.end());
    std::vector<std::pair<std::uint32_t, std::vector<double>>> pooled;
    for (std::uint32_t n_qubits : ordered) {
        if (n_qubits > 22)
            throw std::runtime_error("exact loss partials need at most 22 qubits");
        std::vector<double> values;
        for (std::uint64_t i = 0; i < count; ++i) {
            Problem pr = make_labeled_problem(problem, n_qubits, seed, i);
            RunOptions opt;
            opt.record_partials = true;
            RunTrace t = run_fvqe(pr, kind, make_hyperparameters(p, n_qubits, steps),
                                  derive_seed(seed, fnv1a("grads|" + pr.id)), opt);
            for (const auto& s : t.steps)
                values.insert(values.end(), s.partials.begin(), s.partials.end());
        }
        pooled.push_back({n_qubits, std::move(values)});
    }

    GradientStats g = gradient_statistics(pooled);
    fs::create_directories(out_dir);
    emit_gradient_csv((fs::path(out_dir) / "gradient-boxes.csv").string(),
                      (fs::path(out_dir) / "gradient-fits.csv").string(), g);
    for (std::size_t i = 0; i < g.sizes.size(); ++i)
        std::printf("%u qubits: median |partial| %.3e over %llu instances\n", g.sizes[i],
                    g.medians[i], static_cast<unsigned long long>(count));
    if (g.has_fits) {
        std::printf("exponential fit a=%.4g b=%.4g r2=%.6f\n", g.exponential.a, g.exponential.b,
                    g.exponential.r2);
        std::printf("polynomial  fit a=%.4g b=%.4g r2=%.6f\n", g.polynomial.a, g.polynomial.b,
                    g.polynomial.r2);
        std::printf("%s decay fits the pooled medians better\n",
                    g.exponential.r2 >= g.polynomial.r2 ? "exponential" : "polynomial");
    } else {
        std::printf("fits need at least 3 sizes; only boxes were written\n");
    }
    std::printf("wrote gradient-boxes.csv and gradient-fits.csv to %s\n", out_dir.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"filtering-VQE workbench: generate instances, run seeded sweeps, analyze traces"};
    app.require_subcommand(1);

    std::string problem = "maxcut", ansatz = "iqp", preset = "hp2", out_dir;
    std::vector<std::uint32_t> sizes;
    std::vector<std::string> algorithms{"fvqe"};
    std::uint64_t seed = 1, count = 20, budget = 0;
    std::size_t steps = 200;
    unsigned workers = 1;

    auto add_common = [&](CLI::App* cmd, bool with_count) {
        cmd->add_option("--problem", problem, "maxcut or atsp")
            ->check(CLI::IsMember({"maxcut", "atsp"}));
        cmd->add_option("--sizes", sizes, "qubit counts")->delimiter(',')->required();
        cmd->add_option("--seed", seed, "base seed for all derivations");
        cmd->add_option("--out-dir", out_dir, "output directory")->required();
        if (with_count) cmd->add_option("--count", count, "instances per size");
    };

    auto* gen = app.add_subcommand("generate", "write seeded instances with bound metadata");
    add_common(gen, true);

    auto* run = app.add_subcommand("run", "execute a batch of seeded optimization runs");
    add_common(run, true);
    run->add_option("--algorithm", algorithms, "fvqe, vqe, bfs, sa (repeatable)")->delimiter(',');
    run->add_option("--ansatz", ansatz, "iqp or classical")
        ->check(CLI::IsMember({"iqp", "classical"}));
    run->add_option("--preset", preset, "hp1..hp4")->check(CLI::IsMember({"hp1", "hp2", "hp3", "hp4"}));
    run->add_option("--steps", steps, "training steps");
    run->add_option("--budget", budget, "cost-evaluation cap (required for bfs/sa)");
    run->add_option("--jobs", workers, "worker threads");

    auto* ana = app.add_subcommand("analyze", "summarize trace files into CSV");
    ana->add_option("--out-dir", out_dir, "directory holding trace files")->required();

    auto* spec = app.add_subcommand("spectrum", "exhaustive approximation-ratio spectra");
    add_common(spec, true);

    auto* grads = app.add_subcommand("grads", "pooled loss-partial statistics and decay fits");
    add_common(grads, true);
    grads->add_option("--preset", preset, "hp1..hp4")
        ->check(CLI::IsMember({"hp1", "hp2", "hp3", "hp4"}));
    grads->add_option("--ansatz", ansatz, "iqp or classical")
        ->check(CLI::IsMember({"iqp", "classical"}));
    grads->add_option("--steps", steps, "training steps per run");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_generate(problem, sizes, count, seed, out_dir);
        if (run->parsed())
            return cmd_run(problem, sizes, count, seed, algorithms, ansatz, preset, steps, budget,
                           workers, out_dir);
        if (ana->parsed()) return cmd_analyze(out_dir);
        if (spec->parsed()) return cmd_spectrum(problem, sizes, count, seed, out_dir);
        if (grads->parsed()) {
            if (!grads->count("--steps")) steps = 10;
            return cmd_grads(problem, sizes, count, seed, preset, ansatz, steps, out_dir);
        }
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return 1;
    }
    return 2;
}
