#pragma once

// Experiment harness: idempotent batch runs with a manifest, fraction-solved
// curves and success tables on the cost-evaluation axis, cumulative-success
// accounting from exact per-step records, pooled gradient statistics with
// exponential and polynomial decay fits, and byte-stable CSV emission.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "fvqe/baselines.hpp"
#include "fvqe/encodings.hpp"
#include "fvqe/engine.hpp"
#include "fvqe/trace.hpp"

namespace fvqe {

// ---- analysis ----

struct CurvePoint {
    std::uint64_t evals = 0;
    double fraction = 0.0;
};
using Curve = std::vector<CurvePoint>;

// First evaluation count at which a trace's best ratio reached the
// threshold; improvement points make this exact.
inline std::optional<std::uint64_t> first_success(const RunTrace& t, double threshold) {
    for (const auto& p : t.points)
        if (p.best_ratio >= threshold) return p.evals;
    return std::nullopt;
}

// Right-continuous step function: fraction of traces whose best ratio
// reached the threshold, against cost evaluations.
inline Curve fraction_solved_curve(const std::vector<RunTrace>& traces, double threshold) {
    if (traces.empty()) return {};
    std::vector<std::uint64_t> hits;
    std::uint64_t horizon = 0;
    for (const auto& t : traces) {
        if (auto h = first_success(t, threshold)) hits.push_back(*h);
        if (!t.points.empty()) horizon = std::max(horizon, t.points.back().evals);
    }
    std::sort(hits.begin(), hits.end());
    Curve curve;
    for (std::size_t i = 0; i < hits.size(); ++i) {
        double frac = static_cast<double>(i + 1) / static_cast<double>(traces.size());
        if (!curve.empty() && curve.back().evals == hits[i])
            curve.back().fraction = frac;
        else
            curve.push_back({hits[i], frac});
    }
    if (curve.empty() || curve.back().evals < horizon)
        curve.push_back({horizon, curve.empty() ? 0.0 : curve.back().fraction});
    return curve;
}

// Fraction of the curve at a given evaluation count.
inline double curve_value_at(const Curve& c, std::uint64_t evals) {
    double v = 0.0;
    for (const auto& p : c) {
        if (p.evals > evals) break;
        v = p.fraction;
    }
    return v;
}

struct SuccessEntry {
    double threshold = 0.0;
    double fraction = 0.0;
    bool reached = false;
    std::uint64_t evals = 0;  // earliest evaluations achieving the fraction
};

struct SuccessTable {
    std::vector<SuccessEntry> entries;  // threshold-major, fraction-minor
};

inline SuccessTable success_table(const std::vector<RunTrace>& traces,
                                  const std::vector<double>& thresholds = {0.9, 0.95, 1.0},
                                  const std::vector<double>& fractions = {0.3, 0.6, 0.9}) {
    SuccessTable table;
    for (double thr : thresholds) {
        Curve c = fraction_solved_curve(traces, thr);
        for (double frac : fractions) {
            SuccessEntry e{thr, frac, false, 0};
            for (const auto& p : c)
                if (p.fraction >= frac) {
                    e.reached = true;
                    e.evals = p.evals;
                    break;
                }
            table.entries.push_back(e);
        }
    }
    return table;
}

// Smallest cumulative sample count at which the probability of having drawn
// at least one success exceeds the target: 1 - prod_t (1-p_t)^{s_t}.
inline std::optional<std::uint64_t> cumulative_success_samples(
    const std::vector<std::pair<double, std::uint64_t>>& steps, double target = 0.95) {
    if (!(target > 0.0) || !(target < 1.0))
        throw std::invalid_argument("cumulative_success_samples: target must be in (0,1)");
    const double goal = std::log1p(-target);  // log(1-target)
    double acc = 0.0;
    std::uint64_t samples = 0;
    for (const auto& [p, s] : steps) {
        if (p < 0.0 || p > 1.0) throw std::invalid_argument("cumulative_success_samples: bad p");
        samples += s;
        if (p >= 1.0) {
            if (s > 0) return samples;
            continue;
        }
        acc += static_cast<double>(s) * std::log1p(-p);
        if (acc < goal) return samples;
    }
    return std::nullopt;
}

// ---- gradient statistics ----

// Linear interpolation quantile on sorted data (the common type-7 rule).
inline double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) throw std::invalid_argument("quantile_sorted: empty data");
    if (q <= 0.0) return sorted.front();
    if (q >= 1.0) return sorted.back();
    double h = static_cast<double>(sorted.size() - 1) * q;
    std::size_t lo = static_cast<std::size_t>(h);
    double w = h - static_cast<double>(lo);
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + w * (sorted[lo + 1] - sorted[lo]);
}

struct BoxStats {
    double min = 0, q25 = 0, median = 0, q75 = 0, max = 0;
    std::uint64_t outliers = 0;  // outside 1.5 IQR around the quartile box
};

inline BoxStats box_stats(std::vector<double> data) {
    std::sort(data.begin(), data.end());
    BoxStats b;
    b.min = data.front();
    b.max = data.back();
    b.q25 = quantile_sorted(data, 0.25);
    b.median = quantile_sorted(data, 0.5);
    b.q75 = quantile_sorted(data, 0.75);
    double iqr = b.q75 - b.q25;
    double lo = b.q25 - 1.5 * iqr, hi = b.q75 + 1.5 * iqr;
    for (double v : data)
        if (v < lo || v > hi) ++b.outliers;
    return b;
}

struct FitResult {
    double a = 0.0, b = 0.0, r2 = 0.0;
};

namespace detail {

// Least squares y = c0 + c1 x with coefficient of determination.
inline FitResult linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw std::domain_error("linear_fit: degenerate abscissae");
    double c1 = (n * sxy - sx * sy) / denom;
    double c0 = (sy - c1 * sx) / n;
    double mean = sy / n, ss_tot = 0, ss_res = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double r = y[i] - (c0 + c1 * x[i]);
        ss_res += r * r;
        double d = y[i] - mean;
        ss_tot += d * d;
    }
    FitResult f;
    f.a = c0;  // carries the intercept; callers re-interpret
    f.b = c1;
    f.r2 = ss_tot == 0.0 ? (ss_res == 0.0 ? 1.0 : 0.0) : 1.0 - ss_res / ss_tot;
    return f;
}

} // namespace detail

struct GradientStats {
    std::vector<std::uint32_t> sizes;
    std::vector<BoxStats> boxes;     // pooled |partial| per size
    std::vector<double> medians;
    bool has_fits = false;
    FitResult exponential;  // median ~ a * b^N, fitted on log medians
    FitResult polynomial;   // median ~ a * N^b, fitted on log-log medians
};

// Pools absolute loss partials per size and fits both decay models to the
// medians; fewer than 3 sizes skips the fits.
inline GradientStats gradient_statistics(
    const std::vector<std::pair<std::uint32_t, std::vector<double>>>& pooled) {
    GradientStats g;
    for (const auto& [n, values] : pooled) {
        if (values.empty()) throw std::invalid_argument("gradient_statistics: empty pool");
        std::vector<double> abs_values;
        abs_values.reserve(values.size());
        for (double v : values) abs_values.push_back(std::fabs(v));
        g.sizes.push_back(n);
        g.boxes.push_back(box_stats(abs_values));
        g.medians.push_back(g.boxes.back().median);
    }
    if (g.sizes.size() >= 3) {
        std::vector<double> ns, log_ns, log_ms;
        for (std::size_t i = 0; i < g.sizes.size(); ++i) {
            if (!(g.medians[i] > 0.0))
                throw std::domain_error("gradient_statistics: nonpositive median");
            ns.push_back(static_cast<double>(g.sizes[i]));
            log_ns.push_back(std::log(static_cast<double>(g.sizes[i])));
            log_ms.push_back(std::log(g.medians[i]));
        }
        FitResult e = detail::linear_fit(ns, log_ms);
        g.exponential = {std::exp(e.a), std::exp(e.b), e.r2};
        FitResult p = detail::linear_fit(log_ns, log_ms);
        g.polynomial = {std::exp(p.a), p.b, p.r2};
        g.has_fits = true;
    }
    return g;
}

// ---- CSV ----

// Shortest round-trip decimal form; locale-independent.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline void write_csv(const std::string& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_csv: cannot open " + path);
    for (std::size_t i = 0; i < header.size(); ++i) f << (i ? "," : "") << header[i];
    f << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) f << (i ? "," : "") << row[i];
        f << "\n";
    }
}

inline std::vector<std::vector<std::string>> parse_csv(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("parse_csv: cannot open " + path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(f, line)) {
        std::vector<std::string> row;
        std::string cell;
        std::stringstream ss(line);
        while (std::getline(ss, cell, ',')) row.push_back(cell);
        if (!line.empty() && line.back() == ',') row.push_back("");
        rows.push_back(std::move(row));
    }
    return rows;
}

inline void emit_curves_csv(const std::string& path,
                            const std::vector<std::tuple<std::string, std::uint32_t, double, Curve>>&
                                labeled_curves) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& [alg, n, thr, curve] : labeled_curves)
        for (const auto& p : curve)
            rows.push_back({alg, std::to_string(n), format_double(thr), std::to_string(p.evals),
                            format_double(p.fraction)});
    write_csv(path, {"algorithm", "qubits", "threshold", "evals", "fraction"}, rows);
}

inline void emit_success_csv(const std::string& path,
                             const std::vector<std::tuple<std::string, std::uint32_t, SuccessTable>>&
                                 tables) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& [alg, n, table] : tables)
        for (const auto& e : table.entries)
            rows.push_back({alg, std::to_string(n), format_double(e.threshold),
                            format_double(e.fraction),
                            e.reached ? std::to_string(e.evals) : std::string{}});
    write_csv(path, {"algorithm", "qubits", "threshold", "fraction", "evals"}, rows);
}

inline void emit_gradient_csv(const std::string& box_path, const std::string& fit_path,
                              const GradientStats& g) {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < g.sizes.size(); ++i) {
        const auto& b = g.boxes[i];
        rows.push_back({std::to_string(g.sizes[i]), format_double(b.min), format_double(b.q25),
                        format_double(b.median), format_double(b.q75), format_double(b.max),
                        std::to_string(b.outliers)});
    }
    write_csv(box_path, {"qubits", "min", "q25", "median", "q75", "max", "outliers"}, rows);

    std::vector<std::vector<std::string>> fit_rows;
    if (g.has_fits) {
        fit_rows.push_back({"exponential", format_double(g.exponential.a),
                            format_double(g.exponential.b), format_double(g.exponential.r2)});
        fit_rows.push_back({"polynomial", format_double(g.polynomial.a),
                            format_double(g.polynomial.b), format_double(g.polynomial.r2)});
    }
    write_csv(fit_path, {"model", "a", "b", "r2"}, fit_rows);
}

inline void emit_spectrum_csv(const std::string& path, const SpectrumReport& rep) {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < rep.thresholds.size(); ++i)
        rows.push_back({format_double(rep.thresholds[i]), format_double(rep.fractions[i]),
                        format_double(rep.reference)});
    write_csv(path, {"threshold", "fraction", "reference"}, rows);
}

// ---- batch running ----

struct BatchJob {
    std::string label;      // file stem, unique within the batch
    std::string algorithm;  // fvqe-iqp | fvqe-classical | vqe-iqp | vqe-classical | bfs | sa
    Problem problem;
    std::uint64_t seed = 0;
    Hyperparameters hp;          // fvqe-*/vqe-* only
    std::uint64_t budget = 0;    // evaluation cap (bfs/sa: total budget)
    double sa_t_init = 5.0;
    double sa_t_final = 0.1;
    RunOptions options;
};

inline std::string job_digest(const BatchJob& j) {
    std::string s = j.algorithm + "|" + j.problem.id + "|" + std::to_string(j.seed) + "|" +
                    std::to_string(j.hp.shots) + "|" + format_double(j.hp.eta) + "|" +
                    format_double(j.hp.tau) + "|" + std::to_string(j.hp.steps) + "|" +
                    std::to_string(j.budget) + "|" + format_double(j.sa_t_init) + "|" +
                    format_double(j.sa_t_final) + "|" +
                    std::to_string(j.options.record_partials) + "|" +
                    std::to_string(j.options.record_success);
    return hex_digest(fnv1a(s));
}

inline RunTrace execute_job(const BatchJob& j) {
    RunTrace t;
    if (j.algorithm == "bfs") {
        t = bfs_run(j.problem, j.budget, j.seed);
    } else if (j.algorithm == "sa") {
        t = sa_run(j.problem, {j.sa_t_init, j.sa_t_final, j.budget}, j.seed);
    } else if (j.algorithm == "fvqe-iqp" || j.algorithm == "vqe-iqp") {
        RunOptions opt = j.options;
        opt.eval_budget = j.budget;
        t = run_fvqe(j.problem, AnsatzKind::iqp, j.hp, j.seed, opt);
    } else if (j.algorithm == "fvqe-classical" || j.algorithm == "vqe-classical") {
        RunOptions opt = j.options;
        opt.eval_budget = j.budget;
        t = run_fvqe(j.problem, AnsatzKind::classical, j.hp, j.seed, opt);
    } else {
        throw std::invalid_argument("execute_job: unknown algorithm " + j.algorithm);
    }
    if (t.algorithm != j.algorithm)
        throw std::logic_error("execute_job: algorithm/mode mismatch for " + j.label);
    t.config_digest = job_digest(j);
    return t;
}

struct ManifestEntry {
    std::string label;
    std::string file;
    std::string digest;
    std::string status;  // ok | cached | failed
    std::string error;
};

struct Manifest {
    std::vector<ManifestEntry> entries;  // sorted by label

    bool all_ok() const {
        for (const auto& e : entries)
            if (e.status == "failed") return false;
        return true;
    }
};

inline void write_manifest(const std::string& path, const Manifest& m) {
    nlohmann::json runs = nlohmann::json::array();
    for (const auto& e : m.entries) {
        nlohmann::json r{{"label", e.label}, {"file", e.file}, {"digest", e.digest},
                         {"status", e.status}};
        if (!e.error.empty()) r["error"] = e.error;
        runs.push_back(std::move(r));
    }
    nlohmann::json j{{"schema", "manifest-v1"}, {"runs", std::move(runs)}};
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_manifest: cannot open " + path);
    f << j.dump(1) << "\n";
}

// Runs jobs into out_dir, one trace file per job. A job whose trace file
// already exists with a matching config digest is skipped; failures are
// isolated and recorded. Workers only parallelize across jobs.
inline Manifest run_batch(const std::vector<BatchJob>& jobs, const std::string& out_dir,
                          unsigned workers = 1) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    std::vector<ManifestEntry> entries(jobs.size());

    auto run_one = [&](std::size_t i) {
        const BatchJob& j = jobs[i];
        ManifestEntry e;
        e.label = j.label;
        e.file = j.label + ".json";
        e.digest = job_digest(j);
        std::string path = (fs::path(out_dir) / e.file).string();
        try {
            if (fs::exists(path)) {
                RunTrace old = read_trace(path);
                if (old.config_digest == e.digest) {
                    e.status = "cached";
                    entries[i] = std::move(e);
                    return;
                }
            }
            write_trace(path, execute_job(j));
            e.status = "ok";
        } catch (const std::exception& ex) {
            e.status = "failed";
            e.error = ex.what();
        }
        entries[i] = std::move(e);
    };

    if (workers <= 1) {
        for (std::size_t i = 0; i < jobs.size(); ++i) run_one(i);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= jobs.size()) return;
                run_one(i);
            }
        };
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    Manifest m;
    m.entries = std::move(entries);
    std::sort(m.entries.begin(), m.entries.end(),
              [](const ManifestEntry& a, const ManifestEntry& b) { return a.label < b.label; });
    return m;
}

} // namespace fvqe
