#pragma once

// Run traces shared by every algorithm: cumulative shot and cost-evaluation
// counters with the best-so-far approximation ratio, optional exact per-step
// records, canonical JSON serialization, and FNV-1a content hashing for
// idempotent batch runs.

#include <array>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace fvqe {

// Cost evaluations are the cross-algorithm effort axis; shot counts are kept
// alongside because quantum runs evaluate two candidates per gradient shot.
struct TracePoint {
    std::uint64_t samples = 0;
    std::uint64_t evals = 0;
    double best_ratio = 0.0;
};

inline constexpr std::array<double, 3> kSuccessThresholds{0.9, 0.95, 1.0};

struct StepRecord {
    std::uint64_t step = 0;            // 1-based training step
    std::vector<double> partials;      // exact loss partials at the pre-update point
    std::vector<double> success;       // P(ratio >= thr) of the post-update state,
                                       // aligned with kSuccessThresholds
};

struct RunTrace {
    std::string algorithm;             // fvqe-iqp, fvqe-classical, vqe-iqp, vqe-classical, bfs, sa
    std::string instance_id;
    std::uint64_t seed = 0;
    std::string config_digest;         // hex hash of the batch config; empty for ad-hoc runs
    std::vector<TracePoint> points;    // appended on improvement and at step ends
    std::string best_bits;
    double best_cost = 0.0;
    double best_ratio = -1.0;          // -1 until the first evaluation
    std::uint64_t stalls = 0;          // zero-gradient steps that skipped the update
    std::vector<StepRecord> steps;     // present only when exact recording is on
};

inline std::uint64_t fnv1a(const void* data, std::size_t len,
                           std::uint64_t h = 0xcbf29ce484222325ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::uint64_t fnv1a(const std::string& s) { return fnv1a(s.data(), s.size()); }

inline std::string hex_digest(std::uint64_t h) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[h & 0xf];
        h >>= 4;
    }
    return out;
}

inline nlohmann::json trace_to_json(const RunTrace& t) {
    nlohmann::json j;
    j["schema"] = "trace-v1";
    j["algorithm"] = t.algorithm;
    j["instance"] = t.instance_id;
    j["seed"] = t.seed;
    if (!t.config_digest.empty()) j["config_digest"] = t.config_digest;
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : t.points) pts.push_back({p.samples, p.evals, p.best_ratio});
    j["points"] = std::move(pts);
    j["best"] = {{"bits", t.best_bits}, {"cost", t.best_cost}, {"ratio", t.best_ratio}};
    j["stalls"] = t.stalls;
    if (!t.steps.empty()) {
        nlohmann::json steps = nlohmann::json::array();
        for (const auto& s : t.steps) {
            nlohmann::json rec;
            rec["step"] = s.step;
            if (!s.partials.empty()) rec["partials"] = s.partials;
            if (!s.success.empty()) rec["success"] = s.success;
            steps.push_back(std::move(rec));
        }
        j["steps"] = std::move(steps);
    }
    return j;
}

inline RunTrace trace_from_json(const nlohmann::json& j) {
    if (j.value("schema", "") != "trace-v1") throw std::runtime_error("trace: unknown schema");
    RunTrace t;
    t.algorithm = j.at("algorithm").get<std::string>();
    t.instance_id = j.at("instance").get<std::string>();
    t.seed = j.at("seed").get<std::uint64_t>();
    t.config_digest = j.value("config_digest", "");
    for (const auto& p : j.at("points"))
        t.points.push_back({p.at(0).get<std::uint64_t>(), p.at(1).get<std::uint64_t>(),
                            p.at(2).get<double>()});
    t.best_bits = j.at("best").at("bits").get<std::string>();
    t.best_cost = j.at("best").at("cost").get<double>();
    t.best_ratio = j.at("best").at("ratio").get<double>();
    t.stalls = j.at("stalls").get<std::uint64_t>();
    if (j.contains("steps"))
        for (const auto& rec : j.at("steps")) {
            StepRecord s;
            s.step = rec.at("step").get<std::uint64_t>();
            if (rec.contains("partials")) s.partials = rec.at("partials").get<std::vector<double>>();
            if (rec.contains("success")) s.success = rec.at("success").get<std::vector<double>>();
            t.steps.push_back(std::move(s));
        }
    return t;
}

// Serialized form is canonical: sorted keys, fixed indentation, LF endings,
// shortest round-trip floats. Identical runs produce identical bytes.
inline std::string trace_to_string(const RunTrace& t) { return trace_to_json(t).dump(1) + "\n"; }

inline void write_trace(const std::string& path, const RunTrace& t) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_trace: cannot open " + path);
    f << trace_to_string(t);
}

inline RunTrace read_trace(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("read_trace: cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return trace_from_json(nlohmann::json::parse(ss.str()));
}

} // namespace fvqe
