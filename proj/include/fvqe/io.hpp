#pragma once

// JSON file formats: problem instances with 1-based labels, and the circuit
// debug dump (mask pattern, angle, originating layer per generator).

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "fvqe/encodings.hpp"
#include "fvqe/iqp.hpp"

namespace fvqe {

inline nlohmann::json instance_to_json(const ProblemInstance& p) {
    nlohmann::json j;
    if (std::holds_alternative<MaxCutInstance>(p)) {
        const auto& m = std::get<MaxCutInstance>(p);
        j["type"] = "maxcut";
        j["n"] = m.n;
        nlohmann::json edges = nlohmann::json::array();
        for (const auto& e : m.edges) edges.push_back({e.u, e.v, e.w});
        j["edges"] = std::move(edges);
    } else {
        const auto& a = std::get<AtspInstance>(p);
        j["type"] = "atsp";
        j["n"] = a.n;
        j["W"] = a.W;
    }
    return j;
}

inline ProblemInstance instance_from_json(const nlohmann::json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "maxcut") {
        MaxCutInstance m;
        m.n = j.at("n").get<int>();
        for (const auto& e : j.at("edges"))
            m.edges.push_back({e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<double>()});
        validate(m);
        return m;
    }
    if (type == "atsp") {
        AtspInstance a;
        a.n = j.at("n").get<int>();
        a.W = j.at("W").get<std::vector<std::vector<double>>>();
        validate(a);
        return a;
    }
    throw std::runtime_error("instance: unknown type '" + type + "'");
}

inline void write_instance(const std::string& path, const ProblemInstance& p) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_instance: cannot open " + path);
    f << instance_to_json(p).dump(1) << "\n";
}

inline ProblemInstance read_instance(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("read_instance: cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return instance_from_json(nlohmann::json::parse(ss.str()));
}

inline nlohmann::json circuit_to_json(const IqpCircuit& c) {
    nlohmann::json gens = nlohmann::json::array();
    for (const auto& g : c.generators)
        gens.push_back({{"mask", g.mask.to_string()}, {"theta", g.theta}, {"layer", g.layer}});
    return {{"qubits", c.n_qubits}, {"layers", c.layers}, {"generators", std::move(gens)}};
}

} // namespace fvqe
