#include <catch2/catch_amalgamated.hpp>

#include <fvqe/classical.hpp>

#include <algorithm>
#include <numbers>
#include <random>

using namespace fvqe;

namespace {

std::vector<double> random_angles(std::size_t count, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::vector<double> theta(count);
    for (auto& t : theta)
        t = (static_cast<double>(gen() >> 11) * 0x1.0p-53 - 0.5) * 2.0 * std::numbers::pi;
    return theta;
}

} // namespace

TEST_CASE("channels mirror the circuit's masks and order") {
    IqpCircuit c = build_line_circuit(4, 3);
    ClassicalAnsatz a = ClassicalAnsatz::from_circuit(c);
    REQUIRE(a.parameter_count() == c.parameter_count());
    CHECK(a.n_bits == 4);
    for (std::size_t k = 0; k < a.channels.size(); ++k)
        CHECK(a.channels[k].mask == c.generators[k].mask);
}

TEST_CASE("a single channel splits mass by sin squared of half the angle") {
    ClassicalAnsatz a{3, {{BitString::parse("101"), 0.0, 1}}};
    a.set_parameters({1.1});
    std::vector<double> p = exact_classical_distribution(a);
    double s = std::sin(0.55) * std::sin(0.55);
    CHECK(p[0b000] == Catch::Approx(1.0 - s));
    CHECK(p[0b101] == Catch::Approx(s));
    CHECK(p[0b001] == 0.0);
    CHECK(p[0b111] == 0.0);
}

TEST_CASE("an angle of pi flips its mask with certainty and zero never flips") {
    ClassicalAnsatz a{2, {{BitString::parse("11"), std::numbers::pi, 1},
                          {BitString::parse("10"), 0.0, 1}}};
    std::vector<double> p = exact_classical_distribution(a);
    CHECK(p[0b11] == Catch::Approx(1.0));
    SeededRng rng(3);
    for (const auto& x : sample_classical(a, 50, rng)) CHECK(x == BitString::parse("11"));
}

TEST_CASE("channel application order does not change the distribution") {
    IqpCircuit c = build_line_circuit(4, 3);
    ClassicalAnsatz a = ClassicalAnsatz::from_circuit(c);
    a.set_parameters(random_angles(a.parameter_count(), 17));
    std::vector<double> p = exact_classical_distribution(a);

    ClassicalAnsatz shuffled = a;
    std::mt19937_64 gen(5);
    std::shuffle(shuffled.channels.begin(), shuffled.channels.end(), gen);
    std::vector<double> q = exact_classical_distribution(shuffled);
    for (std::size_t x = 0; x < p.size(); ++x) CHECK(std::abs(p[x] - q[x]) < 1e-12);
}

TEST_CASE("the distribution normalizes and sampling converges to it") {
    IqpCircuit c = build_line_circuit(3, 2);
    ClassicalAnsatz a = ClassicalAnsatz::from_circuit(c);
    a.set_parameters(random_angles(a.parameter_count(), 23));
    std::vector<double> p = exact_classical_distribution(a);
    double total = 0.0;
    for (double v : p) total += v;
    CHECK(total == Catch::Approx(1.0).epsilon(1e-12));

    SeededRng rng(99);
    std::vector<double> freq(p.size(), 0.0);
    const std::size_t shots = 200000;
    for (const auto& x : sample_classical(a, shots, rng))
        freq[x.value] += 1.0 / static_cast<double>(shots);
    for (std::size_t x = 0; x < p.size(); ++x) CHECK(std::abs(freq[x] - p[x]) < 0.01);
}

TEST_CASE("shifting a channel by pi over two then flipping its mask equals the negative shift") {
    IqpCircuit c = build_line_circuit(4, 3);
    ClassicalAnsatz base = ClassicalAnsatz::from_circuit(c);
    std::vector<double> theta = random_angles(base.parameter_count(), 41);
    for (std::size_t k = 0; k < base.parameter_count(); ++k) {
        ClassicalAnsatz plus = base, minus = base;
        std::vector<double> tp = theta, tm = theta;
        tp[k] += std::numbers::pi / 2;
        tm[k] -= std::numbers::pi / 2;
        plus.set_parameters(tp);
        minus.set_parameters(tm);
        std::vector<double> pp = exact_classical_distribution(plus);
        std::vector<double> pm = exact_classical_distribution(minus);
        std::uint64_t m = base.channels[k].mask.value;
        for (std::size_t x = 0; x < pp.size(); ++x)
            CHECK(std::abs(pm[x] - pp[x ^ m]) < 1e-12);
    }
}

TEST_CASE("dephasing the quantum circuit after every rotation yields the bit-flip law") {
    std::uint64_t draw = 0;
    for (std::uint32_t n = 2; n <= 4; ++n)
        for (std::uint32_t layers = 1; layers <= 3; ++layers) {
            IqpCircuit c = build_line_circuit(n, layers);
            for (int rep = 0; rep < 6; ++rep) {
                c.set_parameters(random_angles(c.parameter_count(), 1000 + draw++));
                std::vector<double> quantum = dephased_iqp_oracle(c);
                std::vector<double> classical =
                    exact_classical_distribution(ClassicalAnsatz::from_circuit(c));
                REQUIRE(quantum.size() == classical.size());
                for (std::size_t x = 0; x < quantum.size(); ++x)
                    CHECK(std::abs(quantum[x] - classical[x]) < 1e-10);
            }
        }
}

TEST_CASE("the density oracle rejects circuits that do not match its pattern") {
    IqpCircuit c = build_line_circuit(4, 3);
    IqpCircuit tampered = c;
    tampered.generators.pop_back();
    CHECK_THROWS_AS(dephased_iqp_oracle(tampered), std::invalid_argument);
    CHECK_THROWS_AS(dephased_iqp_oracle(build_line_circuit(7, 4)), std::invalid_argument);
}

TEST_CASE("exact distribution caps the register size") {
    ClassicalAnsatz big{21, {}};
    CHECK_THROWS_AS(exact_classical_distribution(big), std::invalid_argument);
}
