#include <gtest/gtest.h>

#include <numbers>

#include "bbc/circuit.hpp"

using namespace bbc;

namespace {

std::string error_of(std::string_view text) {
    try {
        parse_circuit(text);
    } catch (const InputError &e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(Angle, ClassifiesExactMultiplesOfPiOver8) {
    EXPECT_EQ(Angle::exact(1, 4).classify(), AngleClass::Clifford);
    EXPECT_EQ(Angle::exact(1, 2).classify(), AngleClass::Clifford);
    EXPECT_EQ(Angle::exact(-3, 4).classify(), AngleClass::Clifford);
    EXPECT_EQ(Angle::exact(0, 1).classify(), AngleClass::Clifford);
    EXPECT_EQ(Angle::exact(1, 8).classify(), AngleClass::Tlike);
    EXPECT_EQ(Angle::exact(-5, 8).classify(), AngleClass::Tlike);
    EXPECT_EQ(Angle::exact(1, 16).classify(), AngleClass::Arbitrary);
    EXPECT_EQ(Angle::exact(1, 3).classify(), AngleClass::Arbitrary);
}

TEST(Angle, SnapsFloatsWithinTolerance) {
    EXPECT_EQ(Angle::radians(std::numbers::pi / 4).classify(), AngleClass::Clifford);
    EXPECT_EQ(Angle::radians(std::numbers::pi / 8 + 1e-13).classify(), AngleClass::Tlike);
    EXPECT_EQ(Angle::radians(std::numbers::pi / 8 + 1e-9).classify(), AngleClass::Arbitrary);
    EXPECT_EQ(Angle::radians(0.1).classify(), AngleClass::Arbitrary);
}

TEST(Angle, QuarterTurnsModuloPi) {
    EXPECT_EQ(Angle::exact(1, 4).quarter_turns(), 1);
    EXPECT_EQ(Angle::exact(1, 2).quarter_turns(), 2);
    EXPECT_EQ(Angle::exact(-1, 4).quarter_turns(), 3);
    EXPECT_EQ(Angle::exact(5, 4).quarter_turns(), 1);
    EXPECT_EQ(Angle::exact(1, 1).quarter_turns(), 0);
    EXPECT_THROW(Angle::exact(1, 8).quarter_turns(), std::logic_error);
}

TEST(Angle, DoubledTlikeIsClifford) {
    EXPECT_EQ(Angle::exact(1, 8).doubled().classify(), AngleClass::Clifford);
    EXPECT_EQ(Angle::exact(1, 16).doubled().classify(), AngleClass::Tlike);
}

TEST(Angle, TextRoundTrip) {
    for (const char *s : {"pi/4", "-pi/8", "3*pi/8", "pi", "-7*pi/16", "0.25", "-1.5e-3"}) {
        auto a = Angle::parse(s);
        ASSERT_TRUE(a) << s;
        auto b = Angle::parse(a->str());
        ASSERT_TRUE(b) << a->str();
        EXPECT_EQ(*a, *b);
    }
    EXPECT_EQ(Angle::parse("2*pi/8")->str(), "pi/4");
    EXPECT_EQ(Angle::parse("2.0")->str(), "2.0");
    EXPECT_FALSE(Angle::parse("pi/0"));
    EXPECT_FALSE(Angle::parse("2pi"));
    EXPECT_FALSE(Angle::parse("abc"));
    EXPECT_FALSE(Angle::parse(""));
}

TEST(ParseCircuit, ReadsOpsAndComments) {
    const auto c = parse_circuit(
        "# header comment\n"
        "qubits 3\n"
        "rot +XIZ pi/4   # Clifford\n"
        "\n"
        "rot -YYI 0.3\n"
        "meas ZZZ\n");
    ASSERT_EQ(c.n_qubits, 3u);
    ASSERT_EQ(c.size(), 3u);
    EXPECT_TRUE(c.ops[0].is_clifford_rotation());
    EXPECT_EQ(c.ops[1].pauli.str(), "-YYI");
    EXPECT_FALSE(c.ops[2].is_rotation());
}

TEST(ParseCircuit, RenderRoundTrip) {
    GenSpec spec;
    spec.n_qubits = 7;
    spec.length = 200;
    spec.tlike_frac = 0.2;
    const auto c = gen_random(spec);
    EXPECT_EQ(parse_circuit(render_circuit(c)), c);
}

TEST(ParseCircuit, ErrorsCarryLineAndColumn) {
    EXPECT_NE(error_of("qubits 2\nrot XX pi/4\nrot XQ pi/4\n").find("line 3, column 5"), std::string::npos);
    EXPECT_NE(error_of("qubits 2\nrot XXX pi/4\n").find("line 2, column 5"), std::string::npos);
    EXPECT_NE(error_of("qubits 2\nrot XX pie\n").find("line 2, column 8"), std::string::npos);
    EXPECT_NE(error_of("qubits 2\nflip XX\n").find("line 2, column 1"), std::string::npos);
    EXPECT_NE(error_of("rot XX pi\n").find("line 1, column 1"), std::string::npos);
    EXPECT_NE(error_of("qubits 0\n").find("zero qubits"), std::string::npos);
    EXPECT_NE(error_of("qubits 2\nmeas II\n").find("identity"), std::string::npos);
    EXPECT_NE(error_of("").find("missing"), std::string::npos);
}

TEST(GenRandom, DeterministicPerSeed) {
    GenSpec spec;
    spec.seed = 42;
    EXPECT_EQ(gen_random(spec), gen_random(spec));
    GenSpec other = spec;
    other.seed = 43;
    EXPECT_FALSE(gen_random(spec) == gen_random(other));
}

TEST(GenRandom, ClassFractionsAndWeights) {
    GenSpec spec;
    spec.n_qubits = 20;
    spec.length = 20000;
    spec.clifford_frac = 0.4;
    spec.arb_frac = 0.3;
    spec.tlike_frac = 0.1;
    spec.weights = WeightDistribution::parse("uniform:2:5");
    const auto c = gen_random(spec);
    std::size_t cliff = 0, arb = 0, tl = 0, meas = 0;
    for (const auto &op : c.ops) {
        const auto w = op.pauli.vector.weight();
        EXPECT_GE(w, 2u);
        EXPECT_LE(w, 5u);
        if (!op.is_rotation()) {
            ++meas;
        } else {
            switch (op.angle.classify()) {
                case AngleClass::Clifford: ++cliff; break;
                case AngleClass::Arbitrary: ++arb; break;
                case AngleClass::Tlike: ++tl; break;
            }
        }
    }
    EXPECT_NEAR(cliff / 20000.0, 0.4, 0.02);
    EXPECT_NEAR(arb / 20000.0, 0.3, 0.02);
    EXPECT_NEAR(tl / 20000.0, 0.1, 0.02);
    EXPECT_NEAR(meas / 20000.0, 0.2, 0.02);
}

TEST(GenRandom, BernoulliWeightsNeverIdentity) {
    GenSpec spec;
    spec.n_qubits = 4;
    spec.length = 2000;
    spec.weights = WeightDistribution::parse("bernoulli:0.05");
    for (const auto &op : gen_random(spec).ops) {
        EXPECT_FALSE(op.pauli.vector.is_identity());
    }
}

TEST(GenRandom, RejectsBadFractions) {
    GenSpec spec;
    spec.clifford_frac = 0.8;
    spec.arb_frac = 0.5;
    EXPECT_THROW(gen_random(spec), InputError);
    EXPECT_THROW(WeightDistribution::parse("uniform:3:2"), InputError);
    EXPECT_THROW(WeightDistribution::parse("bernoulli:1.5"), InputError);
    EXPECT_THROW(WeightDistribution::parse("poisson:2"), InputError);
}
