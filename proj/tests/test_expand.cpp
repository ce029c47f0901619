#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include <delaystab/expand.hpp>
#include <delaystab/poly.hpp>

#include "support/oracles.hpp"

using namespace delaystab;
using Catch::Approx;

namespace {

CoeffVector random_weights(std::mt19937& rng, int k, double l1_cap) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<double> a(static_cast<std::size_t>(k));
    double sum = 0.0;
    for (double& v : a) {
        v = unit(rng);
        sum += std::abs(v);
    }
    if (sum > l1_cap)
        for (double& v : a) v *= l1_cap / sum;
    return CoeffVector(a);
}

}  // namespace

TEST_CASE("coefficient vector construction", "[expand]") {
    const CoeffVector v({1.25, -0.375});
    CHECK(v.dim() == 2);
    CHECK(v.order == 0);
    CHECK(l1_norm(v) == Approx(1.625).margin(1e-15));
    CHECK_THROWS_AS(CoeffVector(std::vector<double>{}), std::invalid_argument);
    CHECK_THROWS_AS(CoeffVector({std::numeric_limits<double>::infinity()}),
                    std::invalid_argument);
}

TEST_CASE("norm sequence for the two-term reference system", "[expand]") {
    const CoeffVector v0({1.25, -0.375});
    const double expected[] = {21.0 / 8, 85.0 / 32, 315.0 / 128, 1129.0 / 512,
                               4011.0 / 2048};
    for (int m = 0; m <= 4; ++m) {
        const CoeffVector vm = expand_m(v0, m);
        CHECK(vm.order == m);
        CHECK(1.0 + l1_norm(vm) == Approx(expected[m]).margin(1e-14));
        CHECK(l1_norm(from_coeff_vector(vm)) == Approx(expected[m]).margin(1e-14));
    }
}

TEST_CASE("expansion agrees with dense matrix powers", "[expand]") {
    std::mt19937 rng(90210);
    for (int trial = 0; trial < 150; ++trial) {
        const int k = 1 + static_cast<int>(rng() % 6);
        const int m = static_cast<int>(rng() % 9);
        const CoeffVector v0 = random_weights(rng, k, 2.0);
        const CoeffVector vm = expand_m(v0, m);
        const auto oracle = testsupport::expanded_by_matrix_power(v0.entries, m);
        REQUIRE(vm.entries.size() == oracle.size());
        for (std::size_t i = 0; i < oracle.size(); ++i)
            CHECK(vm.entries[i] == Approx(oracle[i]).margin(1e-11));
    }
}

TEST_CASE("polynomial layout of an expanded vector", "[expand]") {
    const CoeffVector v0({1.25, -0.375});
    const MonicPoly p1 = from_coeff_vector(expand_m(v0, 1));
    REQUIRE(p1.degree() == 3);
    // leading expanded slot is zero, the rest are the negated entries
    CHECK(p1.coeffs[0] == 0.0);
    CHECK(p1.coeffs[1] == Approx(-19.0 / 16).margin(1e-15));
    CHECK(p1.coeffs[2] == Approx(15.0 / 32).margin(1e-15));
}

TEST_CASE("cofactor polynomial and factorization", "[expand]") {
    const CoeffVector v0({1.25, -0.375});
    const MonicPoly q4 = q_polynomial(v0, 4);
    REQUIRE(q4.degree() == 4);
    CHECK(q4.coeffs[0] == 1.25);
    CHECK(q4.coeffs[1] == 1.1875);
    CHECK(q4.coeffs[2] == 1.015625);
    CHECK(q4.coeffs[3] == 0.82421875);

    std::mt19937 rng(5150);
    for (int trial = 0; trial < 60; ++trial) {
        const int k = 1 + static_cast<int>(rng() % 6);
        const int m = 1 + static_cast<int>(rng() % 8);
        const CoeffVector v0r = random_weights(rng, k, 1.4);
        const MonicPoly lhs = from_coeff_vector(expand_m(v0r, m));
        const MonicPoly rhs = mul(from_coeff_vector(v0r), q_polynomial(v0r, m));
        REQUIRE(lhs.degree() == rhs.degree());
        for (int i = 0; i < lhs.degree(); ++i)
            CHECK(lhs.coeffs[static_cast<std::size_t>(i)] ==
                  Approx(rhs.coeffs[static_cast<std::size_t>(i)]).margin(1e-11));
    }
}

TEST_CASE("expansion preserves the original roots", "[expand]") {
    const CoeffVector v0({0.4, 0.3, -0.2});
    const auto base = roots(from_coeff_vector(v0));
    const auto expanded = roots(from_coeff_vector(expand_m(v0, 3)));
    for (const Complex& z : base) {
        double best = 1e9;
        for (const Complex& w : expanded) best = std::min(best, std::abs(w - z));
        CHECK(best < 1e-8);
    }
}

TEST_CASE("classification by shrinking norms", "[expand]") {
    SECTION("stable with witness") {
        const Verdict v = classify_schur(CoeffVector({1.25, -0.375}));
        CHECK(v.kind == Verdict::Kind::Stable);
        REQUIRE(v.witness_m.has_value());
        CHECK(*v.witness_m == 4);
        CHECK(v.reason == "norm-witness");
        CHECK(v.norms.size() == 5);
    }
    SECTION("rejected by the screen at -1") {
        const Verdict v = classify_schur(CoeffVector({0.0, 19.0 / 16, -15.0 / 32}));
        CHECK(v.kind == Verdict::Kind::Unstable);
        CHECK(v.reason == "necessary-at-minus-one");
    }
    SECTION("explosive weight diverges") {
        const Verdict v = classify_schur(CoeffVector({2.5}));
        CHECK(v.kind == Verdict::Kind::Unstable);
    }
    SECTION("unit-circle pair is flagged marginal") {
        // (x^2 - x + 1)(x - 0.5): conjugate pair on the circle, screen passes
        const Verdict v = classify_schur(CoeffVector({1.5, -1.5, 0.5}));
        CHECK(v.kind == Verdict::Kind::MarginalSuspected);
        CHECK(v.reason == "oracle-marginal");
    }
    SECTION("screen catches an exact root at 1") {
        const Verdict v = classify_schur(CoeffVector({1.0}));
        CHECK(v.kind == Verdict::Kind::MarginalSuspected);
        CHECK(v.reason == "necessary-marginal");
    }
}

TEST_CASE("slow contraction beyond the initial budget", "[expand]") {
    // spectral radius 0.99; the first useful norm shows up long after m = 5
    const double r = 0.99, theta = 2.0;
    const CoeffVector v0({2.0 * r * std::cos(theta), -r * r});
    SECTION("root fallback extends the budget") {
        const Verdict v = classify_schur(v0, 5);
        CHECK(v.kind == Verdict::Kind::Stable);
        REQUIRE(v.witness_m.has_value());
        CHECK(*v.witness_m > 5);
    }
    SECTION("without the fallback the budget verdict is honest") {
        const Verdict v = classify_schur(v0, 5, 1e-9, false);
        CHECK(v.kind == Verdict::Kind::Inconclusive);
        CHECK(v.reason == "mmax-exhausted");
    }
}

TEST_CASE("fixed point structure across expansion stages", "[expand]") {
    SECTION("weights summing to one keep a full line of fixed points") {
        const FixedPointStructure s = fixed_point_structure(CoeffVector({0.5, 0.5}), 3);
        CHECK(s.alpha_k == Approx(1.0));
        for (const FixedPointSet st : s.stages) CHECK(st == FixedPointSet::AllReals);
    }
    SECTION("a stage can gain fixed points when the running sum hits -1") {
        const FixedPointStructure s = fixed_point_structure(CoeffVector({-1.0, 0.5}), 3);
        REQUIRE(s.stages.size() == 5);
        CHECK(s.stages[0] == FixedPointSet::TrivialOnly);
        CHECK(s.stages[1] == FixedPointSet::AllReals);  // beta_0 = -1
        CHECK(s.stages[2] == FixedPointSet::TrivialOnly);
        CHECK(s.beta[0] == Approx(-1.0));
    }
}

TEST_CASE("verdict kinds have names", "[expand]") {
    CHECK(std::string(to_string(Verdict::Kind::Stable)) == "Stable");
    CHECK(std::string(to_string(Verdict::Kind::Unstable)) == "Unstable");
    CHECK(std::string(to_string(Verdict::Kind::MarginalSuspected)) == "MarginalSuspected");
    CHECK(std::string(to_string(Verdict::Kind::Inconclusive)) == "Inconclusive");
}
