#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "rsplan/model.hpp"

using namespace rsplan;

TEST_CASE("canonical instance satisfies every assumption") {
    const auto report = validate(canonical_instance());
    CHECK(report.valid());
    CHECK(report.summary() == "all assumptions hold");
}

TEST_CASE("zero switching rate is reported") {
    auto inst = canonical_instance();
    inst.regimes.a1 = 0.0;
    const auto report = validate(inst);
    REQUIRE_FALSE(report.valid());
    CHECK(report.mentions("a1 > 0"));
    CHECK(report.summary().find("a1 > 0 violated") != std::string::npos);
}

TEST_CASE("declared bound below the true quadratic constant is caught at x = 1") {
    auto inst = canonical_instance();
    inst.f1 = CostFunction::radial(1.0).with_bound(0.5);
    const auto report = validate(inst);
    REQUIRE_FALSE(report.valid());
    CHECK(report.mentions("f1(x) <= M1|x|^2"));
    CHECK(report.mentions("x = (1)"));
}

TEST_CASE("each broken assumption is named") {
    auto check = [](auto mutate, const char* text) {
        auto inst = canonical_instance();
        mutate(inst);
        const auto report = validate(inst);
        CHECK_MESSAGE(report.mentions(text), report.summary());
    };
    check([](ProblemInstance& i) { i.regimes.a2 = -1.0; }, "a2 > 0");
    check([](ProblemInstance& i) { i.regimes.alpha1 = -0.1; }, "alpha1 >= 0");
    check([](ProblemInstance& i) { i.regimes.alpha2 = NAN; }, "alpha2 >= 0");
    check([](ProblemInstance& i) { i.regimes.sigma1 = 0.0; }, "sigma1 != 0");
    check([](ProblemInstance& i) { i.regimes.sigma2 = 0.0; }, "sigma2 != 0");
    check([](ProblemInstance& i) { i.radius = 0.0; }, "R > 0");
    check([](ProblemInstance& i) { i.dim = 4; }, "1 <= N <= 3");
    check([](ProblemInstance& i) { i.y0 = {1.0}; }, "|y0| < R");
    check([](ProblemInstance& i) { i.y0 = {0.0, 0.0}; }, "y0 has N components");
    check([](ProblemInstance& i) { i.f2 = CostFunction::radial(-1.0); }, "M2 >= 0");
}

TEST_CASE("negative sigma is stored as a magnitude") {
    RegimeParams p{1.0, 2.0, 0.0, 0.0, -0.4, 0.6};
    CHECK(p.sigma(Regime::one) == doctest::Approx(0.4));
    auto inst = canonical_instance();
    inst.regimes.sigma1 = -0.4;
    CHECK(validate(inst).valid());
}

TEST_CASE("non-convex tabulated cost is flagged") {
    auto inst = canonical_instance();
    // flat, then steep, then nearly flat: the quadratic bound holds but the kink at 0.5 is concave
    inst.f1 = CostFunction::tabulated({0.0, 0.25, 0.5, 1.0}, {0.0, 0.0, 0.2, 0.25}, 1.0);
    const auto report = validate(inst);
    CHECK(report.mentions("f1 convex"));
    CHECK_FALSE(report.mentions("f1(x) <= M1|x|^2"));
}

TEST_CASE("convex tabulated cost with a correct bound is accepted") {
    auto inst = canonical_instance();
    inst.f1 = CostFunction::tabulated({0.0, 0.5, 1.0}, {0.0, 0.0, 0.5}, 1.0);
    CHECK(validate(inst).valid());
}

TEST_CASE("validate is pure") {
    auto inst = canonical_instance();
    inst.f1 = CostFunction::radial(1.0).with_bound(0.9);
    CHECK(validate(inst).summary() == validate(inst).summary());
}

TEST_CASE("eval_cost examples") {
    const std::vector<double> origin{0.0};
    CHECK(eval_cost(CostFunction::radial(1.0), origin, 1.0) == 0.0);
    const std::vector<double> unit{0.6, 0.8};
    CHECK(eval_cost(CostFunction::radial(2.0), unit, 1.0) == doctest::Approx(2.0).epsilon(1e-15));
    const std::vector<double> ones{1.0, 1.0};
    CHECK(eval_cost(CostFunction::diagonal({1.0, 3.0}), ones, 2.0) == 4.0);
}

TEST_CASE("eval_cost rejects points outside the closed ball") {
    const std::vector<double> outside{1.01};
    CHECK_THROWS_AS(eval_cost(CostFunction::radial(1.0), outside, 1.0), DomainError);
    const std::vector<double> on_sphere{1.0};
    CHECK_NOTHROW(eval_cost(CostFunction::radial(1.0), on_sphere, 1.0));
}

TEST_CASE("accepted costs respect their bound at 10^4 uniform ball points") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const std::vector<CostFunction> costs{CostFunction::radial(1.5), CostFunction::diagonal({0.5, 2.0, 1.0}),
                                          CostFunction::diagonal({0.0, 0.0, 3.0})};
    for (const auto& f : costs) {
        ProblemInstance inst = canonical_instance();
        inst.dim = 3;
        inst.y0 = {0.0, 0.0, 0.0};
        inst.f1 = f;
        inst.f2 = f;
        REQUIRE(validate(inst).valid());
        int checked = 0;
        while (checked < 10000) {
            std::vector<double> x{u(rng), u(rng), u(rng)};
            if (squared_norm(x) > 1.0) continue;
            CHECK(f(x) <= f.bound() * squared_norm(x) + 1e-15);
            ++checked;
        }
    }
}

TEST_CASE("max over ball") {
    CHECK(CostFunction::radial(2.0).max_over_ball(0.5) == doctest::Approx(0.5));
    CHECK(CostFunction::diagonal({1.0, 3.0}).max_over_ball(2.0) == doctest::Approx(12.0));
    CHECK(CostFunction::tabulated({0.0, 1.0}, {0.0, 1.0}, 1.0).max_over_ball(2.0) == doctest::Approx(2.0));
    CHECK(CostFunction::radial(0.0).is_zero());
    CHECK_FALSE(CostFunction::radial(1.0).is_zero());
}

TEST_CASE("regime helpers") {
    CHECK(other(Regime::one) == Regime::two);
    CHECK(index_of(Regime::two) == 1);
    CHECK(regime_from_int(2) == Regime::two);
    CHECK_THROWS_AS(regime_from_int(3), DomainError);
}
