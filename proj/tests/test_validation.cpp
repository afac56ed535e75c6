#include <doctest.h>

#include <string>

#include "mmra/validation.hpp"

using namespace mmra;

TEST_CASE("default desk-scale validation passes and is reproducible") {
    const auto c = default_config(ExperimentId::Validate, false);
    const auto a = run_validate(c);
    for (const auto& check : a.checks) {
        INFO(check.name << ": " << check.detail);
        CHECK(check.passed);
    }
    CHECK(a.checks.size() == 10u);
    CHECK(a.all_passed());
    const auto b = run_validate(c);
    CHECK(a.to_text() == b.to_text());
    CHECK(a.to_text().find("summary: 10/10 passed") != std::string::npos);
}

TEST_CASE("a mutated SINR fails the substitution identity") {
    // M - 1 replaced by M in both the numerator and the collider term.
    const Sinr1Fn mutated = [](const CollisionScenario& s, const SystemParams& p) {
        SystemParams shifted = p;
        shifted.M = p.M + 1;
        return sinr1(s, shifted);
    };
    const auto r = check_substitution_identity(mutated, 100, 1);
    CHECK_FALSE(r.passed);
    CHECK(r.detail.find("Ka=") != std::string::npos);
    CHECK(check_substitution_identity(ValidationHooks{}.sinr1, 100, 1).passed);
}

TEST_CASE("report text marks failures") {
    ValidationReport r;
    r.checks.push_back({"a", true, "ok"});
    r.checks.push_back({"b", false, "broken at M=3"});
    CHECK_FALSE(r.all_passed());
    CHECK(r.to_text() == "PASS a: ok\nFAIL b: broken at M=3\nsummary: 1/2 passed\n");
}
