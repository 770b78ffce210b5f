#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "halfflow/validation.hpp"

using namespace halfflow;

TEST(FitConstant, MaxMedianAndBound) {
    const ConstantReport r = fit_constant("c", {"a", "b", "c", "d"}, {1.0, 3.0, 2.0, 4.0});
    EXPECT_EQ(r.constant, 4.0);
    EXPECT_EQ(r.median, 2.5);
    EXPECT_TRUE(r.bounded);
    EXPECT_FALSE(fit_constant("c", {"a", "b", "c"}, {1.0, 1.0, 2.5}).bounded);
    EXPECT_FALSE(fit_constant("c", {"a", "b"}, {1.0, std::numeric_limits<double>::infinity()}).bounded);
}

TEST(AnalyticChecks, AllPass) {
    for (const auto& c : analytic_checks()) EXPECT_TRUE(c.passed) << c.name << " value " << c.value;
}

TEST(Constants, InterpolationFamiliesAreBounded) {
    const ConstantReport g = interpolation_gradient_constant();
    EXPECT_EQ(g.ratios.size(), 10u);
    EXPECT_TRUE(g.bounded);
    EXPECT_TRUE(interpolation_laplace_constant().bounded);
}

TEST(Constants, ReportSerializes) {
    ValidationReport r;
    r.checks = {{"x", true, 1.0, 2.0, "d"}};
    r.constants = {fit_constant("c", {"a"}, {1.0})};
    r.all_passed = true;
    const auto j = nlohmann::json::parse(to_json(r));
    EXPECT_TRUE(j["all_passed"].get<bool>());
    EXPECT_EQ(j["checks"][0]["name"], "x");
    EXPECT_EQ(j["constants"][0]["constant"], 1.0);
}
