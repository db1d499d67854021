#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <limits>

#include "fedsim/vec.hpp"

using namespace fedsim;

TEST_CASE("vec_axpy") {
    CHECK(vec_axpy(2.0, {1, 1}, {0, 1}) == ParameterVector{2, 3});
    CHECK(vec_axpy(0.0, {5, 6}, {1, 2}) == ParameterVector{1, 2});
    CHECK_THROWS_AS(vec_axpy(1.0, {1, 2}, {1}), ShapeError);
}

TEST_CASE("vec_sub and vec_scale") {
    const ParameterVector x{1.5, -2.0, 3.0};
    const auto zero = vec_sub(x, x);
    for (double v : zero) CHECK(v == 0.0);
    CHECK(vec_scale(-2.0, {1, 2}) == ParameterVector{-2, -4});
    CHECK_THROWS_AS(vec_sub({1}, {1, 2}), ShapeError);
}

TEST_CASE("vec_mean") {
    CHECK(vec_mean({{1, 2}, {3, 4}}) == ParameterVector{2, 3});
    CHECK(vec_mean({{7, -1}}) == ParameterVector{7, -1});
    CHECK_THROWS_AS(vec_mean({}), ConfigError);
    CHECK_THROWS_AS(vec_mean({{1, 2}, {3}}), ShapeError);
}

TEST_CASE("vec_norm") {
    CHECK(vec_norm({3, 4}) == doctest::Approx(5.0));
    CHECK(vec_norm({}) == 0.0);
}

TEST_CASE("ensure_finite rejects NaN and Inf") {
    CHECK_NOTHROW(ensure_finite({0.0, -1e300}, "t"));
    CHECK_THROWS_AS(
        ensure_finite({std::numeric_limits<double>::quiet_NaN()}, "t"),
        NumericError);
    CHECK_THROWS_AS(
        ensure_finite({std::numeric_limits<double>::infinity()}, "t"),
        NumericError);
}
