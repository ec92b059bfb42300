#include "symorb/closed_form.hpp"

#include "symorb/maslov.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>

using namespace symorb;

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

TEST_CASE("compute_k") {
    // sqrt(-ad) T = 2 pi exactly -> k = 0 (right-closed band)
    CHECK(compute_k(1.0, -1.0, 2.0 * kPi) == 0);
    // sqrt(1.5) * 2 pi ~ 7.695 > 2 pi -> k = 1
    CHECK(compute_k(1.0, -1.5, 2.0 * kPi) == 1);
    // 4 pi exactly -> k = 1
    CHECK(compute_k(1.0, -4.0, 2.0 * kPi) == 1);
    CHECK(compute_k(1.0, -1.0, 4.0 * kPi) == 1);
    // tiny rotation angle -> k = 0
    CHECK(compute_k(0.5, -1e-4, 1.0) == 0);
    CHECK_THROWS_AS(compute_k(1.0, 0.5, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(compute_k(-1.0, -0.5, 1.0), std::invalid_argument);
}

TEST_CASE("classify_generator") {
    {
        const CaseTag t = classify_generator(1, 2, 1, -1);
        CHECK(t.d_sign == DSign::Negative);
        CHECK(t.subcase == Subcase::CdB2Pos);  // cd + b^2 = 3
        CHECK(t.model_feasible);
    }
    {
        const CaseTag t = classify_generator(1, 0, -1, 0);
        CHECK(t.d_sign == DSign::Zero);
        CHECK(t.subcase == Subcase::BZeroCNonpos);
        CHECK_FALSE(t.model_feasible);
    }
    {
        const CaseTag t = classify_generator(1, 1, 1, 2);
        CHECK(t.d_sign == DSign::Positive);
        CHECK(t.subcase == Subcase::CdB2Pos);
    }
    {
        const CaseTag t = classify_generator(1, 2, 1, -4);  // cd + b^2 = 0
        CHECK(t.subcase == Subcase::CdB2Zero);
    }
    CHECK_THROWS_AS(classify_generator(0.0, 1, 1, 1), std::invalid_argument);
}

TEST_CASE("case table") {
    // d < 0 rows
    {
        const auto r = closed_form_iota1(1, 2, 1, -1, 2.0 * kPi);
        CHECK(r.iota1 == 0);  // cd + b^2 = 3 >= 0, k = 0
        CHECK(r.tag.k == 0);
    }
    {
        // cd + b^2 < 0: 2k + 1
        const auto r = closed_form_iota1(1, 0, 1, -1, 2.0 * kPi);
        CHECK(r.iota1 == 1);
    }
    {
        // k = 1 band
        const auto r = closed_form_iota1(1, 0, 1, -1.5, 2.0 * kPi);
        CHECK(r.tag.k == 1);
        CHECK(r.iota1 == 3);
    }
    // d = 0 rows
    CHECK(closed_form_iota1(1, 0, 1, 0, 5.0).iota1 == 0);
    CHECK(closed_form_iota1(1, 2, -1, 0, 5.0).iota1 == 0);
    CHECK(closed_form_iota1(1, 0, -1, 0, 5.0).iota1 == -1);
    CHECK(closed_form_iota1(1, 0, 0, 0, 5.0).iota1 == -1);
    // d > 0 rows
    CHECK(closed_form_iota1(1, 1, 1, 2, 5.0).iota1 == 0);
    CHECK(closed_form_iota1(1, 1, -2, 1, 5.0).iota1 == -1);  // cd + b^2 = -1
    CHECK(closed_form_iota1(1, 1, -1, 1, 5.0).iota1 == -1);  // cd + b^2 = 0
}

TEST_CASE("parity and positivity") {
    std::mt19937_64 eng(61);
    for (int rep = 0; rep < 400; ++rep) {
        const double a = test::uniform(eng, 0.1, 5.0);
        const double b = test::uniform(eng, -5.0, 5.0);
        const double c = test::uniform(eng, -5.0, 5.0);
        const double d = test::uniform(eng, -5.0, 5.0);
        const double T = test::uniform(eng, 0.5, 20.0);
        const auto r = closed_form_iota1(a, b, c, d, T);
        if (d < -1e-9) {
            const double disc = c * d + b * b;
            if (disc > 1e-9) CHECK(r.iota1 % 2 == 0);
            if (disc < -1e-9) CHECK(std::abs(r.iota1) % 2 == 1);
        }
        // c > 0 keeps the index nonnegative
        if (c > 1e-9) CHECK(r.iota1 >= 0);
    }
}

TEST_CASE("monotonicity in T with jumps of two") {
    // d < 0, cd + b^2 > 0: iota1 = 2k jumps by 2 exactly when sqrt(-ad) T
    // crosses a multiple of 2 pi
    const double a = 2.0, b = 1.0, c = 1.0, d = -2.0;
    const double w = std::sqrt(-a * d);
    int prev = closed_form_iota1(a, b, c, d, 0.05).iota1;
    for (double T = 0.1; T < 25.0; T += 0.1) {
        const int cur = closed_form_iota1(a, b, c, d, T).iota1;
        CHECK(cur >= prev);
        prev = cur;
    }
    for (int m = 1; m <= 3; ++m) {
        const double t_jump = 2.0 * kPi * m / w;
        const int below = closed_form_iota1(a, b, c, d, t_jump * (1.0 - 1e-9)).iota1;
        const int at = closed_form_iota1(a, b, c, d, t_jump).iota1;
        const int above = closed_form_iota1(a, b, c, d, t_jump * (1.0 + 1e-6)).iota1;
        CHECK(at == below);  // the boundary belongs to the lower band
        CHECK(above == below + 2);
    }
}

TEST_CASE("closed form matches the crossing-count oracle on a sample") {
    std::mt19937_64 eng(67);
    int done = 0;
    while (done < 25) {
        const double a = test::uniform(eng, 0.1, 5.0);
        const double b = test::uniform(eng, -5.0, 5.0);
        const double c = test::uniform(eng, -5.0, 5.0);
        const double d = test::uniform(eng, -5.0, 5.0);
        const double T = test::uniform(eng, 0.5, 20.0);
        // guard band around the table discontinuities
        if (std::abs(d) < 1e-3) continue;
        if (std::abs(c * d + b * b) < 1e-3 * std::max({1.0, b * b, std::abs(c * d)})) continue;
        if (d < 0.0) {
            const double x = std::sqrt(-a * d) * T;
            if (std::abs(x - 2.0 * kPi * std::round(x / (2.0 * kPi))) < 1e-3) continue;
        }
        const int expected = closed_form_iota1(a, b, c, d, T).iota1;
        const int numeric = iota1(SymplecticPath(Generator(a, b, c, d), T)).iota1;
        CHECK(numeric == expected);
        ++done;
    }
}
