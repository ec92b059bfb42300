#include "symorb/linalg.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <cmath>

using namespace symorb;

TEST_CASE("standard structure") {
    for (int n : {1, 2, 3}) {
        const Mat j = standard_j(n);
        CHECK((j * j + Mat::Identity(2 * n, 2 * n)).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
        CHECK((j.transpose() + j).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
    }
}

TEST_CASE("omega product convention") {
    // antisymmetry
    std::mt19937_64 eng(11);
    for (int rep = 0; rep < 20; ++rep) {
        Vec u(4), v(4);
        for (int i = 0; i < 4; ++i) {
            u[i] = test::uniform(eng, -2, 2);
            v[i] = test::uniform(eng, -2, 2);
        }
        CHECK(omega_product(u, u) == doctest::Approx(0.0));
        CHECK(omega_product(u, v) == doctest::Approx(-omega_product(v, u)));
    }
    // J e1 = e3 for n = 2
    Vec e1 = Vec::Zero(4), e13 = Vec::Zero(4);
    e1[0] = 1.0;
    e13[0] = 1.0;
    e13[2] = 1.0;
    CHECK(omega_product(e1, e13) == doctest::Approx(1.0));
    // omega(e4, (0, -1, b/d, x4)) = 1 for any b, d != 0, x4
    for (double b : {0.5, 2.0, -3.0}) {
        for (double d : {-1.0, 2.5}) {
            Vec e4 = Vec::Zero(4), v = Vec::Zero(4);
            e4[3] = 1.0;
            v[1] = -1.0;
            v[2] = b / d;
            v[3] = 0.7;
            CHECK(omega_product(e4, v) == doctest::Approx(1.0));
        }
    }
    CHECK_THROWS_AS(omega_product(Vec::Zero(3), Vec::Zero(3)), std::invalid_argument);
    CHECK_THROWS_AS(omega_product(Vec::Zero(2), Vec::Zero(4)), std::invalid_argument);
}

TEST_CASE("is_symplectic") {
    CHECK(is_symplectic(Mat::Identity(4, 4), 1e-12));
    Mat eta1(2, 2);
    eta1 << 1.0, 5.0, 0.0, 1.0;
    CHECK(is_symplectic(eta1, 1e-12));
    CHECK_FALSE(is_symplectic(2.0 * Mat::Identity(2, 2), 1e-9));
    CHECK_THROWS_AS(is_symplectic(Mat::Identity(3, 3), 1e-9), std::invalid_argument);

    std::mt19937_64 eng(5);
    for (int rep = 0; rep < 10; ++rep) {
        const Mat s = test::random_symmetric(eng, 4);
        const Mat m = matrix_exponential(standard_j(2) * s, 0.7);
        CHECK(is_symplectic(m, 1e-9));
        CHECK(std::abs(m.determinant() - 1.0) <= 1e-8);
    }
}

TEST_CASE("diamond product") {
    CHECK((diamond_product(Mat::Identity(2, 2), Mat::Identity(2, 2)) - Mat::Identity(4, 4))
              .cwiseAbs()
              .maxCoeff() == doctest::Approx(0.0));

    Mat m1(2, 2), m2(2, 2);
    m1 << 1, 2, 3, 4;
    m2 << 5, 6, 7, 8;
    Mat expect(4, 4);
    expect << 1, 0, 2, 0,
              0, 5, 0, 6,
              3, 0, 4, 0,
              0, 7, 0, 8;
    CHECK((diamond_product(m1, m2) - expect).cwiseAbs().maxCoeff() == doctest::Approx(0.0));

    // diamond of symplectic factors is symplectic
    std::mt19937_64 eng(17);
    for (int rep = 0; rep < 10; ++rep) {
        const Mat a = test::random_symplectic(eng, 1);
        const Mat b = test::random_symplectic(eng, 2);
        CHECK(is_symplectic(diamond_product(a, b), 1e-8));
    }
    CHECK_THROWS_AS(diamond_product(Mat::Identity(3, 3), Mat::Identity(2, 2)),
                    std::invalid_argument);
}

TEST_CASE("matrix exponential") {
    // zero generator
    CHECK((matrix_exponential(Mat::Zero(4, 4), 1.0) - Mat::Identity(4, 4)).cwiseAbs().maxCoeff() ==
          doctest::Approx(0.0));

    // rotation closed form
    for (double w : {0.3, 1.0, 4.0}) {
        Mat a(2, 2);
        a << 0.0, -w, w, 0.0;
        for (double t : {0.1, 1.0, 2.5}) {
            Mat r(2, 2);
            r << std::cos(w * t), -std::sin(w * t), std::sin(w * t), std::cos(w * t);
            CHECK((matrix_exponential(a, t) - r).cwiseAbs().maxCoeff() <= 1e-12);
        }
    }

    // nilpotent model generator: polynomial flow entries
    {
        const double a = 1.0, b = 2.0 * std::sqrt(2.0), c = 1.0, d = 0.0, t = 1.0;
        const Generator g(a, b, c, d);
        const Mat e = matrix_exponential(g.matrix(), t);
        CHECK(e(0, 1) == doctest::Approx(b * t));
        CHECK(e(2, 0) == doctest::Approx(a * t));
        CHECK(e(2, 1) == doctest::Approx(a * b * t * t / 2.0).epsilon(1e-12));
        CHECK(e(3, 0) == doctest::Approx(-a * b * t * t / 2.0).epsilon(1e-12));
        CHECK(e(3, 1) == doctest::Approx(c * t - a * b * b * t * t * t / 6.0).epsilon(1e-12));
        CHECK(e(3, 1) == doctest::Approx(1.0 - 4.0 / 3.0).epsilon(1e-12));
        CHECK(e(3, 2) == doctest::Approx(-b * t));
    }

    // semigroup property on random generators
    std::mt19937_64 eng(23);
    for (int rep = 0; rep < 12; ++rep) {
        Mat a(4, 4);
        for (int i = 0; i < 16; ++i) a(i / 4, i % 4) = test::uniform(eng, -1.25, 1.25);
        const double s = test::uniform(eng, 0.0, 2.0), t = test::uniform(eng, 0.0, 2.0);
        const Mat lhs = matrix_exponential(a, s + t);
        const Mat rhs = matrix_exponential(a, s) * matrix_exponential(a, t);
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-9 * std::max(1.0, lhs.cwiseAbs().maxCoeff()));
    }

    CHECK_THROWS_AS(matrix_exponential(Mat::Constant(2, 2, std::nan("")), 1.0),
                    std::invalid_argument);
}

TEST_CASE("generator matrix and exact flow") {
    const Generator g(1.0, 2.0, 1.0, -1.0);
    const Mat a = g.matrix();
    // sparsity pattern
    Mat expect = Mat::Zero(4, 4);
    expect(0, 1) = 2.0;
    expect(0, 2) = -1.0;
    expect(2, 0) = 1.0;
    expect(3, 1) = 1.0;
    expect(3, 2) = -2.0;
    CHECK((a - expect).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
    // -J A symmetric
    const Mat b_mat = -standard_j(2) * a;
    CHECK((b_mat - b_mat.transpose()).cwiseAbs().maxCoeff() == doctest::Approx(0.0));

    CHECK_THROWS_AS(Generator(-1.0, 0.0, 0.0, 0.0), std::invalid_argument);

    // exact flow agrees with the Pade exponential across all three spectra
    std::mt19937_64 eng(31);
    for (int rep = 0; rep < 40; ++rep) {
        const double aa = test::uniform(eng, 0.1, 5.0);
        const double bb = test::uniform(eng, -5.0, 5.0);
        const double cc = test::uniform(eng, -5.0, 5.0);
        const double dd = (rep % 3 == 0) ? 0.0 : test::uniform(eng, -5.0, 5.0);
        const Generator gg(aa, bb, cc, dd);
        const double t = test::uniform(eng, 0.0, 3.0);
        const Mat flow = gg.flow(t);
        const Mat pade = matrix_exponential(gg.matrix(), t);
        const double scale = std::max(1.0, pade.cwiseAbs().maxCoeff());
        CHECK((flow - pade).cwiseAbs().maxCoeff() <= 1e-9 * scale);
        CHECK(symplectic_residual(flow) <= 1e-10);
    }
}

TEST_CASE("eigen structure") {
    {
        const EigenStructure e = eigen_structure(Generator(1, 0, 1, -1));
        CHECK(e.zero_multiplicity == 2);
        CHECK(e.pair == PairKind::Imaginary);
        CHECK(e.pair_magnitude == doctest::Approx(1.0));
        CHECK_FALSE(e.zero_semisimple);  // b^2 + cd = -1
    }
    {
        const EigenStructure e = eigen_structure(Generator(1, 2, 1, -4));
        CHECK(e.zero_semisimple);  // b^2 + cd = 0
        CHECK(e.zero_multiplicity == 2);
    }
    {
        const EigenStructure e = eigen_structure(Generator(1, 0, 1, 1));
        CHECK(e.pair == PairKind::Real);
        CHECK(e.pair_magnitude == doctest::Approx(1.0));
    }
    {
        const EigenStructure e = eigen_structure(Generator(1, 3, 2, 0));
        CHECK(e.zero_multiplicity == 4);
        CHECK(e.pair == PairKind::None);
    }
}
