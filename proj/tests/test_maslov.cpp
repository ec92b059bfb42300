#include "symorb/maslov.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <cmath>

using namespace symorb;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

SymplecticPath rotation_path(double T) { return SymplecticPath(test::rotation_generator(), T); }

SymplecticPath shear_path(double rate, double T) {
    return SymplecticPath(test::shear_generator(rate), T);
}

SymplecticPath constant_identity_path(double T, int n) {
    std::vector<double> ts;
    std::vector<Mat> ms;
    for (int i = 0; i <= 64; ++i) {
        ts.push_back(T * i / 64.0);
        ms.push_back(Mat::Identity(2 * n, 2 * n));
    }
    return SymplecticPath(ts, ms);
}

}  // namespace

TEST_CASE("fundamental solution basics") {
    // zero generator: constant identity path
    const SymplecticPath zero(Mat::Zero(2, 2), 1.0);
    CHECK((zero.value(0.7) - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() == doctest::Approx(0.0));

    // rotation returns to the identity at 2 pi
    const SymplecticPath rot = rotation_path(2.0 * kPi);
    CHECK((rot.value(2.0 * kPi) - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-12);
    Mat quarter(2, 2);
    quarter << 0.0, -1.0, 1.0, 0.0;
    CHECK((rot.value(kPi / 2.0) - quarter).cwiseAbs().maxCoeff() <= 1e-12);

    // nilpotent generator flow matches the printed polynomial entries
    const Generator g(1.0, 2.0 * std::sqrt(2.0), 1.0, 0.0);
    const SymplecticPath path(g, 1.0);
    const Mat m = path.value(1.0);
    CHECK(m(0, 1) == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-10));
    CHECK(m(3, 1) == doctest::Approx(1.0 - 4.0 / 3.0).epsilon(1e-10));

    CHECK_THROWS_AS(SymplecticPath(Mat::Zero(2, 2), 1.0, 8), std::invalid_argument);
    CHECK_THROWS_AS(SymplecticPath(Mat::Constant(2, 2, std::nan("")), 1.0),
                    std::invalid_argument);
}

TEST_CASE("crossing detection on rotations") {
    const CrossingScan scan = detect_crossings(rotation_path(2.0 * kPi));
    REQUIRE(scan.continuous_bands.empty());
    REQUIRE(scan.crossings.size() == 2);
    CHECK(scan.crossings[0].location == CrossingLocation::Start);
    CHECK(scan.crossings[0].kernel_dim == 2);
    CHECK(scan.crossings[1].location == CrossingLocation::End);
    CHECK(scan.crossings[1].kernel_dim == 2);

    // interior crossing at 2 pi when T = 3 pi
    const CrossingScan scan3 = detect_crossings(rotation_path(3.0 * kPi));
    REQUIRE(scan3.crossings.size() == 2);
    CHECK(scan3.crossings[1].location == CrossingLocation::Interior);
    CHECK(scan3.crossings[1].t == doctest::Approx(2.0 * kPi).epsilon(1e-9));
}

TEST_CASE("continuous crossing bands") {
    // eta1 has det(gamma - I) = 0 for every t
    const CrossingScan scan = detect_crossings(shear_path(1.0, 1.0));
    REQUIRE(scan.continuous_bands.size() == 1);
    CHECK(scan.continuous_bands[0].first == doctest::Approx(0.0));
    CHECK(scan.continuous_bands[0].second == doctest::Approx(1.0));

    // model generator with an imaginary pair: kernel jumps where the
    // rotation block closes up, at sqrt(-ad) t = 2 pi k
    const Generator g(1.0, 2.0, 1.0, -1.0);
    const CrossingScan scanm = detect_crossings(SymplecticPath(g, 10.0));
    REQUIRE(scanm.continuous_bands.size() == 1);
    bool found = false;
    for (const auto& c : scanm.crossings) {
        if (c.location == CrossingLocation::Interior) {
            CHECK(c.t == doctest::Approx(2.0 * kPi).epsilon(1e-8));
            CHECK(c.kernel_dim == 3);
            found = true;
        }
    }
    CHECK(found);
}

TEST_CASE("crossing forms") {
    // rotation at the start: form = I2
    auto [mp, mm] = crossing_form(rotation_path(kPi), 0.0);
    CHECK(mp == 2);
    CHECK(mm == 0);

    // hyperbolic diagonal path diag(e^{wt}, e^{-wt}) at t = 0: (1, 1)
    Mat hyp(2, 2);
    hyp << 1.3, 0.0, 0.0, -1.3;
    auto [hp, hm] = crossing_form(SymplecticPath(hyp, 2.0), 0.0);
    CHECK(hp == 1);
    CHECK(hm == 1);

    // negative shear at t = 0: form [[0,0],[0,1]]; degenerate along the
    // continuous crossing direction e1, no positive contribution there
    auto [sp, sm] = crossing_form(shear_path(-1.0, 1.0), 0.0);
    CHECK(sp == 1);
    CHECK(sm == 0);

    CHECK_THROWS_AS(crossing_form(rotation_path(kPi), 1.0), std::invalid_argument);
}

TEST_CASE("special path indices") {
    // eta1 -> -1, eta2 -> 0 (any T)
    CHECK(iota1(shear_path(1.0, 1.0)).iota1 == -1);
    CHECK(iota1(shear_path(1.0, 5.0)).iota1 == -1);
    CHECK(iota1(shear_path(-1.0, 1.0)).iota1 == 0);
    CHECK(iota1(shear_path(-1.0, 5.0)).iota1 == 0);

    // eta3 on (0, 2pi] -> 1, on (2pi, 4pi] -> 3
    CHECK(iota1(rotation_path(0.5)).iota1 == 1);
    CHECK(iota1(rotation_path(kPi)).iota1 == 1);
    CHECK(iota1(rotation_path(2.0 * kPi)).iota1 == 1);
    CHECK(iota1(rotation_path(2.5 * kPi)).iota1 == 3);
    CHECK(iota1(rotation_path(3.0 * kPi)).iota1 == 3);
    CHECK(iota1(rotation_path(4.0 * kPi)).iota1 == 3);

    // constant identity paths: clm = 0, iota1 = -n
    const IndexResult c1 = iota1(constant_identity_path(1.0, 1));
    CHECK(c1.clm == 0);
    CHECK(c1.iota1 == -1);
    const IndexResult c2 = iota1(constant_identity_path(3.0, 2));
    CHECK(c2.iota1 == -2);
}

TEST_CASE("clm examples") {
    CHECK(clm_index(rotation_path(2.0 * kPi)) == 2);
    CHECK(clm_index(constant_identity_path(2.0, 1)) == 0);

    // nilpotent block path, b = 0, c > 0: clm = 2
    {
        Mat a = Mat::Zero(4, 4);
        a(2, 0) = 1.0;  // a = 1
        a(3, 1) = 1.0;  // c = 1
        CHECK(clm_index(SymplecticPath(a, 1.0)) == 2);
    }
    // b = 0, c <= 0: clm = 1
    {
        Mat a = Mat::Zero(4, 4);
        a(2, 0) = 1.0;
        a(3, 1) = -1.0;
        CHECK(clm_index(SymplecticPath(a, 1.0)) == 1);
    }
}

TEST_CASE("index relation clm - n = iota1") {
    std::mt19937_64 eng(41);
    for (int rep = 0; rep < 10; ++rep) {
        const Generator g(test::uniform(eng, 0.2, 4.0), test::uniform(eng, -3.0, 3.0),
                          test::uniform(eng, -3.0, 3.0), test::uniform(eng, -3.0, 3.0));
        const SymplecticPath path(g, test::uniform(eng, 1.0, 8.0));
        const IndexResult r = iota1(path);
        CHECK(r.clm - path.half_dim() == r.iota1);
        CHECK(r.clm == clm_index(path));
    }
}

TEST_CASE("zhu formula on nilpotent block paths") {
    auto euclid_d0 = [](double b, double c) {
        Mat a = Mat::Zero(4, 4);
        a(0, 1) = b;
        a(2, 0) = 1.0;
        a(3, 1) = c;
        a(3, 2) = -b;
        return SymplecticPath(a, 1.0);
    };
    CHECK(zhu_index(euclid_d0(0.0, -1.0)) == 1);  // 1 - 0 + 2 - 2
    CHECK(zhu_index(euclid_d0(0.0, 0.0)) == 1);
    CHECK(zhu_index(euclid_d0(0.0, 2.0)) == 2);   // 2 - 0 + 2 - 2
    CHECK(zhu_index(euclid_d0(1.5, 1.0)) == 2);   // 1 - 0 + 2 - 1
    CHECK(zhu_index(euclid_d0(-0.7, -2.0)) == 2);

    // agreement with the crossing-count index on random block paths
    std::mt19937_64 eng(43);
    for (int rep = 0; rep < 8; ++rep) {
        const double b = test::uniform(eng, -2.0, 2.0);
        const double c = test::uniform(eng, -2.0, 2.0);
        const SymplecticPath p = euclid_d0(b, c);
        CHECK(zhu_index(p) == clm_index(p));
    }

    // block structure violated
    CHECK_THROWS_AS(zhu_index(SymplecticPath(Generator(1, 0, 1, -1).matrix(), 1.0)),
                    std::invalid_argument);
}

TEST_CASE("conjugation invariance") {
    std::mt19937_64 eng(47);
    for (int rep = 0; rep < 6; ++rep) {
        const Generator g(test::uniform(eng, 0.3, 3.0), test::uniform(eng, -2.0, 2.0),
                          test::uniform(eng, -2.0, 2.0), test::uniform(eng, -2.0, 2.0));
        const double T = test::uniform(eng, 1.0, 6.0);
        const Mat s = test::random_symplectic(eng, 2, 0.6);
        const Mat s_inv = s.partialPivLu().inverse();
        const int direct = iota1(SymplecticPath(g, T)).iota1;
        const int conj = iota1(SymplecticPath((s_inv * g.matrix() * s).eval(), T)).iota1;
        CHECK(direct == conj);
    }
}

TEST_CASE("diamond additivity") {
    std::mt19937_64 eng(53);
    for (int rep = 0; rep < 6; ++rep) {
        // two planar generators J*S with S symmetric
        const Mat a1 = standard_j(1) * test::random_symmetric(eng, 2, 1.2);
        const Mat a2 = standard_j(1) * test::random_symmetric(eng, 2, 1.2);
        const double T = test::uniform(eng, 1.0, 5.0);
        const int i1 = iota1(SymplecticPath(a1, T)).iota1;
        const int i2 = iota1(SymplecticPath(a2, T)).iota1;
        const int joint = iota1(SymplecticPath(diamond_product(a1, a2), T)).iota1;
        CHECK(joint == i1 + i2);
    }
}

TEST_CASE("path additivity at split points") {
    // regular path: eta3 on [0, 3 pi], split at an ordinary point and at a crossing
    const SymplecticPath rot = rotation_path(3.0 * kPi);
    const int whole = detail::clm_segment(rot, 0.0, 3.0 * kPi);
    for (double c : {1.0, kPi, 2.0 * kPi, 7.5}) {
        const int a = detail::clm_segment(rot, 0.0, c);
        const int b = detail::clm_segment(rot, c, 3.0 * kPi);
        CHECK(a + b == whole);
    }

    // degenerate path: additivity of the perturbed evaluation at fixed eps
    const Generator g(1.0, 2.0, 1.0, -1.0);
    const SymplecticPath path(g, 10.0);
    const double eps = 1e-5;
    const auto whole_p = detail::clm_segment_perturbed(path, eps, 0.0, 10.0);
    REQUIRE(whole_p.has_value());
    for (double c : {2.0, 5.5, 8.0}) {
        const auto a = detail::clm_segment_perturbed(path, eps, 0.0, c);
        const auto b = detail::clm_segment_perturbed(path, eps, c, 10.0);
        REQUIRE(a.has_value());
        REQUIRE(b.has_value());
        CHECK(*a + *b == *whole_p);
    }
}

TEST_CASE("epsilon stability") {
    const Generator g(1.0, 2.0, 1.0, -1.0);
    const SymplecticPath path(g, 2.0 * kPi);
    const IndexResult r = iota1(path);
    CHECK(r.epsilon_used > 0.0);
    // the stabilized integer holds across [eps, 4 eps]
    for (double f : {1.0, 2.0, 4.0}) {
        const auto v = detail::clm_segment_perturbed(path, f * r.epsilon_used, 0.0, 2.0 * kPi);
        REQUIRE(v.has_value());
        CHECK(*v == r.clm);
    }
}

TEST_CASE("sampled table paths") {
    // table built from the rotation flow gives the same index
    std::vector<double> ts;
    std::vector<Mat> ms;
    const int steps = 2048;
    const double T = 3.0 * kPi;
    for (int i = 0; i <= steps; ++i) {
        const double t = T * i / steps;
        Mat r(2, 2);
        r << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
        ts.push_back(t);
        ms.push_back(r);
    }
    const SymplecticPath table(ts, ms);
    CHECK_FALSE(table.autonomous());
    CHECK(iota1(table).iota1 == 3);
}
