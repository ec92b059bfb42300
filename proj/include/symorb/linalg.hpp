// linalg.hpp — small dense symplectic linear algebra: the standard structure J,
// the symplectic form, membership tests, the diamond product, matrix exponentials
// and the eigenstructure of the 4x4 model generator.

#pragma once

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>

namespace symorb {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Standard complex structure on R^{2n}: J = [[0, -I_n], [I_n, 0]].
// Satisfies J^2 = -I and J^T = -J.
Mat standard_j(int n);

// Symplectic form with the convention omega(u, v) = <J u, v>.
// For n = 1 this gives omega(e1, e2) = ... <Je1, e2> = <e2, e2> = 1.
double omega_product(const Vec& u, const Vec& v);

// True iff ||M^T J M - J||_inf <= tol. Throws on odd dimension.
bool is_symplectic(const Mat& m, double tol = 1e-9);

// Residual ||M^T J M - J||_inf scaled by max(1, ||M||_inf^2); useful for paths
// whose norm grows exponentially, where an absolute test is meaningless.
double symplectic_residual(const Mat& m);

// Block interleaving of two even-dimensional square matrices:
//   [[A1, B1], [C1, D1]] <> [[A2, B2], [C2, D2]] =
//   [[A1, 0, B1, 0], [0, A2, 0, B2], [C1, 0, D1, 0], [0, C2, 0, D2]]
// with the half-dimension split of each factor.
Mat diamond_product(const Mat& m1, const Mat& m2);

// e^{A t} by scaling-and-squaring with a diagonal Pade(6) approximant.
Mat matrix_exponential(const Mat& a, double t = 1.0);

// Autonomous linearization generator
//   A = [[0, b, d, 0], [0, 0, 0, 0], [a, 0, 0, 0], [0, c, -b, 0]],
// a > 0. -J*A is symmetric by construction. Its characteristic polynomial is
// lambda^2 (lambda^2 - a d), so the flow e^{A t} has the closed form
//   I + t A + c2(t) A^2 + c3(t) A^3
// used by flow() below; c2, c3 depend only on a*d.
struct Generator {
    double a{1.0};
    double b{0.0};
    double c{0.0};
    double d{0.0};

    Generator() = default;
    Generator(double a_, double b_, double c_, double d_);

    Mat matrix() const;                 // the 4x4 matrix A
    double jordan_discriminant() const { return b * b + c * d; }
    bool zero_semisimple() const;       // |b^2 + cd| below 1e-12 * max(1, b^2, |cd|)
    double scale() const;               // max coefficient magnitude, >= 1

    // Exact flow e^{A t}; cheap (no Pade), valid for any t.
    Mat flow(double t) const;
};

enum class PairKind { Imaginary, Real, None };

// Spectrum summary of a Generator: eigenvalues are {0, 0} plus
// +/- i sqrt(-ad) (d < 0), +/- sqrt(ad) (d > 0), or 0 again (d = 0).
struct EigenStructure {
    int zero_multiplicity{2};   // 4 iff d = 0
    bool zero_semisimple{false};
    PairKind pair{PairKind::None};
    double pair_magnitude{0.0}; // sqrt(|a d|), 0 when d = 0
};

EigenStructure eigen_structure(const Generator& g);

}  // namespace symorb
