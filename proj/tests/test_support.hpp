// Shared helpers for the test suites: deterministic random matrices and a few
// canonical paths.

#pragma once

#include "symorb/linalg.hpp"
#include "symorb/maslov.hpp"

#include <random>

namespace symorb::test {

inline double uniform(std::mt19937_64& eng, double lo, double hi) {
    const double u = static_cast<double>(eng() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
}

inline Mat random_symmetric(std::mt19937_64& eng, int dim, double scale = 1.0) {
    Mat s(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = i; j < dim; ++j) s(i, j) = s(j, i) = uniform(eng, -scale, scale);
    return s;
}

// Random symplectic matrix as the time-1 flow of a random Hamiltonian field.
inline Mat random_symplectic(std::mt19937_64& eng, int n, double scale = 1.0) {
    const Mat s = random_symmetric(eng, 2 * n, scale);
    return matrix_exponential(standard_j(n) * s, 1.0);
}

// Planar rotation path generator: gamma(t) = R(t).
inline Mat rotation_generator() {
    Mat j(2, 2);
    j << 0.0, -1.0, 1.0, 0.0;
    return j;
}

// Shear path generators: eta1(t) = [[1, t], [0, 1]], eta2(t) = [[1, -t], [0, 1]].
inline Mat shear_generator(double rate) {
    Mat a = Mat::Zero(2, 2);
    a(0, 1) = rate;
    return a;
}

}  // namespace symorb::test
