#include "symorb/linalg.hpp"

#include <cmath>

namespace symorb {

namespace {

void require_even_square(const Mat& m, const char* who) {
    if (m.rows() != m.cols() || m.rows() == 0 || m.rows() % 2 != 0) {
        throw std::invalid_argument(std::string(who) + ": matrix must be square of even dimension");
    }
    if (!m.allFinite()) {
        throw std::invalid_argument(std::string(who) + ": non-finite entries");
    }
}

}  // namespace

Mat standard_j(int n) {
    if (n <= 0) throw std::invalid_argument("standard_j: n must be positive");
    Mat j = Mat::Zero(2 * n, 2 * n);
    j.topRightCorner(n, n) = -Mat::Identity(n, n);
    j.bottomLeftCorner(n, n) = Mat::Identity(n, n);
    return j;
}

double omega_product(const Vec& u, const Vec& v) {
    if (u.size() != v.size() || u.size() == 0 || u.size() % 2 != 0) {
        throw std::invalid_argument("omega_product: vectors must have equal even length");
    }
    const int n = static_cast<int>(u.size()) / 2;
    // <J u, v> without forming J: (Ju) = (-u_tail, u_head).
    return -u.tail(n).dot(v.head(n)) + u.head(n).dot(v.tail(n));
}

bool is_symplectic(const Mat& m, double tol) {
    require_even_square(m, "is_symplectic");
    const Mat j = standard_j(static_cast<int>(m.rows()) / 2);
    return ((m.transpose() * j * m - j).cwiseAbs().maxCoeff()) <= tol;
}

double symplectic_residual(const Mat& m) {
    require_even_square(m, "symplectic_residual");
    const Mat j = standard_j(static_cast<int>(m.rows()) / 2);
    const double r = (m.transpose() * j * m - j).cwiseAbs().maxCoeff();
    const double s = m.cwiseAbs().maxCoeff();
    return r / std::max(1.0, s * s);
}

Mat diamond_product(const Mat& m1, const Mat& m2) {
    require_even_square(m1, "diamond_product");
    require_even_square(m2, "diamond_product");
    const int p = static_cast<int>(m1.rows()) / 2;
    const int q = static_cast<int>(m2.rows()) / 2;
    Mat out = Mat::Zero(2 * (p + q), 2 * (p + q));
    out.block(0, 0, p, p) = m1.block(0, 0, p, p);
    out.block(0, p + q, p, p) = m1.block(0, p, p, p);
    out.block(p + q, 0, p, p) = m1.block(p, 0, p, p);
    out.block(p + q, p + q, p, p) = m1.block(p, p, p, p);
    out.block(p, p, q, q) = m2.block(0, 0, q, q);
    out.block(p, p + q + p, q, q) = m2.block(0, q, q, q);
    out.block(p + q + p, p, q, q) = m2.block(q, 0, q, q);
    out.block(p + q + p, p + q + p, q, q) = m2.block(q, q, q, q);
    return out;
}

Mat matrix_exponential(const Mat& a, double t) {
    if (a.rows() != a.cols() || a.rows() == 0) {
        throw std::invalid_argument("matrix_exponential: matrix must be square");
    }
    if (!a.allFinite() || !std::isfinite(t)) {
        throw std::invalid_argument("matrix_exponential: non-finite input");
    }
    const int n = static_cast<int>(a.rows());
    Mat m = a * t;
    const double norm = m.cwiseAbs().rowwise().sum().maxCoeff();  // inf-norm
    int squarings = 0;
    if (norm > 0.5) {
        squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
        m /= std::pow(2.0, squarings);
    }

    // Diagonal Pade(6): N(x) = sum b_k x^k, e^x ~ N(x)/N(-x).
    static const double b[7] = {1.0,         1.0 / 2.0,     5.0 / 44.0, 1.0 / 66.0,
                                1.0 / 792.0, 1.0 / 15840.0, 1.0 / 665280.0};
    const Mat m2 = m * m;
    const Mat m4 = m2 * m2;
    const Mat m6 = m4 * m2;
    const Mat even = b[0] * Mat::Identity(n, n) + b[2] * m2 + b[4] * m4 + b[6] * m6;
    const Mat odd = m * (b[1] * Mat::Identity(n, n) + b[3] * m2 + b[5] * m4);
    Mat r = (even - odd).partialPivLu().solve(even + odd);
    for (int i = 0; i < squarings; ++i) r = (r * r).eval();
    return r;
}

Generator::Generator(double a_, double b_, double c_, double d_) : a(a_), b(b_), c(c_), d(d_) {
    if (!(std::isfinite(a) && std::isfinite(b) && std::isfinite(c) && std::isfinite(d))) {
        throw std::invalid_argument("Generator: non-finite coefficient");
    }
    if (a <= 0.0) throw std::invalid_argument("Generator: a must be positive");
}

Mat Generator::matrix() const {
    Mat m = Mat::Zero(4, 4);
    m(0, 1) = b;
    m(0, 2) = d;
    m(2, 0) = a;
    m(3, 1) = c;
    m(3, 2) = -b;
    return m;
}

bool Generator::zero_semisimple() const {
    const double s = jordan_discriminant();
    return std::abs(s) <= 1e-12 * std::max({1.0, b * b, std::abs(c * d)});
}

double Generator::scale() const {
    return std::max({1.0, std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
}

namespace {

// h2(u) = (cosh(sqrt(u)) - 1)/u and h3(u) = (sinh(sqrt(u)) - sqrt(u))/u^{3/2},
// both analytic in u; series for small |u|, closed form otherwise.
void flow_coeffs(double u, double& h2, double& h3) {
    if (std::abs(u) < 0.25) {
        // sum u^k / (2k+2)! and u^k / (2k+3)!
        double term2 = 0.5, term3 = 1.0 / 6.0;
        h2 = term2;
        h3 = term3;
        for (int k = 1; k <= 10; ++k) {
            term2 *= u / ((2.0 * k + 1.0) * (2.0 * k + 2.0));
            term3 *= u / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
            h2 += term2;
            h3 += term3;
        }
        return;
    }
    if (u > 0.0) {
        const double w = std::sqrt(u);
        h2 = (std::cosh(w) - 1.0) / u;
        h3 = (std::sinh(w) - w) / (u * w);
    } else {
        const double w = std::sqrt(-u);
        h2 = (1.0 - std::cos(w)) / (-u);
        h3 = (w - std::sin(w)) / (-u * w);
    }
}

}  // namespace

Mat Generator::flow(double t) const {
    // Minimal polynomial of A divides lambda^2 (lambda^2 - ad), so Hermite
    // interpolation of exp on that spectrum is exact:
    //   e^{A t} = I + t A + t^2 h2(ad t^2) A^2 + t^3 h3(ad t^2) A^3.
    const double u = a * d * t * t;
    double h2 = 0.0, h3 = 0.0;
    flow_coeffs(u, h2, h3);
    const double c2 = t * t * h2;
    const double c3 = t * t * t * h3;

    // A^2 and A^3 have few nonzeros; fill directly.
    Mat out = Mat::Identity(4, 4);
    // t*A
    out(0, 1) += t * b;
    out(0, 2) += t * d;
    out(2, 0) += t * a;
    out(3, 1) += t * c;
    out(3, 2) += -t * b;
    // A^2 = [[ad,0,0,0],[0,0,0,0],[0,ab,ad,0],[-ab,0,0,0]] scaled by c2
    out(0, 0) += c2 * a * d;
    out(2, 1) += c2 * a * b;
    out(2, 2) += c2 * a * d;
    out(3, 0) += -c2 * a * b;
    // A^3 = [[0,abd,ad^2,0],[0,0,0,0],[a^2 d,0,0,0],[0,-ab^2,-abd,0]] scaled by c3
    out(0, 1) += c3 * a * b * d;
    out(0, 2) += c3 * a * d * d;
    out(2, 0) += c3 * a * a * d;
    out(3, 1) += -c3 * a * b * b;
    out(3, 2) += -c3 * a * b * d;
    return out;
}

EigenStructure eigen_structure(const Generator& g) {
    EigenStructure e;
    const double tol = 1e-12 * g.scale();
    const bool d_zero = std::abs(g.d) <= tol;
    e.zero_multiplicity = d_zero ? 4 : 2;
    e.zero_semisimple = g.zero_semisimple();
    if (d_zero) {
        e.pair = PairKind::None;
        e.pair_magnitude = 0.0;
    } else if (g.d < 0.0) {
        e.pair = PairKind::Imaginary;
        e.pair_magnitude = std::sqrt(-g.a * g.d);
    } else {
        e.pair = PairKind::Real;
        e.pair_magnitude = std::sqrt(g.a * g.d);
    }
    return e;
}

}  // namespace symorb
