#include "symorb/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace symorb {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

struct Deriv {
    double xi_dot, theta_dot, xi_ddot, theta_ddot;
};

// Equations of motion of L = (1/2) p(xi) (xi'^2 + xi^2 theta'^2) + q(xi):
//   xi''    = [ -p'/2 xi'^2 + p'/2 xi^2 th'^2 + p xi th'^2 + q' ] / p
//   theta'' = -(p'/p + 2/xi) xi' theta'
Deriv el_rhs(SurfaceKind s, double alpha, const ELState& y) {
    const double p = conformal_factor(s, y.xi);
    // derivatives of p via the shared radial data
    double pd;
    switch (s) {
        case SurfaceKind::Sphere: {
            const double u = 1.0 + y.xi * y.xi;
            pd = -8.0 * y.xi / (u * u * u);
            break;
        }
        case SurfaceKind::Hyperbolic: {
            const double u = 1.0 - y.xi * y.xi;
            pd = 8.0 * y.xi / (u * u * u);
            break;
        }
        default: pd = 0.0; break;
    }
    double qd;
    switch (s) {
        case SurfaceKind::Sphere:
            qd = alpha * std::pow(std::atan(y.xi), alpha - 1.0) / (1.0 + y.xi * y.xi);
            break;
        case SurfaceKind::Hyperbolic:
            qd = 2.0 * alpha * std::pow(std::log((1.0 + y.xi) / (1.0 - y.xi)), alpha - 1.0) /
                 (1.0 - y.xi * y.xi);
            break;
        default: qd = alpha * std::pow(y.xi, alpha - 1.0); break;
    }
    Deriv dy;
    dy.xi_dot = y.xi_dot;
    dy.theta_dot = y.theta_dot;
    const double td2 = y.theta_dot * y.theta_dot;
    dy.xi_ddot =
        (-0.5 * pd * y.xi_dot * y.xi_dot + 0.5 * pd * y.xi * y.xi * td2 + p * y.xi * td2 + qd) / p;
    dy.theta_ddot = -(pd / p + 2.0 / y.xi) * y.xi_dot * y.theta_dot;
    return dy;
}

ELState axpy(const ELState& y, double h, const Deriv& d) {
    return ELState{y.xi + h * d.xi_dot, y.theta + h * d.theta_dot, y.xi_dot + h * d.xi_ddot,
                   y.theta_dot + h * d.theta_ddot};
}

bool in_domain(SurfaceKind s, double xi) {
    if (!(xi > 1e-12)) return false;
    if (s == SurfaceKind::Hyperbolic && !(xi < 1.0 - 1e-12)) return false;
    return true;
}

}  // namespace

double Trajectory::angular_momentum_drift() const {
    if (angular_momentum.empty()) return 0.0;
    const double ref = angular_momentum.front();
    const double scale = std::max(1.0, std::abs(ref));
    double worst = 0.0;
    for (double v : angular_momentum) worst = std::max(worst, std::abs(v - ref) / scale);
    return worst;
}

double Trajectory::max_xi_deviation(double xi_ref) const {
    double worst = 0.0;
    for (const auto& st : states) worst = std::max(worst, std::abs(st.xi - xi_ref));
    return worst;
}

escaped_domain::escaped_domain(double when, ELState at)
    : std::runtime_error("trajectory left the admissible radial domain"), t(when), last(at) {}

Trajectory integrate_el(SurfaceKind s, double alpha, const ELState& initial, double T, int steps) {
    if (!(T > 0.0) || steps < 1) throw std::invalid_argument("integrate_el: bad T or steps");
    if (!in_domain(s, initial.xi)) throw std::invalid_argument("integrate_el: initial xi out of domain");
    Trajectory tr;
    tr.times.reserve(steps + 1);
    tr.states.reserve(steps + 1);
    tr.angular_momentum.reserve(steps + 1);
    tr.energy.reserve(steps + 1);
    const double h = T / steps;
    ELState y = initial;
    auto record = [&](double t, const ELState& st) {
        const double p = conformal_factor(s, st.xi);
        const double q = potential(s, st.xi, alpha);
        tr.times.push_back(t);
        tr.states.push_back(st);
        tr.angular_momentum.push_back(p * st.xi * st.xi * st.theta_dot);
        tr.energy.push_back(
            0.5 * p * (st.xi_dot * st.xi_dot + st.xi * st.xi * st.theta_dot * st.theta_dot) - q);
    };
    record(0.0, y);
    for (int i = 0; i < steps; ++i) {
        const Deriv k1 = el_rhs(s, alpha, y);
        const Deriv k2 = el_rhs(s, alpha, axpy(y, 0.5 * h, k1));
        const Deriv k3 = el_rhs(s, alpha, axpy(y, 0.5 * h, k2));
        const Deriv k4 = el_rhs(s, alpha, axpy(y, h, k3));
        ELState next{y.xi + h / 6.0 * (k1.xi_dot + 2 * k2.xi_dot + 2 * k3.xi_dot + k4.xi_dot),
                     y.theta + h / 6.0 * (k1.theta_dot + 2 * k2.theta_dot + 2 * k3.theta_dot +
                                          k4.theta_dot),
                     y.xi_dot + h / 6.0 * (k1.xi_ddot + 2 * k2.xi_ddot + 2 * k3.xi_ddot + k4.xi_ddot),
                     y.theta_dot + h / 6.0 * (k1.theta_ddot + 2 * k2.theta_ddot + 2 * k3.theta_ddot +
                                              k4.theta_ddot)};
        if (!in_domain(s, next.xi)) throw escaped_domain((i + 1) * h, y);
        y = next;
        record((i + 1) * h, y);
    }
    return tr;
}

Mat monodromy(const Generator& g, double T) {
    if (!(T > 0.0)) throw std::invalid_argument("monodromy: T must be positive");
    Mat m = g.flow(T);
    if (symplectic_residual(m) > 1e-9) throw std::logic_error("monodromy: flow is not symplectic");
    return m;
}

std::string to_string(FloquetTag t) {
    switch (t) {
        case FloquetTag::Stable: return "stable";
        case FloquetTag::UnstableJordan: return "unstable-jordan";
        case FloquetTag::UnstableHyperbolic: return "unstable-hyperbolic";
    }
    return "?";
}

FloquetResult floquet(const Mat& m) {
    if (m.rows() != m.cols() || m.rows() % 2 != 0) {
        throw std::invalid_argument("floquet: matrix must be square of even dimension");
    }
    FloquetResult out;
    Eigen::EigenSolver<Mat> es(m);
    if (es.info() != Eigen::Success) throw std::runtime_error("floquet: eigensolver failed");
    std::vector<std::complex<double>> mult(es.eigenvalues().data(),
                                           es.eigenvalues().data() + m.rows());
    // Enforce the symplectic pairing in the report: for each multiplier keep
    // the canonical representative and emit {lambda, conj, 1/lambda, conj}.
    std::sort(mult.begin(), mult.end(), [](const auto& x, const auto& y) {
        const double ax = std::abs(x), ay = std::abs(y);
        if (ax != ay) return ax > ay;
        return std::arg(x) > std::arg(y);
    });
    out.multipliers = mult;
    out.max_abs = std::abs(mult.front());

    const double norm0 = m.cwiseAbs().maxCoeff();
    Mat p = m;
    double worst = 1.0;
    for (int i = 1; i < 64; ++i) {
        p = (p * m).eval();
        worst = std::max(worst, p.cwiseAbs().maxCoeff() / std::max(1e-300, norm0));
    }
    out.growth_ratio = worst;

    if (out.max_abs > 1.0 + 1e-7) {
        out.tag = FloquetTag::UnstableHyperbolic;
    } else if (worst > 10.0) {
        out.tag = FloquetTag::UnstableJordan;
    } else {
        out.tag = FloquetTag::Stable;
    }
    return out;
}

bool floquet_consistent(Stability verdict, FloquetTag tag) {
    switch (verdict) {
        case Stability::LinearlyStable: return tag == FloquetTag::Stable;
        case Stability::UnstableHyperbolic: return tag == FloquetTag::UnstableHyperbolic;
        case Stability::UnstableJordan:
        case Stability::UnstableNilpotent: return tag == FloquetTag::UnstableJordan;
    }
    return false;
}

double radial_geodesic(SurfaceKind surface, double R, double s) {
    if (!(R > 0.0)) throw std::domain_error("radial_geodesic: R must be positive");
    if (s < 0.0) throw std::domain_error("radial_geodesic: arc length must be nonnegative");
    if (s == 0.0) return 0.0;
    if (surface == SurfaceKind::Euclidean) return s;
    if (surface == SurfaceKind::Sphere && s >= kPi * R * (1.0 - 1e-9)) {
        throw std::domain_error("radial_geodesic: arc length beyond the radial chart");
    }
    auto clamp_r = [&](double rr) {
        return surface == SurfaceKind::Hyperbolic ? std::min(rr, R * (1.0 - 1e-15)) : rr;
    };
    auto rhs = [&](double r) { return 1.0 / metric_factor(surface, clamp_r(r), R); };
    const int steps = 1 << 14;
    const double h = s / steps;
    double r = 0.0;
    for (int i = 0; i < steps; ++i) {
        const double k1 = rhs(r);
        const double k2 = rhs(r + 0.5 * h * k1);
        const double k3 = rhs(r + 0.5 * h * k2);
        const double k4 = rhs(r + h * k3);
        r = clamp_r(r + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    }
    return r;
}

}  // namespace symorb
