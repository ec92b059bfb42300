// dynamics.hpp — time integration of the planar central-force flow, monodromy
// matrices of the linearized system, multiplier readings, and the radial
// geodesic ODE.

#pragma once

#include "symorb/linalg.hpp"
#include "symorb/surface.hpp"

#include <complex>
#include <vector>

namespace symorb {

struct ELState {
    double xi{1.0};
    double theta{0.0};
    double xi_dot{0.0};
    double theta_dot{0.0};
};

struct Trajectory {
    std::vector<double> times;
    std::vector<ELState> states;
    std::vector<double> angular_momentum;  // p(xi) xi^2 theta_dot, conserved
    std::vector<double> energy;            // (1/2) p |v|^2 - q, conserved

    double angular_momentum_drift() const;  // max relative deviation from start
    double max_xi_deviation(double xi_ref) const;
};

struct escaped_domain : std::runtime_error {
    escaped_domain(double when, ELState at);
    double t;
    ELState last;
};

// Fixed-step RK4 integration of the radial/angular equations of motion.
// Stops with escaped_domain if xi leaves the admissible interval.
Trajectory integrate_el(SurfaceKind s, double alpha, const ELState& initial, double T, int steps);

// Flow of the linearized system at the period: e^{A T}, checked symplectic.
Mat monodromy(const Generator& g, double T);

enum class FloquetTag { Stable, UnstableJordan, UnstableHyperbolic };

std::string to_string(FloquetTag t);

struct FloquetResult {
    std::vector<std::complex<double>> multipliers;  // sorted by |.| descending
    FloquetTag tag{FloquetTag::Stable};
    double max_abs{1.0};
    double growth_ratio{1.0};  // max_n ||M^n|| / ||M|| over n <= 64
};

// Multipliers of a period map with the symplectic pairing enforced in the
// report; spectrum on the unit circle is classified by power growth.
FloquetResult floquet(const Mat& m);

// True when a coefficient-level verdict and a multiplier-level tag tell the
// same story.
bool floquet_consistent(Stability verdict, FloquetTag tag);

// Radius r reached after arc length s along a radial geodesic: integrates the
// unit-speed condition mu_R(r) dr/ds = 1 by RK4.
double radial_geodesic(SurfaceKind surface, double R, double s);

}  // namespace symorb
