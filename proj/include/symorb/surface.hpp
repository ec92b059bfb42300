// surface.hpp — power-law central force problem on the sphere, the hyperbolic
// plane and the Euclidean plane: conformal factors, circular-orbit data, the
// linearization coefficients (a, b, c, d), parameter-plane regions, stability
// verdicts and radial distance utilities. Everything is in normalized units
// (unit radius, unit mass, rescaled time); the physical radius R enters only
// through the distance helpers.

#pragma once

#include "symorb/closed_form.hpp"
#include "symorb/linalg.hpp"

#include <string>
#include <variant>
#include <vector>

namespace symorb {

enum class SurfaceKind { Sphere, Hyperbolic, Euclidean };

std::string to_string(SurfaceKind s);

struct ModelPoint {
    SurfaceKind surface{SurfaceKind::Euclidean};
    double xi0{1.0};   // normalized radius
    double alpha{-1.0};  // power-law exponent
};

struct inadmissible_point : std::domain_error {
    explicit inadmissible_point(std::string what_constraint);
    std::string constraint;
};

// Radial conformal factor p(xi) of the kinetic term and potential q(xi).
double conformal_factor(SurfaceKind s, double xi);
double potential(SurfaceKind s, double xi, double alpha);

// Circular-orbit data at a model point: angular velocity squared, prime
// period, linearization coefficients and the scalar quantities they come
// from. Coefficients are computed twice (surface-specific closed forms and
// the generic derivative pipeline) and must agree to 1e-10 relative.
struct CircularOrbit {
    ModelPoint point;
    double theta_dot_sq{0.0};
    double T{0.0};
    double a{0.0}, b{0.0}, c{0.0}, d{0.0};
    double p0{0.0}, p0d{0.0}, p0dd{0.0};
    double q0{0.0}, q0d{0.0}, q0dd{0.0};
    double eta0{0.0}, eta0d{0.0}, eta0dd{0.0};
    double zeta0{0.0};

    Generator generator() const { return Generator(a, b, c, d); }
};

CircularOrbit orbit_data(const ModelPoint& pt);

enum class Stability {
    LinearlyStable,
    UnstableJordan,
    UnstableHyperbolic,
    UnstableNilpotent,
};

std::string to_string(Stability s);

// Verdict from the coefficient signs: d < 0 splits on cd + b^2 (zero gives a
// semisimple unit block, stable; nonzero a shear block, unstable), d > 0 is
// hyperbolic, d = 0 is nilpotent polynomial growth.
Stability stability_verdict(double a, double b, double c, double d);

struct RegionLabel {
    std::string name;   // e.g. "Omega1,1^{+,-}", "Omega3,2^+", "Euclid,0^+"
    int index{0};
    int k{-1};          // rotation count, -1 when not applicable
    Stability stability{Stability::UnstableJordan};
};

struct OnBoundary {
    std::string curve;  // separatrix the point is within tolerance of
};

using RegionResult = std::variant<RegionLabel, OnBoundary>;

// Region of the (xi, alpha) parameter plane. Points within 1e-9 of a
// separatrix (in the separatrix function value) come back as OnBoundary.
// The attached index is cross-checked against the closed-form table.
RegionResult region_classify(const ModelPoint& pt);

struct BoundaryCurve {
    std::string name;
    std::vector<std::pair<double, double>> points;  // (xi, alpha)
};

// Separatrix polylines clipped to the given window.
std::vector<BoundaryCurve> boundary_curves(SurfaceKind s, std::pair<double, double> xi_range,
                                           std::pair<double, double> alpha_range, int resolution);

// Region functions. Signs of f1/g1 are opposite to the sign of d; signs of
// f2/g2 match cd + b^2; f3/g3 equal sqrt(-ad)*T / 2pi on the d < 0 regions.
double sphere_f1(double xi, double alpha);
double sphere_f2(double xi, double alpha);
double sphere_f3(double xi, double alpha);
double sphere_h(double xi);  // alpha = h(xi) is the d = 0 curve
double hyper_g1(double xi, double alpha);
double hyper_g2(double xi, double alpha);
double hyper_g3(double xi, double alpha);

// Riemannian distance from the origin to radius r on the surface of size R:
// closed form, and an adaptive quadrature of the metric factor which must
// agree to 1e-8 relative.
double riemann_distance(SurfaceKind s, double r, double R);
double riemann_distance_quadrature(SurfaceKind s, double r, double R);

// Metric factor mu_R(r) integrated by the quadrature (2R^2/(R^2 +/- r^2)).
double metric_factor(SurfaceKind s, double r, double R);

}  // namespace symorb
