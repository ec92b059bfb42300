#include "symorb/surface.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

namespace symorb {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kBoundaryTol = 1e-9;  // separatrix-value tolerance

double hyper_log(double xi) { return std::log((1.0 + xi) / (1.0 - xi)); }

void check_domain(SurfaceKind s, double xi) {
    switch (s) {
        case SurfaceKind::Sphere:
        case SurfaceKind::Euclidean:
            if (!(xi > 0.0)) throw std::domain_error("xi must be positive");
            break;
        case SurfaceKind::Hyperbolic:
            if (!(xi > 0.0 && xi < 1.0)) throw std::domain_error("xi must lie in (0,1)");
            break;
    }
}

struct RadialData {
    double p, pd, pdd;   // conformal factor and xi-derivatives
    double q, qd, qdd;   // potential and xi-derivatives
};

RadialData radial_data(SurfaceKind s, double xi, double alpha) {
    RadialData r{};
    switch (s) {
        case SurfaceKind::Sphere: {
            const double u = 1.0 + xi * xi;
            r.p = 2.0 / (u * u);
            r.pd = -8.0 * xi / (u * u * u);
            r.pdd = 8.0 * (5.0 * xi * xi - 1.0) / (u * u * u * u);
            const double F = std::atan(xi);
            r.q = std::pow(F, alpha);
            r.qd = alpha * std::pow(F, alpha - 1.0) / u;
            r.qdd = (alpha * (alpha - 1.0) * std::pow(F, alpha - 2.0) -
                     2.0 * alpha * xi * std::pow(F, alpha - 1.0)) /
                    (u * u);
            break;
        }
        case SurfaceKind::Hyperbolic: {
            const double u = 1.0 - xi * xi;
            r.p = 2.0 / (u * u);
            r.pd = 8.0 * xi / (u * u * u);
            r.pdd = (8.0 + 40.0 * xi * xi) / (u * u * u * u);
            const double G = hyper_log(xi);
            r.q = std::pow(G, alpha);
            r.qd = 2.0 * alpha * std::pow(G, alpha - 1.0) / u;
            r.qdd = (4.0 * alpha * (alpha - 1.0) * std::pow(G, alpha - 2.0) +
                     4.0 * alpha * xi * std::pow(G, alpha - 1.0)) /
                    (u * u);
            break;
        }
        case SurfaceKind::Euclidean:
            r.p = 1.0;
            r.pd = 0.0;
            r.pdd = 0.0;
            r.q = std::pow(xi, alpha);
            r.qd = alpha * std::pow(xi, alpha - 1.0);
            r.qdd = alpha * (alpha - 1.0) * std::pow(xi, alpha - 2.0);
            break;
    }
    return r;
}

void check_admissible(const ModelPoint& pt) {
    check_domain(pt.surface, pt.xi0);
    if (pt.alpha == 0.0) throw inadmissible_point("alpha must be nonzero");
    switch (pt.surface) {
        case SurfaceKind::Sphere:
            if (pt.alpha > 0.0 && !(pt.xi0 > 1.0))
                throw inadmissible_point("sphere with alpha > 0 requires xi0 > 1");
            if (pt.alpha < 0.0 && !(pt.xi0 < 1.0))
                throw inadmissible_point("sphere with alpha < 0 requires xi0 in (0,1)");
            break;
        case SurfaceKind::Hyperbolic:
            if (!(pt.alpha < 0.0)) throw inadmissible_point("hyperbolic surface requires alpha < 0");
            break;
        case SurfaceKind::Euclidean:
            if (!(pt.alpha < 0.0)) throw inadmissible_point("euclidean plane requires alpha < 0");
            break;
    }
}

// Printed per-surface closed forms for (a, b, c, d); the generic pipeline
// must reproduce them.
void closed_form_coeffs(const ModelPoint& pt, double& a, double& b, double& c, double& d) {
    const double xi = pt.xi0, al = pt.alpha;
    switch (pt.surface) {
        case SurfaceKind::Sphere: {
            const double F = std::atan(xi);
            const double u = 1.0 + xi * xi;
            a = u * u / 2.0;
            c = u * u / (2.0 * xi * xi);
            b = (2.0 - 2.0 * xi * xi) / xi *
                std::sqrt(-al * std::pow(F, al - 1.0) / (2.0 * xi * (1.0 - xi * xi)));
            d = al * std::pow(F, al - 2.0) *
                ((3.0 * std::pow(xi, 4) - 2.0 * xi * xi + 3.0) * F +
                 (al - 1.0) * xi * (1.0 - xi * xi)) /
                (xi * u * u * (1.0 - xi * xi));
            break;
        }
        case SurfaceKind::Hyperbolic: {
            const double G = hyper_log(xi);
            const double u = 1.0 - xi * xi;
            const double w = 1.0 + xi * xi;
            a = u * u / 2.0;
            c = u * u / (2.0 * xi * xi);
            b = 2.0 * w / xi * std::sqrt(-al * std::pow(G, al - 1.0) / (xi * w));
            d = 2.0 * al * std::pow(G, al - 2.0) *
                ((3.0 * std::pow(xi, 4) + 2.0 * xi * xi + 3.0) * G + 2.0 * (al - 1.0) * xi * w) /
                (xi * u * u * w);
            break;
        }
        case SurfaceKind::Euclidean:
            a = 1.0;
            b = 2.0 / xi * std::sqrt(-al * std::pow(xi, al - 2.0));
            c = 1.0 / (xi * xi);
            d = al * (al + 2.0) * std::pow(xi, al - 2.0);
            break;
    }
}

double rel_diff(double x, double y) {
    return std::abs(x - y) / std::max({1.0, std::abs(x), std::abs(y)});
}

// Adaptive Simpson quadrature.
double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fb,
               double fm, double eps, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * eps) {
        return left + right + (left + right - whole) / 15.0;
    }
    return simpson(f, a, m, fa, fm, flm, eps / 2.0, depth - 1) +
           simpson(f, m, b, fm, fb, frm, eps / 2.0, depth - 1);
}

double adaptive_quadrature(const std::function<double(double)>& f, double a, double b, double eps) {
    if (a == b) return 0.0;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    return simpson(f, a, b, fa, fb, fm, eps, 48);
}

}  // namespace

std::string to_string(SurfaceKind s) {
    switch (s) {
        case SurfaceKind::Sphere: return "sphere";
        case SurfaceKind::Hyperbolic: return "hyperbolic";
        case SurfaceKind::Euclidean: return "euclidean";
    }
    return "?";
}

std::string to_string(Stability s) {
    switch (s) {
        case Stability::LinearlyStable: return "stable";
        case Stability::UnstableJordan: return "unstable-jordan";
        case Stability::UnstableHyperbolic: return "unstable-hyperbolic";
        case Stability::UnstableNilpotent: return "unstable-nilpotent";
    }
    return "?";
}

inadmissible_point::inadmissible_point(std::string what_constraint)
    : std::domain_error("inadmissible point: " + what_constraint),
      constraint(std::move(what_constraint)) {}

double conformal_factor(SurfaceKind s, double xi) {
    check_domain(s, xi);
    return radial_data(s, xi, -1.0).p;
}

double potential(SurfaceKind s, double xi, double alpha) {
    check_domain(s, xi);
    if (alpha == 0.0) throw std::domain_error("alpha must be nonzero");
    return radial_data(s, xi, alpha).q;
}

CircularOrbit orbit_data(const ModelPoint& pt) {
    check_admissible(pt);
    const RadialData r = radial_data(pt.surface, pt.xi0, pt.alpha);
    CircularOrbit o;
    o.point = pt;
    o.p0 = r.p;
    o.p0d = r.pd;
    o.p0dd = r.pdd;
    o.q0 = r.q;
    o.q0d = r.qd;
    o.q0dd = r.qdd;
    const double xi = pt.xi0;
    o.eta0 = r.p * xi * xi;
    o.eta0d = r.pd * xi * xi + 2.0 * r.p * xi;
    o.eta0dd = r.pdd * xi * xi + 4.0 * r.pd * xi + 2.0 * r.p;
    o.theta_dot_sq = -2.0 * r.qd / o.eta0d;
    if (!(o.theta_dot_sq > 0.0)) {
        throw inadmissible_point("no circular orbit: theta_dot^2 = -2q'/(p xi^2)' is not positive");
    }
    o.T = 2.0 * kPi / std::sqrt(o.theta_dot_sq);
    const double zeta_sq = -2.0 * r.qd * o.eta0d;
    o.zeta0 = (o.eta0d >= 0.0 ? 1.0 : -1.0) * std::sqrt(std::max(0.0, zeta_sq));

    // Generic pipeline.
    o.a = 1.0 / o.p0;
    o.b = o.zeta0 / o.eta0;
    o.c = 1.0 / o.eta0;
    o.d = 2.0 * r.qd * (o.eta0d / o.eta0) + (r.qdd * o.eta0d - r.qd * o.eta0dd) / o.eta0d;

    // Cross-check against the printed surface-specific forms.
    double ca, cb, cc, cd;
    closed_form_coeffs(pt, ca, cb, cc, cd);
    if (rel_diff(o.a, ca) > 1e-10 || rel_diff(std::abs(o.b), std::abs(cb)) > 1e-10 ||
        rel_diff(o.c, cc) > 1e-10 || rel_diff(o.d, cd) > 1e-10) {
        throw std::logic_error("orbit_data: closed-form and pipeline coefficients disagree");
    }
    return o;
}

Stability stability_verdict(double a, double b, double c, double d) {
    if (!(a > 0.0)) throw std::invalid_argument("stability_verdict: a must be positive");
    const CaseTag tag = classify_generator(a, b, c, d);
    switch (tag.d_sign) {
        case DSign::Negative:
            return tag.subcase == Subcase::CdB2Zero ? Stability::LinearlyStable
                                                    : Stability::UnstableJordan;
        case DSign::Positive:
            return Stability::UnstableHyperbolic;
        case DSign::Zero:
        default:
            return Stability::UnstableNilpotent;
    }
}

double sphere_f1(double xi, double alpha) {
    return (3.0 * std::pow(xi, 4) - 2.0 * xi * xi + 3.0) * std::atan(xi) +
           (alpha - 1.0) * xi * (1.0 - xi * xi);
}

double sphere_f2(double xi, double alpha) {
    return (std::pow(xi, 4) - 6.0 * xi * xi + 1.0) * std::atan(xi) -
           (alpha - 1.0) * xi * (1.0 - xi * xi);
}

double sphere_f3(double xi, double alpha) {
    const double u = 1.0 + xi * xi;
    return std::sqrt(sphere_f1(xi, alpha) / (std::atan(xi) * u * u));
}

double sphere_h(double xi) {
    return 1.0 + (3.0 * std::pow(xi, 4) - 2.0 * xi * xi + 3.0) * std::atan(xi) /
                     (xi * (xi * xi - 1.0));
}

double hyper_g1(double xi, double alpha) {
    return (3.0 * std::pow(xi, 4) + 2.0 * xi * xi + 3.0) * hyper_log(xi) +
           2.0 * (alpha - 1.0) * xi * (1.0 + xi * xi);
}

double hyper_g2(double xi, double alpha) {
    return (std::pow(xi, 4) + 6.0 * xi * xi + 1.0) * hyper_log(xi) -
           2.0 * (alpha - 1.0) * xi * (1.0 + xi * xi);
}

double hyper_g3(double xi, double alpha) {
    const double u = 1.0 - xi * xi;
    return std::sqrt(hyper_g1(xi, alpha) / (hyper_log(xi) * u * u));
}

namespace {

RegionResult classify_sphere(const ModelPoint& pt) {
    const int omega = pt.alpha > 0.0 ? 1 : 2;
    const std::string base = "Omega" + std::to_string(omega);
    const double f1 = sphere_f1(pt.xi0, pt.alpha);
    if (std::abs(f1) <= kBoundaryTol) return OnBoundary{base + "^0"};
    if (f1 < 0.0) {
        // d > 0 and c > 0, so cd + b^2 > 0: index 0
        return RegionLabel{base + "^-", 0, -1,
                           Stability::UnstableHyperbolic};
    }
    const double f2 = sphere_f2(pt.xi0, pt.alpha);
    if (std::abs(f2) <= kBoundaryTol) return OnBoundary{base + "^{+,0}"};
    const double f3 = sphere_f3(pt.xi0, pt.alpha);
    if (std::abs(f3 - 1.0) <= kBoundaryTol) return OnBoundary{base + " k-boundary"};
    const int k = f3 <= 1.0 ? 0 : 1;
    const std::string sign = f2 > 0.0 ? "+" : "-";
    const int index = f2 > 0.0 ? 2 * k : 2 * k + 1;
    return RegionLabel{base + "," + std::to_string(k) + "^{+," + sign + "}", index, k,
                       Stability::UnstableJordan};
}

RegionResult classify_hyper(const ModelPoint& pt) {
    const double g1 = hyper_g1(pt.xi0, pt.alpha);
    if (std::abs(g1) <= kBoundaryTol) return OnBoundary{"Omega3^0"};
    if (g1 < 0.0) return RegionLabel{"Omega3^-", 0, -1, Stability::UnstableHyperbolic};
    const double g3 = hyper_g3(pt.xi0, pt.alpha);
    const double nearest = std::round(g3);
    if (nearest >= 1.0 && std::abs(g3 - nearest) <= kBoundaryTol) {
        return OnBoundary{"Omega3 g3=" + std::to_string(static_cast<int>(nearest))};
    }
    const int k = static_cast<int>(std::ceil(g3)) - 1;
    return RegionLabel{"Omega3," + std::to_string(k) + "^+", 2 * k, k, Stability::UnstableJordan};
}

RegionResult classify_euclid(const ModelPoint& pt) {
    const double al = pt.alpha;
    if (std::abs(al + 2.0) <= kBoundaryTol) return OnBoundary{"alpha=-2"};
    if (std::abs(al + 1.0) <= kBoundaryTol) return OnBoundary{"alpha=-1"};
    if (al < -2.0) return RegionLabel{"Euclid^-", 0, -1, Stability::UnstableHyperbolic};
    const int k = al < -1.0 ? 0 : 1;
    return RegionLabel{"Euclid," + std::to_string(k) + "^+", 2 * k, k, Stability::UnstableJordan};
}

}  // namespace

RegionResult region_classify(const ModelPoint& pt) {
    check_admissible(pt);
    RegionResult res;
    switch (pt.surface) {
        case SurfaceKind::Sphere: res = classify_sphere(pt); break;
        case SurfaceKind::Hyperbolic: res = classify_hyper(pt); break;
        case SurfaceKind::Euclidean: res = classify_euclid(pt); break;
    }
    if (const auto* label = std::get_if<RegionLabel>(&res)) {
        const CircularOrbit o = orbit_data(pt);
        const ClosedFormIndex cf = closed_form_iota1(o.a, o.b, o.c, o.d, o.T);
        if (cf.iota1 != label->index) {
            throw std::logic_error("region_classify: region index disagrees with the case table");
        }
    }
    return res;
}

std::vector<BoundaryCurve> boundary_curves(SurfaceKind s, std::pair<double, double> xi_range,
                                           std::pair<double, double> alpha_range, int resolution) {
    if (resolution < 16) throw std::invalid_argument("boundary_curves: resolution must be >= 16");
    const auto [xlo, xhi] = xi_range;
    const auto [alo, ahi] = alpha_range;
    if (!(xlo < xhi) || !(alo < ahi)) throw std::invalid_argument("boundary_curves: empty window");
    std::vector<BoundaryCurve> curves;
    auto clip_push = [&](BoundaryCurve& c) {
        if (!c.points.empty()) curves.push_back(std::move(c));
    };

    switch (s) {
        case SurfaceKind::Euclidean: {
            for (double line : {-2.0, -1.0}) {
                if (line < alo || line > ahi) continue;
                BoundaryCurve c{"alpha=" + std::to_string(static_cast<int>(line)), {}};
                for (int i = 0; i <= resolution; ++i) {
                    c.points.emplace_back(xlo + (xhi - xlo) * i / resolution, line);
                }
                clip_push(c);
            }
            break;
        }
        case SurfaceKind::Sphere: {
            const int omega = 0.5 * (xlo + xhi) > 1.0 ? 1 : 2;
            const std::string base = "Omega" + std::to_string(omega);
            auto sample_alpha_curve = [&](const std::string& name,
                                          const std::function<double(double)>& alpha_of_xi) {
                BoundaryCurve c{name, {}};
                for (int i = 0; i <= resolution; ++i) {
                    const double xi = xlo + (xhi - xlo) * i / resolution;
                    if (xi <= 0.0 || std::abs(xi - 1.0) < 1e-9) continue;
                    const double al = alpha_of_xi(xi);
                    if (std::isfinite(al) && al >= alo && al <= ahi) c.points.emplace_back(xi, al);
                }
                clip_push(c);
            };
            sample_alpha_curve(base + "^0", [](double xi) { return sphere_h(xi); });
            sample_alpha_curve(base + "^{+,0}", [](double xi) {
                return 1.0 + (std::pow(xi, 4) - 6.0 * xi * xi + 1.0) * std::atan(xi) /
                                 (xi * (1.0 - xi * xi));
            });
            sample_alpha_curve(base + " k-boundary", [](double xi) {
                return 1.0 + 2.0 * (xi * xi - 1.0) * std::atan(xi) / xi;
            });
            break;
        }
        case SurfaceKind::Hyperbolic: {
            auto sample_alpha_curve = [&](const std::string& name,
                                          const std::function<double(double)>& alpha_of_xi) {
                BoundaryCurve c{name, {}};
                for (int i = 0; i <= resolution; ++i) {
                    const double xi = xlo + (xhi - xlo) * i / resolution;
                    if (xi <= 0.0 || xi >= 1.0) continue;
                    const double al = alpha_of_xi(xi);
                    if (std::isfinite(al) && al >= alo && al <= ahi) c.points.emplace_back(xi, al);
                }
                clip_push(c);
            };
            sample_alpha_curve("Omega3^0", [](double xi) {
                return 1.0 - (3.0 * std::pow(xi, 4) + 2.0 * xi * xi + 3.0) * hyper_log(xi) /
                                 (2.0 * xi * (1.0 + xi * xi));
            });
            // Level sets g3 = m, solved by bisection in xi for each alpha;
            // g3 -> +inf as xi -> 1^- guarantees a bracket from the right.
            for (int m = 1; m <= 16; ++m) {
                BoundaryCurve c{"Omega3 g3=" + std::to_string(m), {}};
                for (int i = 0; i <= resolution; ++i) {
                    const double al = alo + (ahi - alo) * i / resolution;
                    if (al >= 0.0) continue;
                    const double xmax = std::min(xhi, 1.0 - 1e-12);
                    const double xmin = std::max(xlo, 1e-12);
                    auto val = [&](double xi) {
                        const double g1 = hyper_g1(xi, al);
                        if (g1 <= 0.0) return -static_cast<double>(m);
                        return hyper_g3(xi, al) - m;
                    };
                    // march from the right toward xmin looking for a bracket
                    double hi_x = xmax, hi_v = val(hi_x);
                    bool found = false;
                    const int steps = 256;
                    for (int j = 1; j <= steps; ++j) {
                        const double lo_x = xmax + (xmin - xmax) * j / steps;
                        const double lo_v = val(lo_x);
                        if (hi_v > 0.0 && lo_v <= 0.0) {
                            double a0 = lo_x, b0 = hi_x;
                            for (int it = 0; it < 80; ++it) {
                                const double mid = 0.5 * (a0 + b0);
                                (val(mid) <= 0.0 ? a0 : b0) = mid;
                            }
                            c.points.emplace_back(0.5 * (a0 + b0), al);
                            found = true;
                            break;
                        }
                        hi_x = lo_x;
                        hi_v = lo_v;
                    }
                    (void)found;
                }
                clip_push(c);
            }
            break;
        }
    }
    return curves;
}

double metric_factor(SurfaceKind s, double r, double R) {
    if (!(R > 0.0)) throw std::domain_error("R must be positive");
    switch (s) {
        case SurfaceKind::Sphere: return 2.0 * R * R / (R * R + r * r);
        case SurfaceKind::Hyperbolic:
            if (!(r < R)) throw std::domain_error("hyperbolic radius must satisfy r < R");
            return 2.0 * R * R / (R * R - r * r);
        case SurfaceKind::Euclidean: return 1.0;
    }
    return 1.0;
}

double riemann_distance(SurfaceKind s, double r, double R) {
    if (!(R > 0.0)) throw std::domain_error("R must be positive");
    if (r < 0.0) throw std::domain_error("r must be nonnegative");
    switch (s) {
        case SurfaceKind::Sphere: return 2.0 * R * std::atan(r / R);
        case SurfaceKind::Hyperbolic:
            if (!(r < R)) throw std::domain_error("hyperbolic radius must satisfy r < R");
            return R * std::log((R + r) / (R - r));
        case SurfaceKind::Euclidean: return r;
    }
    return r;
}

double riemann_distance_quadrature(SurfaceKind s, double r, double R) {
    if (!(R > 0.0)) throw std::domain_error("R must be positive");
    if (r < 0.0) throw std::domain_error("r must be nonnegative");
    if (s == SurfaceKind::Hyperbolic && !(r < R)) {
        throw std::domain_error("hyperbolic radius must satisfy r < R");
    }
    return adaptive_quadrature([&](double t) { return metric_factor(s, t, R); }, 0.0, r,
                               1e-12 * std::max(1.0, r));
}

}  // namespace symorb
