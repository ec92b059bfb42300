#include "symorb/maslov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace symorb {

namespace {

constexpr double kKernelTol = 1e-8;  // relative sigma threshold for kernels
constexpr double kFormTol = 1e-9;    // relative eigenvalue threshold in forms
constexpr int kUniformNodes = 4096;
constexpr int kLogNodes = 512;
constexpr int kBandNodes = 2048;
constexpr int kWindowNodes = 1024;   // dense sweep around each found crossing

double t_resolution(double T) { return 1e-13 * std::max(1.0, T); }
double t_merge(double T) { return 1e-10 * std::max(1.0, T); }

// Above this matrix norm a crossing cannot be certified in doubles: the SVD
// backward error reaches the kernel threshold and the structural 1/norm
// singular value of a symplectic matrix falls below it.
constexpr double kNormCeiling = 3e5;

// Path together with an optional two-sided factor: beta(t) = L gamma(t) L with
// L = e^{-eps J}. The graph of beta is the graph of gamma rotated by the
// compatible complex structure of the product space, which is the monotone
// perturbation the index definition asks for; multiplying on one side only is
// not monotone and lets crossing pairs annihilate.
struct View {
    const SymplecticPath* path;
    double eps{0.0};
    Mat left, left_inv, j;

    explicit View(const SymplecticPath& p, double e = 0.0) : path(&p), eps(e) {
        const int d = p.dim();
        j = standard_j(p.half_dim());
        if (eps != 0.0) {
            left = std::cos(eps) * Mat::Identity(d, d) - std::sin(eps) * j;
            left_inv = std::cos(eps) * Mat::Identity(d, d) + std::sin(eps) * j;
        }
    }

    Mat value(double t) const {
        if (eps == 0.0) return path->value(t);
        return left * path->value(t) * left;
    }
    // beta'(t) beta(t)^{-1} = L (gamma' gamma^{-1}) L^{-1}
    Mat tangent(double t) const {
        Mat x = path->logarithmic_velocity(t);
        if (eps == 0.0) return x;
        return left * x * left_inv;
    }
};

// det(beta(t) - I) together with an inverse-iteration estimate of
// sigma_min(beta(t) - I), both from one LU factorization.
struct NodeEval {
    double det{0.0};
    double sigma{0.0};
    double norm{1.0};
};

struct Prober {
    Vec r1, r2;
    explicit Prober(int d) {
        r1 = Vec::LinSpaced(d, 1.0, 2.0).normalized();
        r2 = Vec::Zero(d);
        for (int i = 0; i < d; ++i) r2[i] = (i % 2 == 0) ? 1.0 : -0.5 - 0.1 * i;
        r2.normalize();
    }
    NodeEval operator()(const View& v, double t) const {
        const Mat m = v.value(t);
        const int d = static_cast<int>(m.rows());
        NodeEval out;
        out.norm = std::max(1.0, m.cwiseAbs().maxCoeff());
        Eigen::PartialPivLU<Mat> lu(m - Mat::Identity(d, d));
        out.det = lu.determinant();
        const Vec x1 = lu.solve(r1);
        const Vec x2 = lu.solve(r2);
        double s = std::numeric_limits<double>::infinity();
        if (x1.allFinite() && x1.norm() > 0) s = std::min(s, 1.0 / x1.norm());
        if (x2.allFinite() && x2.norm() > 0) s = std::min(s, 1.0 / x2.norm());
        out.sigma = std::isfinite(s) ? s : 0.0;
        return out;
    }
};

struct KernelInfo {
    int dim{0};
    Mat basis;
    double sigma_min{0.0};
    double norm{1.0};
};

KernelInfo kernel_at(const View& v, double t, double tol) {
    const Mat m = v.value(t);
    const int d = static_cast<int>(m.rows());
    Eigen::JacobiSVD<Mat> svd(m - Mat::Identity(d, d), Eigen::ComputeFullV);
    KernelInfo k;
    k.norm = std::max(1.0, m.cwiseAbs().maxCoeff());
    const auto& s = svd.singularValues();
    k.sigma_min = s(d - 1);
    // cap the scale: a symplectic matrix of norm N carries a structural 1/N
    // singular value that must stay above the threshold
    const double thr = tol * std::min(k.norm, 100.0);
    int kd = 0;
    for (int i = d - 1; i >= 0 && s(i) <= thr; --i) ++kd;
    k.dim = kd;
    if (kd > 0) k.basis = svd.matrixV().rightCols(kd);
    return k;
}

// Inertia of <-J X u, u> on the kernel columns.
std::pair<int, int> form_inertia(const View& v, double t, const Mat& kernel_basis) {
    const Mat x = v.tangent(t);
    Mat g = -v.j * x;
    g = 0.5 * (g + g.transpose()).eval();
    const Mat f = kernel_basis.transpose() * g * kernel_basis;
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (f + f.transpose()));
    const Vec ev = es.eigenvalues();
    const double thr = kFormTol * std::max(1.0, ev.cwiseAbs().maxCoeff());
    int mp = 0, mm = 0;
    for (int i = 0; i < ev.size(); ++i) {
        if (ev(i) > thr) ++mp;
        else if (ev(i) < -thr) ++mm;
    }
    return {mp, mm};
}

template <typename F>
double golden_min(F f, double a, double b, double tol) {
    const double gr = 0.6180339887498949;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d; d = c; fd = fc;
            c = b - gr * (b - a); fc = f(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + gr * (b - a); fd = f(d);
        }
    }
    return fc < fd ? c : d;
}

template <typename F>
double bisect_root(F f, double a, double b, double fa, double tol) {
    // f changes sign on [a, b]
    for (int it = 0; it < 80 && b - a > tol; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if (fm == 0.0) return m;
        if ((fm > 0) == (fa > 0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

// A zero candidate of det(beta(t) - I): sign-change bisections are certified,
// sigma-dip refinements are not and need extra confirmation.
struct Candidate {
    double t{0.0};
    bool certified{false};
};

int generator_kernel_dim(const SymplecticPath& p) {
    if (!p.autonomous()) return 0;
    const Mat a = p.model() ? p.model()->matrix() : p.logarithmic_velocity(0.0);
    Eigen::JacobiSVD<Mat> svd(a);
    const auto& s = svd.singularValues();
    const double thr = 1e-12 * std::max(1.0, s(0));
    int kd = 0;
    for (int i = static_cast<int>(s.size()) - 1; i >= 0 && s(i) <= thr; --i) ++kd;
    return kd;
}

struct ScanOut {
    std::vector<Crossing> crossings;
    std::vector<std::pair<double, double>> bands;
    bool clean{true};  // false when some crossing is non-regular or unresolved
};

bool classify_and_store(const View& v, double t, double lo, double hi, double tol,
                        std::vector<Crossing>& out, bool& clean) {
    const double T = v.path->duration();
    KernelInfo k = kernel_at(v, t, tol);
    if (k.dim == 0 || k.norm > kNormCeiling) return false;
    Crossing cr;
    cr.t = t;
    cr.kernel_dim = k.dim;
    auto [mp, mm] = form_inertia(v, t, k.basis);
    cr.m_plus = mp;
    cr.m_minus = mm;
    if (t - lo <= t_merge(T)) {
        cr.t = lo;
        cr.location = CrossingLocation::Start;
    } else if (hi - t <= t_merge(T)) {
        cr.t = hi;
        cr.location = CrossingLocation::End;
    } else {
        cr.location = CrossingLocation::Interior;
    }
    if (!cr.regular()) clean = false;
    out.push_back(cr);
    return true;
}

// Crossing instants inside a band where the kernel exceeds its generic
// dimension g0: zeros of the (g0+1)-th smallest singular value.
void scan_band_jumps(const View& v, double lo, double hi, double tol, int g0, ScanOut& out) {
    const int d = v.path->dim();
    const Mat id = Mat::Identity(d, d);
    auto sig_up = [&](double t) {
        Eigen::JacobiSVD<Mat> svd(v.value(t) - id);
        return svd.singularValues()(d - 1 - g0);
    };
    std::vector<double> nodes(kBandNodes + 1), s(kBandNodes + 1);
    double smax = 0.0;
    for (int i = 0; i <= kBandNodes; ++i) {
        nodes[i] = lo + (hi - lo) * i / kBandNodes;
        s[i] = sig_up(nodes[i]);
        smax = std::max(smax, s[i]);
    }
    const double cut = 0.25 * std::max(smax, 1e-6);
    std::vector<double> candidates{lo, hi};
    for (int i = 1; i < kBandNodes; ++i) {
        if (s[i] <= s[i - 1] && s[i] <= s[i + 1] && s[i] < cut) {
            candidates.push_back(golden_min(sig_up, nodes[i - 1], nodes[i + 1],
                                            t_resolution(v.path->duration())));
            if (candidates.size() > 64) break;
        }
    }
    std::sort(candidates.begin(), candidates.end());
    double last_t = -std::numeric_limits<double>::infinity();
    for (double t : candidates) {
        if (t - last_t < t_merge(v.path->duration())) continue;
        KernelInfo k = kernel_at(v, t, tol);
        if (k.dim <= g0) continue;
        last_t = t;
        classify_and_store(v, t, lo, hi, tol, out.crossings, out.clean);
    }
}

// Confirm a candidate and expand hidden siblings. A bracketed transversal
// zero whose neighborhood shows an even sign count hides at least one more
// zero below the sweep step; a sigma dip that fails the kernel test but shows
// a deep determinant collapse is an unresolved pair. Both trigger a denser
// local sweep.
struct Resolver {
    const View& v;
    double lo, hi, tol, tres;
    std::vector<Crossing>& out;
    bool& clean;
    int guard{0};

    template <typename FDet>
    void zoom(FDet&& det_at, double ta, double tb, double step, int depth) {
        ta = std::max(lo, ta);
        tb = std::min(hi, tb);
        if (!(ta < tb) || ++guard > 64) return;
        const int count = 256;
        double prev_t = ta, prev_det = det_at(ta);
        double best_abs = std::numeric_limits<double>::infinity(), best_t = ta, best_bg = 0.0;
        for (int i = 1; i <= count; ++i) {
            const double t = ta + (tb - ta) * i / count;
            const double dt = det_at(t);
            if (prev_det * dt < 0.0) {
                handle(det_at, bisect_root(det_at, prev_t, t, prev_det, tres), true,
                       (tb - ta) / count, depth + 1);
            }
            if (std::abs(dt) < best_abs) {
                best_abs = std::abs(dt);
                best_t = t;
            }
            best_bg = std::max(best_bg, std::abs(dt));
            prev_t = t;
            prev_det = dt;
        }
        // a tangency at the deepest point of a sign-definite zoom window
        if (depth < 3 && best_bg > 0.0 && best_abs <= 1e-9 * best_bg) {
            handle(det_at, best_t, false, (tb - ta) / count, depth + 1);
        }
    }

    template <typename FDet>
    void handle(FDet&& det_at, double t, bool certified, double step, int depth) {
        if (certified) {
            classify_and_store(v, t, lo, hi, tol, out, clean);
            if (depth >= 3) return;
            // parity: a transversal zero flips the sign across +/- step;
            // equal signs mean a sibling hides inside
            const double h = std::max(step, 64.0 * tres);
            const double before = det_at(std::max(lo, t - h));
            const double after = det_at(std::min(hi, t + h));
            if (before * after > 0.0) {
                zoom(det_at, t - h, t + h, h / 64.0, depth);
            }
            return;
        }
        // dip candidate
        KernelInfo k = kernel_at(v, t, tol);
        if (k.dim > 0 && k.norm <= kNormCeiling) {
            classify_and_store(v, t, lo, hi, tol, out, clean);
            return;
        }
        if (depth >= 3) return;
        const double h = std::max(step, 64.0 * tres);
        double background = 0.0;
        for (double m : {1.0, 2.0, 4.0, 8.0}) {
            if (t + m * h <= hi) background = std::max(background, std::abs(det_at(t + m * h)));
            if (t - m * h >= lo) background = std::max(background, std::abs(det_at(t - m * h)));
        }
        if (background > 0.0 && std::abs(det_at(t)) <= 1e-3 * background) {
            zoom(det_at, t - h, t + h, h / 64.0, depth);
        }
    }
};

// Dense zero harvest of one window at a fixed step, with sibling expansion.
void sweep_window(const View& v, double ta, double tb, double step, Resolver& res) {
    if (!(ta < tb)) return;
    const int d = v.path->dim();
    const Mat id = Mat::Identity(d, d);
    auto det_at = [&](double t) { return (v.value(t) - id).determinant(); };
    Prober probe(d);
    auto sigma_at = [&](double t) { return probe(v, t).sigma; };

    const int count = std::max(2, std::min(400000, static_cast<int>((tb - ta) / step) + 1));
    std::vector<double> ts(count + 1), dets(count + 1);
    for (int i = 0; i <= count; ++i) {
        ts[i] = ta + (tb - ta) * i / count;
        dets[i] = det_at(ts[i]);
    }
    const double eff_step = (tb - ta) / count;
    for (int i = 0; i < count; ++i) {
        if (dets[i] == 0.0) res.handle(det_at, ts[i], true, eff_step, 0);
        if (dets[i] * dets[i + 1] < 0.0) {
            res.handle(det_at, bisect_root(det_at, ts[i], ts[i + 1], dets[i], res.tres), true,
                       eff_step, 0);
        }
    }
    // tangency suspects: deepest strict |det| minima without a sign change
    std::vector<std::pair<double, double>> dips;
    for (int i = 1; i < count; ++i) {
        const double a = std::abs(dets[i]);
        if (a <= std::abs(dets[i - 1]) && a <= std::abs(dets[i + 1]) &&
            dets[i - 1] * dets[i] > 0.0 && dets[i] * dets[i + 1] > 0.0) {
            dips.emplace_back(a, ts[i]);
        }
    }
    std::sort(dips.begin(), dips.end());
    for (size_t i = 0; i < dips.size() && i < 8; ++i) {
        const double t = dips[i].second;
        res.handle(det_at,
                   golden_min(sigma_at, std::max(ta, t - eff_step), std::min(tb, t + eff_step),
                              res.tres),
                   false, eff_step, 0);
    }
}

// Locate all zeros of det(beta(t) - I) on [lo, hi]. Transversal zeros show up
// as node-level sign changes. Zeros hiding below grid resolution only occur
// where the raw path is degenerate: around the start and around the anchors,
// where dense checksummed window sweeps recover the split clusters.
ScanOut scan(const View& v, double lo, double hi, double tol, bool with_band_jumps,
             const std::vector<double>* anchors = nullptr) {
    ScanOut out;
    const double T = v.path->duration();
    const int d = v.path->dim();
    Prober probe(d);
    const Mat id = Mat::Identity(d, d);
    auto det_at = [&](double t) { return (v.value(t) - id).determinant(); };
    auto sigma_at = [&](double t) { return probe(v, t).sigma; };

    // For raw autonomous paths, det(gamma(t)-I) vanishes identically iff the
    // generator is singular (a fixed vector of the flow).
    if (v.eps == 0.0 && v.path->autonomous()) {
        const int g0 = generator_kernel_dim(*v.path);
        if (g0 > 0) {
            out.bands.emplace_back(lo, hi);
            out.clean = false;
            if (with_band_jumps) scan_band_jumps(v, lo, hi, tol, g0, out);
            return out;
        }
    }

    // Sample grid: uniform plus a geometric tail near lo (perturbed paths have
    // crossings at eps-scale distances from the start).
    std::vector<double> nodes;
    nodes.reserve(kUniformNodes + kLogNodes + 2);
    const double step = (hi - lo) / kUniformNodes;
    for (int i = 0; i <= kUniformNodes; ++i) nodes.push_back(lo + i * step);
    const double floor_t = std::max(1e-15 * std::max(1.0, T), v.eps * 1e-3);
    if (floor_t > 0.0 && floor_t < step) {
        const double ratio = std::pow(step / floor_t, 1.0 / kLogNodes);
        double t = floor_t;
        for (int i = 0; i < kLogNodes && t < step; ++i, t *= ratio) nodes.push_back(lo + t);
    }
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

    const size_t nn = nodes.size();
    std::vector<NodeEval> ev(nn);
    double smax = 0.0;
    for (size_t i = 0; i < nn; ++i) {
        ev[i] = probe(v, nodes[i]);
        smax = std::max(smax, ev[i].sigma);
    }

    // Sample tables can carry continuous bands; detect long singular runs.
    if (v.eps == 0.0 && !v.path->autonomous()) {
        size_t run = 0, run_start = 0;
        for (size_t i = 0; i <= nn; ++i) {
            const bool sing = i < nn && ev[i].sigma <= 10.0 * tol * ev[i].norm;
            if (sing) {
                if (run == 0) run_start = i;
                ++run;
            } else {
                if (run >= 16) {
                    out.bands.emplace_back(nodes[run_start], nodes[i - 1]);
                    out.clean = false;
                }
                run = 0;
            }
        }
        if (!out.bands.empty()) return out;
    }

    const double tres = t_resolution(T);
    std::vector<Crossing> all;
    bool clean = true;
    Resolver res{v, lo, hi, tol, tres, all, clean};

    // Dense checked sweeps around the start and the raw degeneracy instants,
    // where the perturbation splits clusters below grid resolution.
    std::vector<std::pair<double, double>> win_ranges;
    if (v.eps > 0.0) {
        const double w = v.eps * (30.0 + 2.0 * (hi - lo));
        std::vector<double> centers{lo};
        if (anchors) centers.insert(centers.end(), anchors->begin(), anchors->end());
        std::sort(centers.begin(), centers.end());
        size_t i = 0;
        while (i < centers.size()) {
            double wlo = std::max(lo, centers[i] - w);
            double whi = std::min(hi, centers[i] + w);
            size_t j = i + 1;
            while (j < centers.size() && centers[j] - w <= whi) {
                whi = std::min(hi, centers[j] + w);
                ++j;
            }
            res.guard = 0;
            sweep_window(v, wlo, whi, v.eps / 8.0, res);
            win_ranges.emplace_back(wlo, whi);
            i = j;
        }
    }
    auto in_window = [&](double t) {
        for (const auto& [a, b] : win_ranges) {
            if (t >= a && t <= b) return true;
        }
        return false;
    };

    // Global candidates outside the windows.
    res.guard = 0;
    for (size_t i = 0; i + 1 < nn; ++i) {
        // past the certification ceiling both the determinant sign and any
        // kernel test are numerically blind; skip those stretches
        if (std::min(ev[i].norm, ev[i + 1].norm) > 10.0 * kNormCeiling) continue;
        if (in_window(nodes[i]) && in_window(nodes[i + 1])) continue;
        if (ev[i].det == 0.0) res.handle(det_at, nodes[i], true, step, 0);
        if (ev[i].det * ev[i + 1].det < 0.0) {
            res.handle(det_at, bisect_root(det_at, nodes[i], nodes[i + 1], ev[i].det, tres), true,
                       nodes[i + 1] - nodes[i], 0);
        }
    }
    const double cut = 0.25 * std::max(smax, 1e-6);
    int dip_budget = 64;
    for (size_t i = 1; i + 1 < nn && dip_budget > 0; ++i) {
        if (in_window(nodes[i])) continue;
        if (ev[i].sigma <= ev[i - 1].sigma && ev[i].sigma <= ev[i + 1].sigma &&
            ev[i].sigma < cut) {
            res.handle(det_at, golden_min(sigma_at, nodes[i - 1], nodes[i + 1], tres), false,
                       nodes[i + 1] - nodes[i], 0);
            --dip_budget;
        }
    }
    if (v.eps == 0.0) {
        // raw endpoints: a from-identity start and a possibly singular end
        if (ev[0].sigma < ev[1].sigma && ev[0].sigma < cut)
            res.handle(det_at, golden_min(sigma_at, lo, nodes[1], tres), false, step, 3);
        if (ev[nn - 1].sigma < ev[nn - 2].sigma && ev[nn - 1].sigma < cut)
            res.handle(det_at, golden_min(sigma_at, nodes[nn - 2], hi, tres), false, step, 3);
        res.handle(det_at, lo, false, step, 3);
    }
    res.handle(det_at, hi, false, step, 3);

    // order and merge duplicates (keep the first of each cluster)
    std::sort(all.begin(), all.end(),
              [](const Crossing& x, const Crossing& y) { return x.t < y.t; });
    double last_t = -std::numeric_limits<double>::infinity();
    for (const auto& c : all) {
        if (c.t - last_t < t_merge(T)) continue;
        out.crossings.push_back(c);
        last_t = c.t;
    }
    out.clean = out.clean && clean;
    // duplicates may hide a regularity flag set by a dropped copy; recompute
    for (const auto& c : out.crossings) {
        if (!c.regular()) out.clean = false;
    }
    return out;
}

int rs_sum(const std::vector<Crossing>& crossings) {
    int total = 0;
    for (const auto& c : crossings) {
        switch (c.location) {
            case CrossingLocation::Start: total += c.m_plus; break;
            case CrossingLocation::End: total -= c.m_minus; break;
            case CrossingLocation::Interior: total += c.signature(); break;
        }
    }
    return total;
}

struct PerturbedResult {
    int value{0};
    std::vector<Crossing> crossings;
};

// Degeneracy instants of the raw path with their expected cluster totals.
std::vector<double> crossing_anchors(const SymplecticPath& path, double lo, double hi) {
    std::vector<double> anchors;
    View raw(path);
    const int g0 = path.autonomous() ? generator_kernel_dim(path) : 0;
    auto add = [&](const Crossing& c) {
        // the start cluster gets its own window
        if (c.t - lo <= t_merge(path.duration())) return;
        anchors.push_back(c.t);
    };
    if (g0 > 0) {
        ScanOut bands;
        scan_band_jumps(raw, lo, hi, kKernelTol, g0, bands);
        for (const auto& c : bands.crossings) add(c);
    } else {
        ScanOut sc = scan(raw, lo, hi, kKernelTol, false);
        for (const auto& c : sc.crossings) add(c);
        for (const auto& band : sc.bands) {
            ScanOut jumps;
            scan_band_jumps(raw, band.first, band.second, kKernelTol, 1, jumps);
            for (const auto& c : jumps.crossings) add(c);
        }
    }
    return anchors;
}

// One perturbed evaluation; nullopt when this eps is unusable (an endpoint
// lands on the singular cycle, a crossing is non-regular, or a cluster
// cannot be resolved).
std::optional<PerturbedResult> try_perturbed(const SymplecticPath& path, double eps, double lo,
                                             double hi, const std::vector<double>& anchors) {
    View v(path, eps);
    ScanOut sc = scan(v, lo, hi, kKernelTol, false, &anchors);
    if (!sc.bands.empty() || !sc.clean) return std::nullopt;
    for (const auto& c : sc.crossings) {
        if (c.location != CrossingLocation::Interior) return std::nullopt;
    }
    PerturbedResult r;
    r.value = rs_sum(sc.crossings);
    r.crossings = std::move(sc.crossings);
    return r;
}

struct ClmOutcome {
    int clm{0};
    std::vector<Crossing> crossings;
    double eps_used{0.0};
};

// The perturbed count is independent of eps until the path endpoints re-enter
// the singular cycle (homotopy invariance in the (t, eps)-rectangle; the
// start e^{-2 eps J} never does). Locate the first eps in (0, cap] where an
// endpoint becomes degenerate so the schedule can start as large as possible:
// larger eps separates split crossing pairs and keeps the detection easy.
double first_bad_eps(const View& base, const SymplecticPath& path, double lo, double hi,
                     double cap) {
    const int d = path.dim();
    const Mat j = standard_j(path.half_dim());
    const Mat g_end = path.value(hi);
    const Mat g_start = path.value(lo);
    const bool start_identity = (g_start - Mat::Identity(d, d)).cwiseAbs().maxCoeff() == 0.0;
    auto end_det = [&](double e) {
        const Mat l = std::cos(e) * Mat::Identity(d, d) - std::sin(e) * j;
        double v = (l * g_end * l - Mat::Identity(d, d)).determinant();
        if (!start_identity) {
            v *= (l * g_start * l - Mat::Identity(d, d)).determinant();
        }
        return v;
    };
    if (std::max(g_end.cwiseAbs().maxCoeff(), g_start.cwiseAbs().maxCoeff()) > kNormCeiling) {
        // endpoint determinants are numerically blind out here; endpoint
        // degeneracies are equally uncertifiable, so any eps works equally
        return cap;
    }
    const double floor_e = 1e-9;
    const int steps = 4096;
    const double ratio = std::pow(cap / floor_e, 1.0 / steps);
    double e_prev = floor_e, d_prev = end_det(e_prev);
    double first = cap;
    for (int i = 1; i <= steps; ++i) {
        const double e = floor_e * std::pow(ratio, i);
        const double de = end_det(e);
        if (d_prev * de <= 0.0) {
            first = e_prev;
            break;
        }
        e_prev = e;
        d_prev = de;
    }
    (void)base;
    return first;
}

ClmOutcome clm_full(const SymplecticPath& path, double lo, double hi) {
    // Paths with a singular generator sit inside the singular cycle for all t;
    // skip the raw scan and regularize immediately.
    const bool always_degenerate = path.autonomous() && generator_kernel_dim(path) > 0;
    if (!always_degenerate) {
        View raw(path);
        ScanOut sc = scan(raw, lo, hi, kKernelTol, false);
        if (sc.bands.empty() && sc.clean) {
            ClmOutcome o;
            o.clm = rs_sum(sc.crossings);
            o.crossings = std::move(sc.crossings);
            return o;
        }
    }
    View base(path);
    const std::vector<double> anchors = crossing_anchors(path, lo, hi);
    double eps_cap = 8e-3;
    if (path.model()) {
        // unit-circle eigenvalues of the end matrix sit at angle sqrt(-ad) T
        // (mod 2 pi); the rotated end re-enters the cycle at half that gap
        const double ad = path.model()->a * path.model()->d;
        if (ad < 0.0) {
            constexpr double two_pi = 6.283185307179586476925286766559;
            const double angle = std::sqrt(-ad) * (hi - lo);
            const double frac = angle - two_pi * std::floor(angle / two_pi);
            const double gap = std::min(frac, two_pi - frac);
            if (gap > 0.0) eps_cap = std::min(eps_cap, gap / 8.0);
        }
    }
    double eps = std::min(0.25 * first_bad_eps(base, path, lo, hi, 8e-3), eps_cap);
    std::optional<int> prev1, prev2;
    for (int iter = 0; iter < 60 && eps > 1e3 * std::numeric_limits<double>::epsilon(); ++iter) {
        auto r = try_perturbed(path, eps, lo, hi, anchors);
        if (r && prev1 && prev2 && r->value == *prev1 && *prev1 == *prev2) {
            // wide-span confirmation: the count must also hold far below the
            // agreeing scales, else a degeneracy slipped between them
            auto deep = try_perturbed(path, eps / 128.0, lo, hi, anchors);
            if (deep && deep->value == r->value) {
                ClmOutcome o;
                o.clm = r->value;
                o.crossings = std::move(r->crossings);
                o.eps_used = eps;
                return o;
            }
            prev1.reset();
            prev2.reset();
        }
        prev2 = prev1;
        prev1 = r ? std::optional<int>(r->value) : std::nullopt;
        eps *= 0.5;
    }
    throw epsilon_exhausted();
}

}  // namespace

// ---------------------------------------------------------------------------
// SymplecticPath

SymplecticPath::SymplecticPath(const Generator& g, double T, int steps)
    : n_(2), t_end_(T), model_(g) {
    if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("SymplecticPath: T must be positive");
    init_samples(steps);
    validate();
}

SymplecticPath::SymplecticPath(const Mat& a, double T, int steps) : t_end_(T), gen_(a) {
    if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("SymplecticPath: T must be positive");
    if (a.rows() != a.cols() || a.rows() % 2 != 0 || a.rows() == 0 || !a.allFinite()) {
        throw std::invalid_argument("SymplecticPath: generator must be square, even, finite");
    }
    n_ = static_cast<int>(a.rows()) / 2;
    init_samples(steps);
    validate();
}

SymplecticPath::SymplecticPath(std::vector<double> times, std::vector<Mat> samples)
    : ts_(std::move(times)), samples_(std::move(samples)) {
    if (ts_.size() < 5 || ts_.size() != samples_.size()) {
        throw std::invalid_argument("SymplecticPath: need matching times/samples, at least five");
    }
    if (ts_.front() != 0.0) throw std::invalid_argument("SymplecticPath: first time must be 0");
    for (size_t i = 1; i < ts_.size(); ++i) {
        if (!(ts_[i] > ts_[i - 1])) throw std::invalid_argument("SymplecticPath: times must increase");
    }
    const auto& m0 = samples_.front();
    if (m0.rows() != m0.cols() || m0.rows() % 2 != 0) {
        throw std::invalid_argument("SymplecticPath: samples must be square of even dimension");
    }
    n_ = static_cast<int>(m0.rows()) / 2;
    t_end_ = ts_.back();
    if ((m0 - Mat::Identity(2 * n_, 2 * n_)).cwiseAbs().maxCoeff() > 1e-9) {
        throw std::invalid_argument("SymplecticPath: path must start at the identity");
    }
    samples_.front() = Mat::Identity(2 * n_, 2 * n_);
    validate();
}

void SymplecticPath::init_samples(int steps) {
    if (steps < 64) throw std::invalid_argument("SymplecticPath: need at least 64 steps");
    ts_.resize(steps + 1);
    samples_.resize(steps + 1);
    for (int i = 0; i <= steps; ++i) {
        ts_[i] = t_end_ * i / steps;
        samples_[i] = value(ts_[i]);
    }
}

void SymplecticPath::validate() const {
    for (const auto& m : samples_) {
        if (m.rows() != 2 * n_ || m.cols() != 2 * n_ || !m.allFinite()) {
            throw std::invalid_argument("SymplecticPath: sample dimension mismatch");
        }
        if (symplectic_residual(m) > 1e-8) {
            throw std::invalid_argument("SymplecticPath: sample is not symplectic");
        }
    }
}

Mat SymplecticPath::value(double t) const {
    if (model_) return model_->flow(t);
    if (gen_) {
        if (t == 0.0) return Mat::Identity(2 * n_, 2 * n_);
        return matrix_exponential(*gen_, t);
    }
    // Table: piecewise cubic Lagrange interpolation through the four nearest
    // samples (linear interpolation is too coarse for the kernel threshold).
    if (t <= ts_.front()) return samples_.front();
    if (t >= ts_.back()) return samples_.back();
    const int m = static_cast<int>(ts_.size());
    const auto it = std::upper_bound(ts_.begin(), ts_.end(), t);
    int hi = static_cast<int>(it - ts_.begin());
    int base = std::clamp(hi - 2, 0, m - 4);
    Mat out = Mat::Zero(2 * n_, 2 * n_);
    for (int a = 0; a < 4; ++a) {
        double w = 1.0;
        for (int b = 0; b < 4; ++b) {
            if (a == b) continue;
            w *= (t - ts_[base + b]) / (ts_[base + a] - ts_[base + b]);
        }
        out += w * samples_[base + a];
    }
    return out;
}

Mat SymplecticPath::logarithmic_velocity(double t) const {
    if (model_) return model_->matrix();
    if (gen_) return *gen_;
    // 4th-order finite differences on the sample grid, stencil shifted at the
    // edges, evaluated at the node nearest t.
    const int m = static_cast<int>(ts_.size());
    int i = static_cast<int>(std::lower_bound(ts_.begin(), ts_.end(), t) - ts_.begin());
    if (i >= m) i = m - 1;
    if (i > 0 && std::abs(ts_[i - 1] - t) < std::abs(ts_[i] - t)) --i;
    const int base = std::clamp(i - 2, 0, m - 5);
    const double h = ts_[1] - ts_[0];
    const int off = i - base;  // position of node i in the 5-point stencil
    static const double w[5][5] = {
        {-25.0 / 12, 4.0, -3.0, 4.0 / 3, -1.0 / 4},
        {-1.0 / 4, -5.0 / 6, 3.0 / 2, -1.0 / 2, 1.0 / 12},
        {1.0 / 12, -2.0 / 3, 0.0, 2.0 / 3, -1.0 / 12},
        {-1.0 / 12, 1.0 / 2, -3.0 / 2, 5.0 / 6, 1.0 / 4},
        {1.0 / 4, -4.0 / 3, 3.0, -4.0, 25.0 / 12}};
    Mat dgamma = Mat::Zero(2 * n_, 2 * n_);
    for (int k = 0; k < 5; ++k) dgamma += w[off][k] * samples_[base + k];
    dgamma /= h;
    return dgamma * samples_[i].partialPivLu().inverse();
}

double SymplecticPath::generator_norm() const {
    if (model_) return model_->matrix().cwiseAbs().rowwise().sum().maxCoeff();
    if (gen_) return gen_->cwiseAbs().rowwise().sum().maxCoeff();
    return logarithmic_velocity(0.0).cwiseAbs().rowwise().sum().maxCoeff();
}

SymplecticPath fundamental_solution(const Generator& g, double T, int steps) {
    return SymplecticPath(g, T, steps);
}

SymplecticPath fundamental_solution(const Mat& a, double T, int steps) {
    return SymplecticPath(a, T, steps);
}

// ---------------------------------------------------------------------------
// Crossings and indices

degenerate_crossing::degenerate_crossing(double lo, double hi)
    : std::runtime_error("degenerate crossing cluster"), t_lo(lo), t_hi(hi) {}

epsilon_exhausted::epsilon_exhausted()
    : std::runtime_error("no stabilizing perturbation size found") {}

bool CrossingScan::all_regular() const {
    return std::all_of(crossings.begin(), crossings.end(),
                       [](const Crossing& c) { return c.regular(); });
}

CrossingScan detect_crossings(const SymplecticPath& path, double tol) {
    View v(path);
    ScanOut sc = scan(v, 0.0, path.duration(), tol, true);
    CrossingScan out;
    out.crossings = std::move(sc.crossings);
    out.continuous_bands = std::move(sc.bands);
    return out;
}

std::pair<int, int> crossing_form(const SymplecticPath& path, double t0) {
    View v(path);
    KernelInfo k = kernel_at(v, t0, kKernelTol);
    if (k.dim == 0) throw std::invalid_argument("crossing_form: t0 is not a crossing");
    return form_inertia(v, t0, k.basis);
}

int clm_index(const SymplecticPath& path) {
    return clm_full(path, 0.0, path.duration()).clm;
}

IndexResult iota1(const SymplecticPath& path) {
    ClmOutcome o = clm_full(path, 0.0, path.duration());
    IndexResult r;
    r.clm = o.clm;
    r.iota1 = o.clm - path.half_dim();
    r.crossings = std::move(o.crossings);
    r.epsilon_used = o.eps_used;
    return r;
}

int zhu_index(const SymplecticPath& path) {
    const int n = path.half_dim();
    for (const auto& m : path.samples()) {
        const double off = m.topRightCorner(n, n).cwiseAbs().maxCoeff();
        if (off > 1e-10 * std::max(1.0, m.cwiseAbs().maxCoeff())) {
            throw std::invalid_argument("zhu_index: path is not lower block triangular");
        }
    }
    auto corner_data = [&](double t) {
        const Mat m = path.value(t);
        const Mat m11 = m.topLeftCorner(n, n);
        const Mat m21 = m.bottomLeftCorner(n, n);
        Eigen::JacobiSVD<Mat> svd(m11 - Mat::Identity(n, n), Eigen::ComputeFullV);
        const auto& s = svd.singularValues();
        const double thr = kKernelTol * std::max(1.0, m11.cwiseAbs().maxCoeff());
        int kd = 0;
        for (int i = n - 1; i >= 0 && s(i) <= thr; --i) ++kd;
        int mp = 0;
        if (kd > 0) {
            const Mat basis = svd.matrixV().rightCols(kd);
            Mat w = m11.transpose() * m21;
            w = 0.5 * (w + w.transpose()).eval();
            Eigen::SelfAdjointEigenSolver<Mat> es(basis.transpose() * w * basis);
            const Vec ev = es.eigenvalues();
            const double etol = kFormTol * std::max(1.0, ev.cwiseAbs().maxCoeff());
            for (int i = 0; i < ev.size(); ++i)
                if (ev(i) > etol) ++mp;
        }
        return std::pair<int, int>(kd, mp);
    };
    auto [s0, mp0] = corner_data(0.0);
    auto [sT, mpT] = corner_data(path.duration());
    return mpT - mp0 + s0 - sT;
}

namespace detail {

int clm_segment(const SymplecticPath& path, double t_lo, double t_hi) {
    View raw(path);
    ScanOut sc = scan(raw, t_lo, t_hi, kKernelTol, false);
    if (!sc.bands.empty() || !sc.clean) throw degenerate_crossing(t_lo, t_hi);
    return rs_sum(sc.crossings);
}

std::optional<int> clm_segment_perturbed(const SymplecticPath& path, double eps, double t_lo,
                                         double t_hi) {
    View v(path, eps);
    const std::vector<double> anchors = crossing_anchors(path, t_lo, t_hi);
    ScanOut sc = scan(v, t_lo, t_hi, kKernelTol, false, &anchors);
    if (!sc.bands.empty() || !sc.clean) return std::nullopt;
    return rs_sum(sc.crossings);
}

}  // namespace detail

}  // namespace symorb
