#include "symorb/report.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

namespace symorb {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
using json = nlohmann::ordered_json;

std::string fmt(double x, int precision = 12) {
    std::ostringstream os;
    os << std::setprecision(precision) << x;
    return os.str();
}

int sign_of(double x, double tol) {
    if (std::abs(x) <= tol) return 0;
    return x > 0.0 ? 1 : -1;
}

}  // namespace

void parallel_for(int n, int jobs, const std::function<void(int)>& f) {
    jobs = std::max(1, std::min(jobs, n));
    if (jobs <= 1) {
        for (int i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> workers;
    workers.reserve(jobs);
    for (int w = 0; w < jobs; ++w) {
        workers.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    f(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& w : workers) w.join();
    if (first_error) std::rethrow_exception(first_error);
}

// ---------------------------------------------------------------------------
// Campaign

CampaignSample draw_campaign_sample(Rng& rng) {
    CampaignSample s;
    s.a = rng.open_closed(0.1, 5.0);
    s.b = rng.closed_open(-5.0, 5.0);
    s.c = rng.closed_open(-5.0, 5.0);
    s.d = rng.closed_open(-5.0, 5.0);
    s.T = rng.open_closed(0.5, 20.0);
    return s;
}

bool campaign_admissible(const CampaignSample& s, double guard) {
    if (std::abs(s.d) < guard) return false;
    const double disc = s.c * s.d + s.b * s.b;
    if (std::abs(disc) < guard * std::max({1.0, s.b * s.b, std::abs(s.c * s.d)})) return false;
    if (s.d < 0.0) {
        const double x = std::sqrt(-s.a * s.d) * s.T;
        const double frac = std::abs(x - 2.0 * kPi * std::round(x / (2.0 * kPi)));
        if (frac < guard) return false;
    }
    return true;
}

VerifyReport run_campaign(int samples, std::uint64_t seed, double guard, int jobs) {
    if (samples < 0) throw std::invalid_argument("run_campaign: negative sample count");
    VerifyReport rep;
    rep.requested = samples;
    rep.seed = seed;
    rep.guard = guard;

    Rng rng(seed);
    std::vector<CampaignSample> admitted;
    admitted.reserve(samples);
    for (int i = 0; i < samples; ++i) {
        const CampaignSample s = draw_campaign_sample(rng);
        if (campaign_admissible(s, guard)) admitted.push_back(s);
    }
    rep.admissible = static_cast<int>(admitted.size());

    const auto t0 = std::chrono::steady_clock::now();
    std::vector<std::optional<Disagreement>> slots(admitted.size());
    parallel_for(static_cast<int>(admitted.size()), jobs, [&](int i) {
        const CampaignSample& s = admitted[i];
        const int expected = closed_form_iota1(s.a, s.b, s.c, s.d, s.T).iota1;
        const SymplecticPath path(Generator(s.a, s.b, s.c, s.d), s.T);
        const int numeric = iota1(path).iota1;
        if (numeric != expected) slots[i] = Disagreement{s, expected, numeric};
    });
    for (const auto& slot : slots) {
        if (slot) rep.disagreements.push_back(*slot);
    }
    rep.agreements = rep.admissible - static_cast<int>(rep.disagreements.size());
    rep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

void write_verify_json(const VerifyReport& r, std::ostream& out) {
    json j;
    j["samples"] = r.requested;
    j["seed"] = r.seed;
    j["guard"] = r.guard;
    j["admissible"] = r.admissible;
    j["agreements"] = r.agreements;
    json dis = json::array();
    for (const auto& d : r.disagreements) {
        json e;
        e["a"] = d.sample.a;
        e["b"] = d.sample.b;
        e["c"] = d.sample.c;
        e["d"] = d.sample.d;
        e["T"] = d.sample.T;
        e["closed_form"] = d.closed_form;
        e["numeric"] = d.numeric;
        dis.push_back(e);
    }
    j["disagreements"] = dis;
    out << j.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Point queries

QueryReport query_point(const ModelPoint& pt, bool verify) {
    QueryReport q;
    q.point = pt;
    RegionResult region;
    try {
        region = region_classify(pt);
    } catch (const inadmissible_point& e) {
        q.error = e.constraint;
        return q;
    } catch (const std::domain_error& e) {
        q.error = e.what();
        return q;
    }
    q.admissible = true;
    if (const auto* b = std::get_if<OnBoundary>(&region)) {
        q.on_boundary = true;
        q.boundary_curve = b->curve;
        return q;
    }
    const auto& label = std::get<RegionLabel>(region);
    q.orbit = orbit_data(pt);
    const auto cf = closed_form_iota1(q.orbit->a, q.orbit->b, q.orbit->c, q.orbit->d, q.orbit->T);
    q.tag = cf.tag;
    q.iota1 = cf.iota1;
    q.region = label.name;
    q.k = label.k;
    q.stability = label.stability;
    if (verify) {
        q.verified = true;
        const SymplecticPath path(q.orbit->generator(), q.orbit->T);
        q.oracle_iota1 = iota1(path).iota1;
        q.agrees = (q.oracle_iota1 == q.iota1);
    }
    return q;
}

namespace {

json query_json(const QueryReport& q) {
    json j;
    j["surface"] = to_string(q.point.surface);
    j["xi"] = q.point.xi0;
    j["alpha"] = q.point.alpha;
    j["admissible"] = q.admissible;
    if (!q.admissible) {
        j["error"] = q.error;
        return j;
    }
    if (q.on_boundary) {
        j["on_boundary"] = q.boundary_curve;
        return j;
    }
    json coeffs;
    coeffs["a"] = q.orbit->a;
    coeffs["b"] = q.orbit->b;
    coeffs["c"] = q.orbit->c;
    coeffs["d"] = q.orbit->d;
    j["coefficients"] = coeffs;
    j["theta_dot_sq"] = q.orbit->theta_dot_sq;
    j["period"] = q.orbit->T;
    j["case"] = q.tag.row_name();
    j["model_feasible"] = q.tag.model_feasible;
    j["k"] = q.k;
    j["iota1"] = q.iota1;
    j["morse_index"] = q.iota1;
    j["region"] = q.region;
    j["stability"] = to_string(q.stability);
    if (q.verified) {
        json o;
        o["iota1"] = q.oracle_iota1;
        o["agrees"] = q.agrees;
        j["oracle"] = o;
    }
    return j;
}

}  // namespace

void write_query_json(const QueryReport& q, std::ostream& out) {
    out << query_json(q).dump(2) << "\n";
}

void write_query_csv(const QueryReport& q, std::ostream& out) {
    out << "surface,xi,alpha,a,b,c,d,period,case,k,iota1,region,stability,oracle_iota1,agrees\n";
    out << to_string(q.point.surface) << "," << fmt(q.point.xi0) << "," << fmt(q.point.alpha)
        << ",";
    if (!q.admissible || q.on_boundary) {
        out << ",,,,,,,," << (q.on_boundary ? "boundary:" + q.boundary_curve : q.error) << ",,\n";
        return;
    }
    out << fmt(q.orbit->a) << "," << fmt(q.orbit->b) << "," << fmt(q.orbit->c) << ","
        << fmt(q.orbit->d) << "," << fmt(q.orbit->T) << ",\"" << q.tag.row_name() << "\"," << q.k
        << "," << q.iota1 << "," << q.region << "," << to_string(q.stability) << ",";
    if (q.verified) {
        out << q.oracle_iota1 << "," << (q.agrees ? "true" : "false");
    } else {
        out << ",";
    }
    out << "\n";
}

// ---------------------------------------------------------------------------
// Region sweeps

RegionGrid sweep_regions(SurfaceKind s, std::pair<double, double> xi_range,
                         std::pair<double, double> alpha_range, int nx, int na, int jobs) {
    if (nx < 1 || na < 1 || !(xi_range.first < xi_range.second) ||
        !(alpha_range.first < alpha_range.second)) {
        throw std::invalid_argument("sweep_regions: degenerate grid");
    }
    RegionGrid g;
    g.surface = s;
    g.xi_range = xi_range;
    g.alpha_range = alpha_range;
    g.nx = nx;
    g.na = na;
    g.cells.resize(static_cast<size_t>(nx) * na);
    parallel_for(nx * na, jobs, [&](int idx) {
        const int ia = idx / nx, ix = idx % nx;
        // cell centers
        const double xi = xi_range.first + (xi_range.second - xi_range.first) * (ix + 0.5) / nx;
        const double alpha =
            alpha_range.first + (alpha_range.second - alpha_range.first) * (ia + 0.5) / na;
        RegionCell cell;
        cell.xi = xi;
        cell.alpha = alpha;
        const ModelPoint pt{s, xi, alpha};
        try {
            const RegionResult res = region_classify(pt);
            cell.admissible = true;
            if (const auto* b = std::get_if<OnBoundary>(&res)) {
                cell.boundary = true;
                cell.region = b->curve;
            } else {
                const auto& label = std::get<RegionLabel>(res);
                cell.region = label.name;
                cell.iota1 = label.index;
                cell.k = label.k;
                cell.stability = label.stability;
                const CircularOrbit o = orbit_data(pt);
                const double scale = std::max({1.0, std::abs(o.a), std::abs(o.b), std::abs(o.c),
                                               std::abs(o.d)});
                cell.d_sign = sign_of(o.d, 1e-12 * scale);
                cell.cdb2_sign = sign_of(o.c * o.d + o.b * o.b,
                                         1e-12 * std::max({1.0, o.b * o.b, std::abs(o.c * o.d)}));
            }
        } catch (const std::domain_error& e) {
            cell.admissible = false;
            cell.region = e.what();
        }
        g.cells[idx] = cell;
    });
    return g;
}

void write_region_csv(const RegionGrid& g, std::ostream& out) {
    out << "xi,alpha,region,iota1,k,d_sign,cdb2_sign,stability\n";
    for (const auto& c : g.cells) {
        out << fmt(c.xi) << "," << fmt(c.alpha) << ",";
        if (!c.admissible) {
            out << "\"inadmissible:" << c.region << "\",,,,,\n";
        } else if (c.boundary) {
            out << "\"boundary:" << c.region << "\",,,,,\n";
        } else {
            out << "\"" << c.region << "\"," << c.iota1 << "," << c.k << "," << c.d_sign << ","
                << c.cdb2_sign << "," << to_string(c.stability) << "\n";
        }
    }
}

namespace {

const char* kPalette[8] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2",
                           "#59a14f", "#edc949", "#b07aa1", "#9c755f"};

const char* index_color(int iota1) { return kPalette[((iota1 % 8) + 8) % 8]; }

}  // namespace

void write_region_svg(const RegionGrid& g, const std::vector<BoundaryCurve>& curves,
                      std::ostream& out) {
    const double ml = 60, mr = 150, mt = 30, mb = 50;
    const double pw = 640, ph = 480;
    const double W = ml + pw + mr, H = mt + ph + mb;
    const auto [xlo, xhi] = g.xi_range;
    const auto [alo, ahi] = g.alpha_range;
    auto px = [&](double xi) { return ml + (xi - xlo) / (xhi - xlo) * pw; };
    auto py = [&](double al) { return mt + (ahi - al) / (ahi - alo) * ph; };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << W
        << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    out << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";

    const double cw = pw / g.nx, ch = ph / g.na;
    std::set<int> present;
    out << std::fixed << std::setprecision(2);
    for (int ia = 0; ia < g.na; ++ia) {
        for (int ix = 0; ix < g.nx; ++ix) {
            const RegionCell& c = g.cells[static_cast<size_t>(ia) * g.nx + ix];
            const char* color = nullptr;
            if (!c.admissible) continue;
            if (c.boundary) {
                color = "#cccccc";
            } else {
                color = index_color(c.iota1);
                present.insert(c.iota1);
            }
            out << "<rect x=\"" << (ml + ix * cw) << "\" y=\"" << (mt + (g.na - 1 - ia) * ch)
                << "\" width=\"" << cw + 0.5 << "\" height=\"" << ch + 0.5 << "\" fill=\"" << color
                << "\"/>\n";
        }
    }
    for (const auto& curve : curves) {
        if (curve.points.size() < 2) continue;
        out << "<polyline fill=\"none\" stroke=\"#222222\" stroke-width=\"1.5\" points=\"";
        for (const auto& [xi, al] : curve.points) out << px(xi) << "," << py(al) << " ";
        out << "\"/>\n";
    }
    // frame and axis labels
    out << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    out << "<text x=\"" << ml << "\" y=\"" << (mt + ph + 20) << "\" font-size=\"12\">xi=" << xlo
        << "</text>\n";
    out << "<text x=\"" << (ml + pw - 40) << "\" y=\"" << (mt + ph + 20)
        << "\" font-size=\"12\">xi=" << xhi << "</text>\n";
    out << "<text x=\"5\" y=\"" << (mt + ph) << "\" font-size=\"12\">a=" << alo << "</text>\n";
    out << "<text x=\"5\" y=\"" << (mt + 12) << "\" font-size=\"12\">a=" << ahi << "</text>\n";
    // legend: only the indices present
    double ly = mt;
    for (int idx : present) {
        out << "<rect x=\"" << (ml + pw + 20) << "\" y=\"" << ly << "\" width=\"14\" height=\"14\" fill=\""
            << index_color(idx) << "\"/>\n";
        out << "<text x=\"" << (ml + pw + 40) << "\" y=\"" << (ly + 12)
            << "\" font-size=\"12\">index " << idx << "</text>\n";
        ly += 20;
    }
    out << "</svg>\n";
}

// ---------------------------------------------------------------------------
// Orbit runs

OrbitRun run_orbit(const ModelPoint& pt, int periods, int steps_per_period) {
    if (periods < 1 || steps_per_period < 16) {
        throw std::invalid_argument("run_orbit: need periods >= 1 and steps_per_period >= 16");
    }
    OrbitRun r;
    r.orbit = orbit_data(pt);
    r.periods = periods;
    r.steps_per_period = steps_per_period;
    const ELState start{pt.xi0, 0.0, 0.0, std::sqrt(r.orbit.theta_dot_sq)};
    r.trajectory =
        integrate_el(pt.surface, pt.alpha, start, periods * r.orbit.T, periods * steps_per_period);
    r.period_map = monodromy(r.orbit.generator(), r.orbit.T);
    r.floquet = floquet(r.period_map);
    r.stability = stability_verdict(r.orbit.a, r.orbit.b, r.orbit.c, r.orbit.d);
    r.xi_drift = r.trajectory.max_xi_deviation(pt.xi0);
    r.angular_momentum_drift = r.trajectory.angular_momentum_drift();
    return r;
}

void write_trajectory_csv(const OrbitRun& r, std::ostream& out) {
    out << "t,xi,theta,xidot,thetadot,angmom\n";
    for (size_t i = 0; i < r.trajectory.times.size(); ++i) {
        const auto& st = r.trajectory.states[i];
        out << fmt(r.trajectory.times[i]) << "," << fmt(st.xi) << "," << fmt(st.theta) << ","
            << fmt(st.xi_dot) << "," << fmt(st.theta_dot) << ","
            << fmt(r.trajectory.angular_momentum[i]) << "\n";
    }
}

void write_orbit_json(const OrbitRun& r, std::ostream& out) {
    json j;
    j["surface"] = to_string(r.orbit.point.surface);
    j["xi"] = r.orbit.point.xi0;
    j["alpha"] = r.orbit.point.alpha;
    j["periods"] = r.periods;
    j["steps_per_period"] = r.steps_per_period;
    j["period"] = r.orbit.T;
    json coeffs;
    coeffs["a"] = r.orbit.a;
    coeffs["b"] = r.orbit.b;
    coeffs["c"] = r.orbit.c;
    coeffs["d"] = r.orbit.d;
    j["coefficients"] = coeffs;
    json mult = json::array();
    for (const auto& z : r.floquet.multipliers) {
        mult.push_back(json::array({z.real(), z.imag()}));
    }
    j["multipliers"] = mult;
    j["max_multiplier_abs"] = r.floquet.max_abs;
    j["power_growth_ratio"] = r.floquet.growth_ratio;
    j["floquet_tag"] = to_string(r.floquet.tag);
    j["stability"] = to_string(r.stability);
    j["xi_drift"] = r.xi_drift;
    j["angular_momentum_drift"] = r.angular_momentum_drift;
    out << j.dump(2) << "\n";
}

}  // namespace symorb
