#include "symorb/cli.hpp"

#include "symorb/report.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <thread>

namespace symorb {

namespace {

bool use_color(std::ostream& err) {
    (void)err;
    return std::getenv("NO_COLOR") == nullptr;
}

std::string paint(const std::string& s, const char* code, bool enabled) {
    if (!enabled) return s;
    return std::string("\033[") + code + "m" + s + "\033[0m";
}

struct RangeArg {
    double lo{0.0}, hi{0.0};
};

// "a:b" -> [a, b]
bool parse_range(const std::string& text, RangeArg& r) {
    const auto pos = text.find(':');
    if (pos == std::string::npos) return false;
    try {
        r.lo = std::stod(text.substr(0, pos));
        r.hi = std::stod(text.substr(pos + 1));
    } catch (...) {
        return false;
    }
    return true;
}

SurfaceKind parse_surface(const std::string& name) {
    if (name == "sphere") return SurfaceKind::Sphere;
    if (name == "hyperbolic") return SurfaceKind::Hyperbolic;
    if (name == "euclidean") return SurfaceKind::Euclidean;
    throw CLI::ValidationError("--surface", "expected sphere|hyperbolic|euclidean");
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open output file: " + path);
    return f;
}

int cmd_index(const std::string& surface, double xi, double alpha, bool verify, bool csv,
              std::ostream& out) {
    const ModelPoint pt{parse_surface(surface), xi, alpha};
    const QueryReport q = query_point(pt, verify);
    if (csv) {
        write_query_csv(q, out);
    } else {
        write_query_json(q, out);
    }
    if (!q.admissible) return 2;
    if (q.on_boundary) return 3;
    if (q.verified && !q.agrees) return 1;
    return 0;
}

int cmd_regions(const std::string& surface, const RangeArg& xi_range, const RangeArg& alpha_range,
                int nx, int na, const std::string& prefix, int jobs, std::ostream& err) {
    const SurfaceKind s = parse_surface(surface);
    if (!(xi_range.lo < xi_range.hi) || !(alpha_range.lo < alpha_range.hi) || nx < 1 || na < 1) {
        err << "regions: degenerate grid\n";
        return 64;
    }
    const RegionGrid grid = sweep_regions(s, {xi_range.lo, xi_range.hi},
                                          {alpha_range.lo, alpha_range.hi}, nx, na, jobs);
    const auto curves = boundary_curves(s, {xi_range.lo, xi_range.hi},
                                        {alpha_range.lo, alpha_range.hi}, std::max(nx, 256));
    auto csv = open_out(prefix + ".csv");
    write_region_csv(grid, csv);
    auto svg = open_out(prefix + ".svg");
    write_region_svg(grid, curves, svg);
    err << "regions: wrote " << prefix << ".csv and " << prefix << ".svg\n";
    return 0;
}

int cmd_verify(int samples, std::uint64_t seed, double guard, int jobs, std::ostream& out,
               std::ostream& err) {
    const VerifyReport rep = run_campaign(samples, seed, guard, jobs);
    write_verify_json(rep, out);
    const bool ok = rep.disagreements.empty();
    const bool color = use_color(err);
    err << "verify: " << rep.agreements << "/" << rep.admissible << " agreements ("
        << rep.requested << " drawn) in " << rep.wall_seconds << " s: "
        << (ok ? paint("ok", "32", color) : paint("DISAGREE", "31", color)) << "\n";
    return ok ? 0 : 1;
}

int cmd_orbit(const std::string& surface, double xi, double alpha, int periods,
              int steps_per_period, const std::string& prefix, std::ostream& err) {
    const ModelPoint pt{parse_surface(surface), xi, alpha};
    OrbitRun r;
    try {
        r = run_orbit(pt, periods, steps_per_period);
    } catch (const inadmissible_point& e) {
        err << "orbit: " << e.what() << "\n";
        return 2;
    }
    auto csv = open_out(prefix + ".csv");
    write_trajectory_csv(r, csv);
    auto jsonf = open_out(prefix + ".json");
    write_orbit_json(r, jsonf);
    err << "orbit: wrote " << prefix << ".csv and " << prefix << ".json (xi drift " << r.xi_drift
        << ", angular momentum drift " << r.angular_momentum_drift << ")\n";
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"circular-orbit index and stability toolkit"};
    app.require_subcommand(1);
    const int hw = std::max(1u, std::thread::hardware_concurrency());

    // index
    auto* index = app.add_subcommand("index", "index and stability of one (xi, alpha) point");
    std::string surface;
    double xi = 1.0, alpha = -1.0;
    bool verify = false, as_csv = false, as_json = false;
    index->add_option("--surface", surface, "sphere|hyperbolic|euclidean")->required();
    index->add_option("--xi", xi, "normalized radius xi0")->required();
    index->add_option("--alpha", alpha, "power-law exponent")->required();
    index->add_flag("--verify", verify, "also run the numerical crossing-count oracle");
    index->add_flag("--json", as_json, "JSON output (default)");
    index->add_flag("--csv", as_csv, "CSV output");

    // regions
    auto* regions = app.add_subcommand("regions", "sweep a parameter window into CSV + SVG");
    std::string r_surface, xi_range_s, alpha_range_s, out_prefix;
    int nx = 200, na = 200, jobs = hw;
    regions->add_option("--surface", r_surface, "sphere|hyperbolic|euclidean")->required();
    regions->add_option("--xi-range", xi_range_s, "xi window lo:hi")->required();
    regions->add_option("--alpha-range", alpha_range_s, "alpha window lo:hi")->required();
    regions->add_option("--nx", nx, "grid cells along xi");
    regions->add_option("--na", na, "grid cells along alpha");
    regions->add_option("--out", out_prefix, "output path prefix")->required();
    regions->add_option("--jobs", jobs, "worker threads");

    // verify
    auto* ver = app.add_subcommand("verify", "randomized closed-form vs oracle campaign");
    int samples = 1000;
    std::uint64_t seed = 7;
    double guard = 1e-6;
    int vjobs = hw;
    ver->add_option("--samples", samples, "number of generators to draw");
    ver->add_option("--seed", seed, "RNG seed");
    ver->add_option("--guard", guard, "guard band around table boundaries");
    ver->add_option("--jobs", vjobs, "worker threads");

    // orbit
    auto* orb = app.add_subcommand("orbit", "integrate a circular orbit and report its monodromy");
    std::string o_surface, o_prefix;
    double o_xi = 1.0, o_alpha = -1.0;
    int periods = 3, spp = 2048;
    orb->add_option("--surface", o_surface, "sphere|hyperbolic|euclidean")->required();
    orb->add_option("--xi", o_xi, "normalized radius xi0")->required();
    orb->add_option("--alpha", o_alpha, "power-law exponent")->required();
    orb->add_option("--periods", periods, "number of prime periods");
    orb->add_option("--steps-per-period", spp, "RK4 steps per period");
    orb->add_option("--out", o_prefix, "output path prefix")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n" << app.help();
        return 64;
    }

    try {
        if (app.got_subcommand(index)) {
            return cmd_index(surface, xi, alpha, verify, as_csv && !as_json, out);
        }
        if (app.got_subcommand(regions)) {
            RangeArg xr, ar;
            if (!parse_range(xi_range_s, xr) || !parse_range(alpha_range_s, ar)) {
                err << "regions: ranges must be lo:hi\n";
                return 64;
            }
            return cmd_regions(r_surface, xr, ar, nx, na, out_prefix, jobs, err);
        }
        if (app.got_subcommand(ver)) {
            return cmd_verify(samples, seed, guard, vjobs, out, err);
        }
        if (app.got_subcommand(orb)) {
            return cmd_orbit(o_surface, o_xi, o_alpha, periods, spp, o_prefix, err);
        }
    } catch (const CLI::ValidationError& e) {
        err << e.what() << "\n";
        return 64;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 70;
    }
    err << app.help();
    return 64;
}

}  // namespace symorb
