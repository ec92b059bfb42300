// report.hpp — point queries, parameter-plane sweeps, the randomized
// verification campaign, orbit runs, and their CSV/JSON/SVG serializations.

#pragma once

#include "symorb/closed_form.hpp"
#include "symorb/dynamics.hpp"
#include "symorb/maslov.hpp"
#include "symorb/surface.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace symorb {

// Deterministic uniform sampler: a fixed 53-bit mapping on top of
// mt19937_64, so identical seeds give identical streams on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    // value in (lo, hi]
    double open_closed(double lo, double hi) { return hi - (hi - lo) * uniform01(); }
    // value in [lo, hi)
    double closed_open(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
    std::uint64_t raw() { return eng_(); }

private:
    std::mt19937_64 eng_;
};

// Run f(i) for i in [0, n) on up to `jobs` threads; slot-indexed writes keep
// results deterministic regardless of scheduling.
void parallel_for(int n, int jobs, const std::function<void(int)>& f);

// ---------------------------------------------------------------------------
// Verification campaign

struct CampaignSample {
    double a, b, c, d, T;
};

// Coefficients drawn as a in (0.1, 5], b, c, d in [-5, 5), T in (0.5, 20].
CampaignSample draw_campaign_sample(Rng& rng);

// Guard band: rejects samples within `guard` of the d = 0, cd + b^2 = 0 and
// rotation-count boundaries, where the table is discontinuous and the
// numerical oracle cannot certify a tie.
bool campaign_admissible(const CampaignSample& s, double guard);

struct Disagreement {
    CampaignSample sample;
    int closed_form;
    int numeric;
};

struct VerifyReport {
    int requested{0};
    std::uint64_t seed{0};
    double guard{1e-6};
    int admissible{0};
    int agreements{0};
    std::vector<Disagreement> disagreements;
    double wall_seconds{0.0};  // reported on stderr, not part of the JSON
};

VerifyReport run_campaign(int samples, std::uint64_t seed, double guard, int jobs);
void write_verify_json(const VerifyReport& r, std::ostream& out);

// ---------------------------------------------------------------------------
// Point queries

struct QueryReport {
    ModelPoint point;
    bool admissible{false};
    std::string error;           // set when inadmissible
    bool on_boundary{false};
    std::string boundary_curve;  // set when on a separatrix
    std::optional<CircularOrbit> orbit;
    CaseTag tag;
    int iota1{0};
    std::string region;
    int k{-1};
    Stability stability{Stability::UnstableJordan};
    bool verified{false};
    int oracle_iota1{0};
    bool agrees{false};
};

QueryReport query_point(const ModelPoint& pt, bool verify);
void write_query_json(const QueryReport& q, std::ostream& out);
void write_query_csv(const QueryReport& q, std::ostream& out);

// ---------------------------------------------------------------------------
// Region sweeps

struct RegionCell {
    double xi{0.0}, alpha{0.0};
    bool admissible{false};
    bool boundary{false};
    std::string region;  // region name, boundary curve, or constraint
    int iota1{0};
    int k{-1};
    int d_sign{0};
    int cdb2_sign{0};
    Stability stability{Stability::UnstableJordan};
};

struct RegionGrid {
    SurfaceKind surface{SurfaceKind::Euclidean};
    std::pair<double, double> xi_range, alpha_range;
    int nx{0}, na{0};
    std::vector<RegionCell> cells;  // row-major, xi fastest
};

RegionGrid sweep_regions(SurfaceKind s, std::pair<double, double> xi_range,
                         std::pair<double, double> alpha_range, int nx, int na, int jobs);
void write_region_csv(const RegionGrid& g, std::ostream& out);
void write_region_svg(const RegionGrid& g, const std::vector<BoundaryCurve>& curves,
                      std::ostream& out);

// ---------------------------------------------------------------------------
// Orbit runs

struct OrbitRun {
    CircularOrbit orbit;
    int periods{1};
    int steps_per_period{2048};
    Trajectory trajectory;
    Mat period_map;
    FloquetResult floquet;
    Stability stability{Stability::UnstableJordan};
    double xi_drift{0.0};
    double angular_momentum_drift{0.0};
};

OrbitRun run_orbit(const ModelPoint& pt, int periods, int steps_per_period);
void write_trajectory_csv(const OrbitRun& r, std::ostream& out);
void write_orbit_json(const OrbitRun& r, std::ostream& out);

}  // namespace symorb
