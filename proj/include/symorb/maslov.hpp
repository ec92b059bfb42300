// maslov.hpp — intersection indices of symplectic paths starting at the
// identity: crossing detection, crossing forms, the graph index relative to
// the diagonal, the generalized Conley-Zehnder index iota_1 = clm - n, and the
// closed formula for lower-block-triangular paths.

#pragma once

#include "symorb/linalg.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace symorb {

// Path t -> gamma(t) in Sp(2n), gamma(0) = I. Either autonomous (flow of a
// fixed generator, evaluable at any t) or a sampled table (interpolated).
class SymplecticPath {
public:
    // Autonomous path e^{A t} for a model generator (exact flow).
    SymplecticPath(const Generator& g, double T, int steps = 256);
    // Autonomous path e^{A t} for a general Hamiltonian matrix (Pade flow).
    SymplecticPath(const Mat& a, double T, int steps = 256);
    // Explicit sample table; times strictly increasing, first 0, last T,
    // first sample must be the identity.
    SymplecticPath(std::vector<double> times, std::vector<Mat> samples);

    int half_dim() const { return n_; }
    int dim() const { return 2 * n_; }
    double duration() const { return t_end_; }
    bool autonomous() const { return model_.has_value() || gen_.has_value(); }
    const std::optional<Generator>& model() const { return model_; }

    Mat value(double t) const;            // gamma(t)
    Mat logarithmic_velocity(double t) const;  // gamma'(t) gamma(t)^{-1}
    double generator_norm() const;        // ||A||_inf, or a finite-difference estimate

    const std::vector<double>& times() const { return ts_; }
    const std::vector<Mat>& samples() const { return samples_; }

private:
    void init_samples(int steps);
    void validate() const;

    int n_{1};
    double t_end_{1.0};
    std::optional<Generator> model_;
    std::optional<Mat> gen_;
    std::vector<double> ts_;
    std::vector<Mat> samples_;
};

SymplecticPath fundamental_solution(const Generator& g, double T, int steps = 256);
SymplecticPath fundamental_solution(const Mat& a, double T, int steps = 256);

enum class CrossingLocation { Start, Interior, End };

// An instant with det(gamma(t) - I) = 0, together with the inertia of the
// crossing form <-J gamma' gamma^{-1} u, u> on ker(gamma(t) - I).
struct Crossing {
    double t{0.0};
    int kernel_dim{0};
    int m_plus{0};
    int m_minus{0};
    CrossingLocation location{CrossingLocation::Interior};

    bool regular() const { return m_plus + m_minus == kernel_dim; }
    int signature() const { return m_plus - m_minus; }
};

// Result of scanning a path for crossings. An interval where
// det(gamma(t) - I) vanishes identically is reported as a continuous band
// rather than a list of instants.
struct CrossingScan {
    std::vector<Crossing> crossings;
    std::vector<std::pair<double, double>> continuous_bands;

    bool all_regular() const;
};

struct degenerate_crossing : std::runtime_error {
    degenerate_crossing(double lo, double hi);
    double t_lo, t_hi;
};

struct epsilon_exhausted : std::runtime_error {
    epsilon_exhausted();
};

// All crossings of the raw path; tol is the relative kernel-rank threshold
// applied to the singular values of gamma(t) - I.
CrossingScan detect_crossings(const SymplecticPath& path, double tol = 1e-8);

// Inertia (m+, m-) of the crossing form at t0; t0 must be a crossing.
std::pair<int, int> crossing_form(const SymplecticPath& path, double t0);

// Graph index relative to the diagonal:
//   m+(form at 0) + sum over interior crossings of sgn(form) - m-(form at T),
// computed on the raw path when every crossing is regular, else on the
// perturbed path e^{-eps J} gamma(t) e^{-eps J} (the graph of gamma rotated by
// the positive complex structure of the product space) with eps halved until
// the integer is stable over three consecutive values. One-sided perturbation
// is not monotone and can annihilate crossing pairs; the two-sided form
// cannot.
int clm_index(const SymplecticPath& path);

struct IndexResult {
    int clm{0};
    int iota1{0};
    std::vector<Crossing> crossings;  // crossings used by the final evaluation
    double epsilon_used{0.0};         // 0 when the raw path was regular
};

// iota1 = clm - n, with the crossing record attached.
IndexResult iota1(const SymplecticPath& path);

// Index of a lower-block-triangular path [[M11, 0], [M21, M22]] relative to
// the graph of the identity:
//   m+(M11(T)^T M21(T)|_{S(T)}) - m+(M11(0)^T M21(0)|_{S(0)})
//     + dim S(0) - dim S(T),   S(t) = ker(M11(t) - I).
int zhu_index(const SymplecticPath& path);

namespace detail {

// Graph index of gamma restricted to [t_lo, t_hi], optionally of the
// perturbed path e^{-eps J} gamma e^{-eps J}. Raw route requires regular
// crossings.
int clm_segment(const SymplecticPath& path, double t_lo, double t_hi);
std::optional<int> clm_segment_perturbed(const SymplecticPath& path, double eps, double t_lo,
                                         double t_hi);

}  // namespace detail

}  // namespace symorb
