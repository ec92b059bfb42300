// closed_form.hpp — the complete case table for the generalized Conley-Zehnder
// index of the autonomous path e^{A t}, t in [0, T], in terms of the generator
// coefficients (a, b, c, d) and the rotation count k.

#pragma once

#include <optional>
#include <string>

namespace symorb {

enum class DSign { Negative, Zero, Positive };

enum class Subcase {
    CdB2Pos,      // d != 0 rows split by cd + b^2
    CdB2Zero,
    CdB2Neg,
    BZeroCPos,    // d = 0 rows split by b and c
    BZeroCNonpos,
    BNonzero,
};

struct CaseTag {
    DSign d_sign{DSign::Zero};
    Subcase subcase{Subcase::BNonzero};
    std::optional<int> k;        // rotation count, present iff d < 0
    bool model_feasible{true};   // false for rows that require c <= 0 (index -1)

    std::string row_name() const;
};

// The unique k >= 0 with k*2pi < sqrt(-a d)*T <= (k+1)*2pi; the right endpoint
// belongs to k. Requires a > 0, d < 0, T > 0.
int compute_k(double a, double d, double T);

// Case membership of (a, b, c, d); comparisons against the d = 0 and
// cd + b^2 = 0 boundaries use a 1e-12 relative tolerance.
CaseTag classify_generator(double a, double b, double c, double d);

struct ClosedFormIndex {
    int iota1{0};
    CaseTag tag;
};

// iota1 of the fundamental solution on [0, T]:
//   d < 0:  2k if cd + b^2 >= 0, else 2k + 1
//   d = 0:  0 if b != 0 or (b = 0 and c > 0), else -1
//   d > 0:  0 if cd + b^2 > 0, else -1.
ClosedFormIndex closed_form_iota1(double a, double b, double c, double d, double T);

}  // namespace symorb
