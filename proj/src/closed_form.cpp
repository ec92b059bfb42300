#include "symorb/closed_form.hpp"

#include <cmath>
#include <stdexcept>

namespace symorb {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

double coeff_scale(double a, double b, double c, double d) {
    return std::max({1.0, std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
}

double discriminant_scale(double b, double c, double d) {
    return std::max({1.0, b * b, std::abs(c * d)});
}

}  // namespace

std::string CaseTag::row_name() const {
    std::string s;
    switch (d_sign) {
        case DSign::Negative: s = "d<0"; break;
        case DSign::Zero: s = "d=0"; break;
        case DSign::Positive: s = "d>0"; break;
    }
    switch (subcase) {
        case Subcase::CdB2Pos: s += ", cd+b^2>0"; break;
        case Subcase::CdB2Zero: s += ", cd+b^2=0"; break;
        case Subcase::CdB2Neg: s += ", cd+b^2<0"; break;
        case Subcase::BZeroCPos: s += ", b=0, c>0"; break;
        case Subcase::BZeroCNonpos: s += ", b=0, c<=0"; break;
        case Subcase::BNonzero: s += ", b!=0"; break;
    }
    if (k) s += ", k=" + std::to_string(*k);
    return s;
}

int compute_k(double a, double d, double T) {
    if (!(a > 0.0)) throw std::invalid_argument("compute_k: a must be positive");
    if (!(d < 0.0)) throw std::invalid_argument("compute_k: d must be negative");
    if (!(T > 0.0)) throw std::invalid_argument("compute_k: T must be positive");
    const double q = std::sqrt(-a * d) * T / (2.0 * kPi);
    const double qr = std::round(q);
    // Exact multiples of 2pi belong to the lower band.
    if (qr >= 1.0 && std::abs(q - qr) <= 1e-12 * std::max(1.0, q)) {
        return static_cast<int>(qr) - 1;
    }
    return static_cast<int>(std::ceil(q)) - 1;
}

CaseTag classify_generator(double a, double b, double c, double d) {
    if (!(a > 0.0)) throw std::invalid_argument("classify_generator: a must be positive");
    CaseTag tag;
    const double scale = coeff_scale(a, b, c, d);
    const bool d_zero = std::abs(d) <= 1e-12 * scale;
    const double s = c * d + b * b;
    const bool s_zero = std::abs(s) <= 1e-12 * discriminant_scale(b, c, d);

    if (d_zero) {
        tag.d_sign = DSign::Zero;
        const bool b_zero = std::abs(b) <= 1e-12 * scale;
        if (!b_zero) {
            tag.subcase = Subcase::BNonzero;
        } else if (c > 0.0) {
            tag.subcase = Subcase::BZeroCPos;
        } else {
            tag.subcase = Subcase::BZeroCNonpos;
            tag.model_feasible = false;  // needs c <= 0
        }
        return tag;
    }
    tag.d_sign = d < 0.0 ? DSign::Negative : DSign::Positive;
    tag.subcase = s_zero ? Subcase::CdB2Zero : (s > 0.0 ? Subcase::CdB2Pos : Subcase::CdB2Neg);
    if (tag.d_sign == DSign::Positive && s <= 0.0) tag.model_feasible = false;
    return tag;
}

ClosedFormIndex closed_form_iota1(double a, double b, double c, double d, double T) {
    if (!(T > 0.0)) throw std::invalid_argument("closed_form_iota1: T must be positive");
    ClosedFormIndex out;
    out.tag = classify_generator(a, b, c, d);
    switch (out.tag.d_sign) {
        case DSign::Negative: {
            const int k = compute_k(a, d, T);
            out.tag.k = k;
            out.iota1 = (out.tag.subcase == Subcase::CdB2Neg) ? 2 * k + 1 : 2 * k;
            break;
        }
        case DSign::Zero:
            out.iota1 = (out.tag.subcase == Subcase::BZeroCNonpos) ? -1 : 0;
            break;
        case DSign::Positive:
            out.iota1 = (out.tag.subcase == Subcase::CdB2Pos) ? 0 : -1;
            break;
    }
    return out;
}

}  // namespace symorb
