#include "gtr/density.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gtr {

namespace {

constexpr double kNormalizationTol = 1e-12;

void check_in_domain(double x) {
    if (!(x >= -1.0 && x <= 1.0)) {
        throw std::domain_error("coordinate outside [-1, 1]");
    }
}

}  // namespace

BreakDensity::BreakDensity(Uniform form) : form_(form) {}

BreakDensity::BreakDensity(LocallyUniform form) : form_(form) {
    if (!(form.half_width > 0.0)) {
        throw std::invalid_argument("locally uniform density needs half_width > 0");
    }
    if (!(form.center > -1.0 && form.center < 1.0)) {
        throw std::invalid_argument("locally uniform center must lie in (-1, 1)");
    }
    if (form.center - form.half_width < -1.0 || form.center + form.half_width > 1.0) {
        throw std::invalid_argument("locally uniform support must stay inside [-1, 1]");
    }
}

BreakDensity::BreakDensity(PiecewiseConstant form) : form_(std::move(form)) {
    const auto& pc = std::get<PiecewiseConstant>(form_);
    if (pc.breakpoints.size() < 2) {
        throw std::invalid_argument("piecewise density needs at least two breakpoints");
    }
    if (pc.weights.size() + 1 != pc.breakpoints.size()) {
        throw std::invalid_argument("piecewise density needs one weight per cell");
    }
    if (pc.breakpoints.front() != -1.0 || pc.breakpoints.back() != 1.0) {
        throw std::invalid_argument("piecewise breakpoints must start at -1 and end at 1");
    }
    for (std::size_t i = 0; i + 1 < pc.breakpoints.size(); ++i) {
        if (!(pc.breakpoints[i] < pc.breakpoints[i + 1])) {
            throw std::invalid_argument("piecewise breakpoints must be strictly increasing");
        }
    }
    double total = 0.0;
    for (double w : pc.weights) {
        if (!(w >= 0.0)) {
            throw std::invalid_argument("piecewise weights must be nonnegative");
        }
        total += w;
    }
    if (std::abs(total - 1.0) > kNormalizationTol) {
        throw std::invalid_argument("piecewise weights must sum to 1");
    }
    // Canonicalize within the accepted slack so cdf(1) is exactly 1. A total
    // already within rounding error of 1 keeps the weight bits, so a density
    // round trips byte for byte through serialization.
    auto& weights = std::get<PiecewiseConstant>(form_).weights;
    if (std::abs(total - 1.0) > 1e-13) {
        for (double& w : weights) w /= total;
    }
    prefix_.resize(weights.size() + 1);
    prefix_[0] = 0.0;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) prefix_[i + 1] = prefix_[i] + weights[i];
    prefix_.back() = 1.0;
}

double BreakDensity::pdf_at(double x) const {
    check_in_domain(x);
    if (std::holds_alternative<Uniform>(form_)) {
        return 0.5;
    }
    if (const auto* lu = std::get_if<LocallyUniform>(&form_)) {
        const double lo = lu->center - lu->half_width;
        const double hi = lu->center + lu->half_width;
        return (x >= lo && x < hi) ? 1.0 / (2.0 * lu->half_width) : 0.0;
    }
    const auto& pc = std::get<PiecewiseConstant>(form_);
    const auto& b = pc.breakpoints;
    auto it = std::upper_bound(b.begin(), b.end(), x);
    std::size_t cell = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - b.begin() - 1, 0));
    cell = std::min(cell, pc.weights.size() - 1);
    return pc.weights[cell] / (b[cell + 1] - b[cell]);
}

double BreakDensity::cdf(double x) const {
    check_in_domain(x);
    if (std::holds_alternative<Uniform>(form_)) {
        return 0.5 * (x + 1.0);
    }
    if (const auto* lu = std::get_if<LocallyUniform>(&form_)) {
        const double lo = lu->center - lu->half_width;
        const double hi = lu->center + lu->half_width;
        if (x <= lo) return 0.0;
        if (x >= hi) return 1.0;
        return std::min(1.0, (x - lo) / (2.0 * lu->half_width));
    }
    const auto& pc = std::get<PiecewiseConstant>(form_);
    const auto& b = pc.breakpoints;
    auto it = std::upper_bound(b.begin(), b.end(), x);
    std::size_t cell = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - b.begin() - 1, 0));
    if (cell >= pc.weights.size()) return prefix_.back();
    const double frac = (x - b[cell]) / (b[cell + 1] - b[cell]);
    // x = 1 lands in the last cell with frac = 1; take the stored cumulative
    // weight instead of re-adding, which can round below it.
    if (frac >= 1.0) return prefix_[cell + 1];
    return std::min(prefix_[cell] + pc.weights[cell] * frac, 1.0);
}

double BreakDensity::integrate(double x1, double x2) const {
    if (!(x1 >= -1.0 && x2 <= 1.0 && x1 <= x2)) {
        throw std::domain_error("integration limits must satisfy -1 <= x1 <= x2 <= 1");
    }
    return cdf(x2) - cdf(x1);
}

double BreakDensity::inverse_cdf(double u) const {
    if (!(u >= 0.0 && u <= 1.0)) {
        throw std::domain_error("quantile argument outside [0, 1]");
    }
    if (std::holds_alternative<Uniform>(form_)) {
        return 2.0 * u - 1.0;
    }
    if (const auto* lu = std::get_if<LocallyUniform>(&form_)) {
        const double lo = lu->center - lu->half_width;
        const double hi = lu->center + lu->half_width;
        return std::clamp(lo + 2.0 * lu->half_width * u, lo, hi);
    }
    const auto& pc = std::get<PiecewiseConstant>(form_);
    const auto& b = pc.breakpoints;
    for (std::size_t cell = 0; cell < pc.weights.size(); ++cell) {
        if (prefix_[cell + 1] >= u) {
            if (u <= prefix_[cell]) return b[cell];
            const double frac = (u - prefix_[cell]) / pc.weights[cell];
            return std::min(b[cell] + frac * (b[cell + 1] - b[cell]), b[cell + 1]);
        }
    }
    // u exceeded the stored total (possible within the normalization slack).
    return 1.0;
}

}  // namespace gtr
