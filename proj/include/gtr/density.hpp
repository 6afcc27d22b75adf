#pragma once

#include <stdexcept>
#include <variant>
#include <vector>

namespace gtr {

struct Uniform {};

struct LocallyUniform {
    double center = 0.0;
    double half_width = 0.0;
};

struct PiecewiseConstant {
    std::vector<double> breakpoints;  // -1 = b0 < b1 < ... < bn = 1
    std::vector<double> weights;      // n nonnegative values summing to 1
};

/// Normalized probability density on [-1, 1] describing where a measurement
/// elastic breaks. Three closed-form families; PiecewiseConstant is the
/// universal approximator for everything else.
class BreakDensity {
public:
    explicit BreakDensity(Uniform form);
    explicit BreakDensity(LocallyUniform form);
    explicit BreakDensity(PiecewiseConstant form);

    static BreakDensity uniform() { return BreakDensity(Uniform{}); }
    static BreakDensity locally_uniform(double center, double half_width) {
        return BreakDensity(LocallyUniform{center, half_width});
    }
    static BreakDensity piecewise(std::vector<double> breakpoints, std::vector<double> weights) {
        return BreakDensity(PiecewiseConstant{std::move(breakpoints), std::move(weights)});
    }

    /// Density value at x. Cell boundaries take the right cell's value.
    double pdf_at(double x) const;

    /// Probability that the break point falls in [x1, x2]; exact closed form.
    double integrate(double x1, double x2) const;

    /// integrate(-1, x); nondecreasing with cdf(-1) = 0 and cdf(1) = 1.
    double cdf(double x) const;

    /// Quantile: smallest x with cdf(x) >= u (support infimum at u = 0).
    double inverse_cdf(double u) const;

    /// Draws a break point via inverse-CDF sampling; consumes exactly one
    /// uniform draw, so identically seeded streams reproduce samples.
    template <class Stream>
    double sample_break_point(Stream& rng) const {
        return inverse_cdf(rng.next_uniform());
    }

    const std::variant<Uniform, LocallyUniform, PiecewiseConstant>& form() const { return form_; }

private:
    std::variant<Uniform, LocallyUniform, PiecewiseConstant> form_;
    std::vector<double> prefix_;  // cumulative weights, piecewise form only
};

}  // namespace gtr
