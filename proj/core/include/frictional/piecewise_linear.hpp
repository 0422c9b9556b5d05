#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace frictional {

/// Continuous 1-d piecewise-linear function given by breakpoints and values,
/// extended beyond the first/last breakpoint with explicit terminal slopes.
///
/// All curve-like data in the library (bid/ask curves, payoff curves, utility
/// functions, adjusted-ES offsets) is piecewise linear, which keeps function
/// evaluation, Lipschitz bounds and asymptotic slopes exact.
class PiecewiseLinear {
public:
    /// Single affine segment of the function. lo/hi may be +/-infinity.
    struct Segment {
        double lo, hi;
        double slope, intercept;  // f(x) = slope*x + intercept on [lo, hi]
    };

    PiecewiseLinear() : xs_{0.0}, ys_{0.0}, slope_left_(0.0), slope_right_(0.0) {}

    /// xs strictly increasing; ys same length; terminal slopes extend the graph.
    PiecewiseLinear(std::vector<double> xs, std::vector<double> ys,
                    double slope_left, double slope_right);

    /// Affine function a*x + b.
    static PiecewiseLinear affine(double a, double b = 0.0);

    double operator()(double x) const;

    const std::vector<double>& breakpoints() const { return xs_; }
    const std::vector<double>& values() const { return ys_; }
    double slope_left() const { return slope_left_; }
    double slope_right() const { return slope_right_; }

    /// All affine segments in order, first with lo=-inf, last with hi=+inf.
    std::vector<Segment> segments() const;

    /// Slopes in order: terminal left, interior segment slopes, terminal right.
    std::vector<double> slopes() const;

    bool is_convex(double tol = 1e-12) const;
    bool is_concave(double tol = 1e-12) const;
    bool is_nondecreasing(double tol = 1e-12) const;
    bool is_affine(double tol = 1e-12) const;

    /// max |slope| over all segments.
    double lipschitz_bound() const;

    /// Asymptotic value along a ray: lim f(t*x)/t for t -> +inf.
    /// Exact for piecewise-linear data (terminal slope times x).
    double asymptotic(double x) const;

private:
    std::vector<double> xs_, ys_;
    double slope_left_, slope_right_;
};

/// Doubling-limit estimate of lim f(t*x)/t, the generic asymptotic-function
/// oracle used by tests and by non-piecewise fallbacks. `doublings` caps the
/// escalation; the estimate is exact once f is affine beyond the last probe.
double asymptotic_by_doubling(const PiecewiseLinear& f, double x, int doublings = 40);

}  // namespace frictional
