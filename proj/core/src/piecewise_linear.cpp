#include "frictional/piecewise_linear.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace frictional {

PiecewiseLinear::PiecewiseLinear(std::vector<double> xs, std::vector<double> ys,
                                 double slope_left, double slope_right)
    : xs_(std::move(xs)), ys_(std::move(ys)),
      slope_left_(slope_left), slope_right_(slope_right) {
    if (xs_.empty() || xs_.size() != ys_.size())
        throw std::invalid_argument("piecewise-linear: breakpoint/value size mismatch");
    for (std::size_t i = 1; i < xs_.size(); ++i)
        if (!(xs_[i] > xs_[i - 1]))
            throw std::invalid_argument("piecewise-linear: breakpoints must be strictly increasing");
}

PiecewiseLinear PiecewiseLinear::affine(double a, double b) {
    return PiecewiseLinear({0.0}, {b}, a, a);
}

double PiecewiseLinear::operator()(double x) const {
    if (x <= xs_.front()) return ys_.front() + slope_left_ * (x - xs_.front());
    if (x >= xs_.back()) return ys_.back() + slope_right_ * (x - xs_.back());
    auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    std::size_t i = static_cast<std::size_t>(it - xs_.begin());  // xs_[i-1] < x < xs_[i]
    double t = (x - xs_[i - 1]) / (xs_[i] - xs_[i - 1]);
    return ys_[i - 1] + t * (ys_[i] - ys_[i - 1]);
}

std::vector<PiecewiseLinear::Segment> PiecewiseLinear::segments() const {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<Segment> out;
    out.push_back({-inf, xs_.front(), slope_left_,
                   ys_.front() - slope_left_ * xs_.front()});
    for (std::size_t i = 1; i < xs_.size(); ++i) {
        double s = (ys_[i] - ys_[i - 1]) / (xs_[i] - xs_[i - 1]);
        out.push_back({xs_[i - 1], xs_[i], s, ys_[i - 1] - s * xs_[i - 1]});
    }
    out.push_back({xs_.back(), inf, slope_right_,
                   ys_.back() - slope_right_ * xs_.back()});
    return out;
}

std::vector<double> PiecewiseLinear::slopes() const {
    std::vector<double> out;
    out.push_back(slope_left_);
    for (std::size_t i = 1; i < xs_.size(); ++i)
        out.push_back((ys_[i] - ys_[i - 1]) / (xs_[i] - xs_[i - 1]));
    out.push_back(slope_right_);
    return out;
}

bool PiecewiseLinear::is_convex(double tol) const {
    auto ss = slopes();
    for (std::size_t i = 1; i < ss.size(); ++i)
        if (ss[i] < ss[i - 1] - tol) return false;
    return true;
}

bool PiecewiseLinear::is_concave(double tol) const {
    auto ss = slopes();
    for (std::size_t i = 1; i < ss.size(); ++i)
        if (ss[i] > ss[i - 1] + tol) return false;
    return true;
}

bool PiecewiseLinear::is_nondecreasing(double tol) const {
    for (double s : slopes())
        if (s < -tol) return false;
    return true;
}

bool PiecewiseLinear::is_affine(double tol) const {
    auto ss = slopes();
    for (double s : ss)
        if (std::abs(s - ss.front()) > tol) return false;
    return true;
}

double PiecewiseLinear::lipschitz_bound() const {
    double m = 0.0;
    for (double s : slopes()) m = std::max(m, std::abs(s));
    return m;
}

double PiecewiseLinear::asymptotic(double x) const {
    if (x > 0) return slope_right_ * x;
    if (x < 0) return slope_left_ * x;
    return 0.0;
}

double asymptotic_by_doubling(const PiecewiseLinear& f, double x, int doublings) {
    if (x == 0.0) return 0.0;
    double t = 1.0, prev = f(x), est = prev;
    for (int k = 0; k < doublings; ++k) {
        t *= 2.0;
        est = f(t * x) / t;
        if (std::abs(est - prev) <= 1e-13 * (1.0 + std::abs(est))) break;
        prev = est;
    }
    return est;
}

}  // namespace frictional
