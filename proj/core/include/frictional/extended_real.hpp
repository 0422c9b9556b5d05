#pragma once

#include <cmath>
#include <limits>
#include <ostream>
#include <string>

namespace frictional {

/// Extended real with explicit +/-infinity states.
///
/// Infeasibility (+inf) and certified unboundedness (-inf) are first-class
/// outcomes of the solvers, so they are carried as tagged states rather than
/// sentinel doubles. Arithmetic follows the convention inf - inf = -inf and
/// 0 * inf = 0 used throughout the solvers.
class XReal {
public:
    XReal() : value_(0.0) {}
    XReal(double v) : value_(v) {}

    static XReal pos_inf() { return XReal(std::numeric_limits<double>::infinity()); }
    static XReal neg_inf() { return XReal(-std::numeric_limits<double>::infinity()); }

    bool finite() const { return std::isfinite(value_); }
    bool is_pos_inf() const { return std::isinf(value_) && value_ > 0; }
    bool is_neg_inf() const { return std::isinf(value_) && value_ < 0; }

    /// Finite value; must not be called on an infinite state.
    double value() const { return value_; }
    /// Raw double including +/-inf, for comparisons.
    double raw() const { return value_; }

    XReal operator-() const { return XReal(-value_); }

    friend XReal operator+(XReal a, XReal b) {
        if (a.is_neg_inf() || b.is_neg_inf()) return neg_inf();  // inf - inf = -inf
        if (a.is_pos_inf() || b.is_pos_inf()) return pos_inf();
        return XReal(a.value_ + b.value_);
    }
    friend XReal operator-(XReal a, XReal b) { return a + (-b); }

    friend bool operator<(XReal a, XReal b) { return a.value_ < b.value_; }
    friend bool operator>(XReal a, XReal b) { return a.value_ > b.value_; }
    friend bool operator<=(XReal a, XReal b) { return a.value_ <= b.value_; }
    friend bool operator>=(XReal a, XReal b) { return a.value_ >= b.value_; }
    friend bool operator==(XReal a, XReal b) { return a.value_ == b.value_; }

    std::string str() const {
        if (is_pos_inf()) return "inf";
        if (is_neg_inf()) return "-inf";
        return std::to_string(value_);
    }

    friend std::ostream& operator<<(std::ostream& os, XReal v) { return os << v.str(); }

private:
    double value_;
};

}  // namespace frictional
