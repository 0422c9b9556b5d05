#include "frictional/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace frictional {

ScenarioSpace::ScenarioSpace(std::vector<std::string> labels_, std::vector<double> probs_)
    : labels(std::move(labels_)), probs(std::move(probs_)) {
    if (probs.empty())
        throw std::invalid_argument("scenario space: at least one outcome required");
    if (labels.size() != probs.size())
        throw std::invalid_argument("scenario space: label/probability size mismatch");
    double sum = 0.0;
    for (double p : probs) {
        if (!(p > 0.0))
            throw std::invalid_argument("scenario space: probabilities must be strictly positive");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("scenario space: probabilities must sum to 1");
}

ScenarioSpace ScenarioSpace::uniform(std::size_t d) {
    std::vector<std::string> labels(d);
    std::vector<double> probs(d, 1.0 / static_cast<double>(d));
    for (std::size_t i = 0; i < d; ++i) labels[i] = "w" + std::to_string(i + 1);
    return ScenarioSpace(std::move(labels), std::move(probs));
}

bool order_geq(const ScenarioSpace& space, const Position& x, const Position& y) {
    space.check_dim(x, "order_geq");
    space.check_dim(y, "order_geq");
    for (std::size_t j = 0; j < x.size(); ++j)
        if (x[j] < y[j]) return false;
    return true;
}

double expectation(const ScenarioSpace& space, const Position& x) {
    space.check_dim(x, "expectation");
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) s += space.probs[j] * x[j];
    return s;
}

namespace {

// Outcomes sorted by (value, index), with cumulative probabilities.
// q+_gamma(X) = value_k for gamma in [cum_{k-1}, cum_k).
struct SortedAtoms {
    std::vector<double> values;
    std::vector<double> cum;  // cum[k] = P(X <= value_k) along the sort order
};

SortedAtoms sort_atoms(const ScenarioSpace& space, const Position& x) {
    std::vector<std::size_t> idx(x.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    SortedAtoms out;
    double c = 0.0;
    for (std::size_t k : idx) {
        c += space.probs[k];
        out.values.push_back(x[k]);
        out.cum.push_back(c);
    }
    out.cum.back() = 1.0;  // guard against rounding in the final partial sum
    return out;
}

}  // namespace

double upper_quantile(const ScenarioSpace& space, const Position& x, double alpha) {
    space.check_dim(x, "upper_quantile");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("upper_quantile: alpha must lie in (0,1)");
    SortedAtoms s = sort_atoms(space, x);
    for (std::size_t k = 0; k < s.values.size(); ++k)
        if (s.cum[k] > alpha) return s.values[k];
    return s.values.back();
}

double quantile_integral(const ScenarioSpace& space, const Position& x,
                         double a, double b) {
    space.check_dim(x, "quantile_integral");
    if (!(0.0 <= a && a <= b && b <= 1.0))
        throw std::invalid_argument("quantile_integral: need 0 <= a <= b <= 1");
    SortedAtoms s = sort_atoms(space, x);
    double total = 0.0, lo = 0.0;
    for (std::size_t k = 0; k < s.values.size(); ++k) {
        double hi = s.cum[k];
        double left = std::max(a, lo), right = std::min(b, hi);
        if (right > left) total += s.values[k] * (right - left);
        lo = hi;
    }
    return total;
}

double expected_shortfall(const ScenarioSpace& space, const Position& x, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("expected_shortfall: alpha must lie in (0,1)");
    return -quantile_integral(space, x, 0.0, alpha) / alpha;
}

double range_value_at_risk(const ScenarioSpace& space, const Position& x,
                           double alpha, double beta) {
    if (!(0.0 < alpha && alpha < beta && beta < 1.0))
        throw std::invalid_argument("range_value_at_risk: need 0 < alpha < beta < 1");
    return -quantile_integral(space, x, alpha, beta) / (beta - alpha);
}

double expectile_margin(const ScenarioSpace& space, const Position& x, double alpha) {
    space.check_dim(x, "expectile_margin");
    double pos = 0.0, neg = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        pos += space.probs[j] * std::max(x[j], 0.0);
        neg += space.probs[j] * std::max(-x[j], 0.0);
    }
    return alpha * pos - (1.0 - alpha) * neg;
}

std::vector<double> probability_breakpoints(const ScenarioSpace& space) {
    if (space.size() > 20)
        throw std::invalid_argument("probability_breakpoints: too many outcomes");
    std::set<double> sums = {0.0};
    for (double p : space.probs) {
        std::set<double> next = sums;
        for (double s : sums) next.insert(s + p);
        sums = std::move(next);
    }
    std::vector<double> out;
    for (double s : sums)
        if (s > 1e-15 && s < 1.0 - 1e-15) out.push_back(s);
    return out;
}

}  // namespace frictional
