#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace frictional {

/// A terminal position: one currency value per outcome.
using Position = std::vector<double>;

/// Finite probability space. Probabilities are strictly positive and sum to
/// one within 1e-12; positions over the space are real vectors indexed by
/// outcome.
struct ScenarioSpace {
    std::vector<std::string> labels;
    std::vector<double> probs;

    ScenarioSpace() = default;
    ScenarioSpace(std::vector<std::string> labels_, std::vector<double> probs_);

    /// Uniform space with d outcomes labelled w1..wd.
    static ScenarioSpace uniform(std::size_t d);

    std::size_t size() const { return probs.size(); }

    void check_dim(const Position& x, const char* what) const {
        if (x.size() != probs.size())
            throw std::invalid_argument(std::string(what) + ": dimension mismatch");
    }
};

/// Componentwise partial order: X >= Y on all outcomes.
bool order_geq(const ScenarioSpace& space, const Position& x, const Position& y);

double expectation(const ScenarioSpace& space, const Position& x);

/// Upper alpha-quantile q+_alpha(X) = inf{m : P(X <= m) > alpha}, alpha in (0,1).
/// Outcomes are stably sorted by value then outcome index.
double upper_quantile(const ScenarioSpace& space, const Position& x, double alpha);

/// Exact integral of the (piecewise-constant) upper quantile function of X
/// over [a, b] subset of [0, 1].
double quantile_integral(const ScenarioSpace& space, const Position& x,
                         double a, double b);

/// ES_alpha(X) = -(1/alpha) * integral_0^alpha q+_beta(X) dbeta.
double expected_shortfall(const ScenarioSpace& space, const Position& x, double alpha);

/// RVaR_{alpha,beta}(X) = -(1/(beta-alpha)) * integral_alpha^beta q+_gamma(X) dgamma.
double range_value_at_risk(const ScenarioSpace& space, const Position& x,
                           double alpha, double beta);

/// alpha*E[X+] - (1-alpha)*E[X-]; nonnegative exactly when the expectile
/// acceptance ratio E[X+]/E[X-] >= (1-alpha)/alpha (with 0/0 = +inf).
double expectile_margin(const ScenarioSpace& space, const Position& x, double alpha);

/// Cumulative-probability breakpoints of the quantile function: all distinct
/// partial sums of outcome probabilities in (0,1). Used where a supremum over
/// quantile levels must be evaluated exactly.
std::vector<double> probability_breakpoints(const ScenarioSpace& space);

}  // namespace frictional
