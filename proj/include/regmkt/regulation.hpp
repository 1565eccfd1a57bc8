#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "regmkt/core.hpp"

namespace regmkt {

/// Regulatory set U = { mu | mu_(1) < 1 - delta' } for a split-merge rule.
class RegulatorySet {
public:
    RegulatorySet(std::size_t n, double delta_prime) : n_(n), delta_prime_(delta_prime) {
        if (n < 3) throw ConfigError("RegulatorySet: split-merge regulation needs n >= 3");
        const double upper = static_cast<double>(n - 1) / static_cast<double>(n + 1);
        if (!(delta_prime > 0.0 && delta_prime < upper))
            throw ConfigError("RegulatorySet: delta' must lie in (0, (n-1)/(n+1)) = (0, " +
                              std::to_string(upper) + ")");
    }

    std::size_t company_count() const { return n_; }
    double delta_prime() const { return delta_prime_; }
    double cap() const { return 1.0 - delta_prime_; }

    bool contains(const WeightVector& mu) const { return mu.largest() < cap(); }

private:
    std::size_t n_;
    double delta_prime_;
};

/// Per-prerule-application entropy jump bound on the exact boundary:
/// (1 - delta'(n+1)/(n-1)) ln 2, strictly positive on the valid parameter range.
inline double entropy_jump_lower_bound(std::size_t n, double delta_prime) {
    RegulatorySet check(n, delta_prime);  // parameter validation
    const double ratio = static_cast<double>(n + 1) / static_cast<double>(n - 1);
    return (1.0 - delta_prime * ratio) * std::numbers::ln2;
}

/// On the boundary the smallest two weights can sum to at most 2 delta'/(n-1).
inline double smallest_two_sum_bound(std::size_t n, double delta_prime) {
    RegulatorySet check(n, delta_prime);
    return 2.0 * delta_prime / static_cast<double>(n - 1);
}

/// Split-merge prerule: identity on U; on (or beyond) the boundary, split the
/// largest company in half and merge the smallest two. The halves take the
/// indices of the previous largest and second-smallest companies; the merged
/// company takes the index of the previous smallest.
inline WeightVector prerule_apply(const WeightVector& mu, const RegulatorySet& set) {
    const std::size_t n = mu.size();
    if (n != set.company_count())
        throw ConfigError("prerule_apply: weight dimension does not match regulatory set");
    if (mu.largest() < set.cap()) return mu;

    const RankPermutation p(mu.span());
    Vec out(mu.values());
    const double top = mu[p[0]];
    out[p[0]] = top / 2.0;
    out[p[n - 2]] = top / 2.0;
    out[p[n - 1]] = mu[p[n - 1]] + mu[p[n - 2]];
    return WeightVector::normalized(std::move(out));
}

/// Full split-merge rule: iterate the prerule until the state is interior.
/// Exact-boundary states need at most n applications; overshot states from
/// discrete-time exit detection get an extended cap of n + 8.
inline WeightVector rule_apply(WeightVector mu, const RegulatorySet& set) {
    const std::size_t max_apps = set.company_count() + 8;
    for (std::size_t k = 0; k < max_apps; ++k) {
        if (set.contains(mu)) return mu;
        mu = prerule_apply(mu, set);
    }
    if (set.contains(mu)) return mu;
    throw ModelError("rule_apply: state not interior after " + std::to_string(max_apps) +
                     " prerule applications (mu_(1) = " + std::to_string(mu.largest()) + ")");
}

/// Capital-conserving capitalization map: (sum x) * rule(mu(x)).
inline CapitalizationVector regulate_caps(const CapitalizationVector& x,
                                          const RegulatorySet& set) {
    const double total = x.total();
    const WeightVector post = rule_apply(market_weights(x), set);
    Vec out(post.values());
    for (double& w : out) w *= total;
    return CapitalizationVector(std::move(out));
}

/// One regulation event: pre/post states, entropy jump, audit flags.
struct RegulationEvent {
    std::size_t ordinal = 0;  // k, 1-based event counter within a path
    double time = 0.0;        // tau_k, grid-resolved
    Vec pre_caps;
    Vec post_caps;
    Vec pre_weights;
    Vec post_weights;
    double entropy_jump = 0.0;
    // True when the exit state lay strictly beyond the boundary (mu_(1) > 1 - delta'),
    // i.e. the prerule formulas were extended past the exact-boundary case.
    bool overshoot = false;
};

}  // namespace regmkt
