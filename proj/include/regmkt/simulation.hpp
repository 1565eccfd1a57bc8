#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "regmkt/core.hpp"
#include "regmkt/premodels.hpp"
#include "regmkt/regulation.hpp"
#include "regmkt/rng.hpp"

namespace regmkt {

enum class Scheme { log_euler };

struct SimConfig {
    double horizon = 1.0;           // T
    double dt = 1.0 / 252.0;        // grid step
    std::uint64_t seed = 0;         // master seed
    Scheme scheme = Scheme::log_euler;
    std::size_t event_cap = 1'000'000;  // viability fault beyond this many regulations
    // near-pole guard (log-pole premodels only)
    double guard_margin = 1e-6;
    int guard_substeps = 4;
    int guard_max_depth = 8;

    void validate() const {
        if (!(horizon > 0.0)) throw ConfigError("SimConfig: horizon must be > 0");
        if (!(dt > 0.0 && dt <= horizon)) throw ConfigError("SimConfig: need 0 < dt <= horizon");
    }

    /// Number of grid steps: ceil(T/dt), with a final partial step if needed.
    std::size_t step_count() const {
        const double raw = horizon / dt;
        auto k = static_cast<std::size_t>(std::ceil(raw - 1e-9));
        return k == 0 ? 1 : k;
    }
};

/// One accepted integration interval: either a full grid step or a guard
/// sub-step. `dw` is the actual Brownian increment (variance h per component)
/// and `x0` the state the coefficients were evaluated at.
struct FineStep {
    std::size_t grid_index;  // grid step this interval belongs to
    double h;
    Vec x0;
    Vec dw;
};

/// Regulated path on a time grid. Y stores the post-regulation value at event
/// grid points; the pre-regulation (freshly diffused) state lives in `pre`
/// and in the event record. Between events the increments of Yhat equal the
/// increments of Y; at an event step the Yhat increment excludes the jump.
struct RegulatedPath {
    Vec times;                          // t_0 = 0 .. t_K = T
    std::vector<Vec> Y;                 // K+1 states, post-regulation at events
    std::vector<Vec> pre;               // K+1 diffused states; pre[0] = Y[0]
    std::vector<Vec> Yhat;              // K+1 net states, Yhat[0] = Y[0]
    std::vector<RegulationEvent> events;
    std::vector<FineStep> fine;         // integration intervals, in time order
    std::size_t event_count() const { return events.size(); }

    std::size_t steps() const { return times.empty() ? 0 : times.size() - 1; }
    std::size_t dimension() const { return Y.empty() ? 0 : Y[0].size(); }

    /// Net (jump-free) increment over grid step k, componentwise.
    Vec net_increment(std::size_t k) const {
        Vec d(pre[k + 1]);
        for (std::size_t i = 0; i < d.size(); ++i) d[i] -= Y[k][i];
        return d;
    }

    bool has_event_at(std::size_t grid_point) const {
        for (const auto& e : events)
            if (e.time == times[grid_point]) return true;
        return false;
    }
};

/// x'_i = x_i exp((b_i - a_ii/2) h + (sigma dw)_i). Exact in law for
/// constant-coefficient GBM; strictly positive by construction.
inline CapitalizationVector step_log_euler(const CapitalizationVector& x, const Vec& drift,
                                           const Matrix& sigma, const CovarianceMatrix& cov,
                                           double h, std::span<const double> dw) {
    const std::size_t n = x.size();
    Vec out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double diffusion = dot(sigma.row(i), dw);
        const double expo = (drift[i] - 0.5 * cov(i, i)) * h + diffusion;
        if (!std::isfinite(expo))
            throw DomainError("step_log_euler: non-finite step exponent");
        out[i] = x[i] * std::exp(expo);
    }
    return CapitalizationVector(std::move(out));
}

namespace detail {

/// Draws normals for (step, block) and advances the per-step block cursor.
class StepDraws {
public:
    StepDraws(const BrownianStream& stream, std::uint64_t step, std::size_t d)
        : stream_(stream), step_(step), z_(d) {}

    /// Brownian increment over an interval of length h.
    const Vec& increment(double h) {
        stream_.normals(step_, block_++, z_);
        const double s = std::sqrt(h);
        for (double& v : z_) v *= s;
        return z_;
    }

private:
    const BrownianStream& stream_;
    std::uint64_t step_;
    std::uint32_t block_ = 0;
    Vec z_;
};

struct Engine {
    const CoefficientEvaluator& eval;
    const SimConfig& cfg;
    const BrownianStream& stream;
    const LogPoleModel* logpole;  // non-null iff the near-pole guard applies
    std::vector<FineStep>* fine;  // optional recording sink

    /// Advance from x over an interval of length h at guard depth `depth`,
    /// appending accepted intervals to `fine`. Returns the end state.
    CapitalizationVector advance(const CapitalizationVector& x, std::size_t grid_index,
                                 double h, int depth, StepDraws& draws) const {
        Vec b(eval.dimension());
        eval.drift_into(x, b);
        const Vec& dw = draws.increment(h);
        CapitalizationVector next =
            step_log_euler(x, b, eval.sigma(x), eval.covariance(), h, dw);

        if (logpole != nullptr) {
            const double mu_top = next[largest_index(next)] / next.total();
            if (mu_top >= 1.0 - logpole->delta() - cfg.guard_margin) {
                if (depth >= cfg.guard_max_depth)
                    throw SimulationFault(
                        "near-pole guard: recursion depth exhausted at grid step " +
                        std::to_string(grid_index) + ", mu_(1) = " + std::to_string(mu_top));
                // re-take the whole interval as sub-steps with fresh increments
                CapitalizationVector cur = x;
                const double sub = h / cfg.guard_substeps;
                for (int j = 0; j < cfg.guard_substeps; ++j)
                    cur = advance(cur, grid_index, sub, depth + 1, draws);
                return cur;
            }
        }
        if (fine != nullptr) fine->push_back({grid_index, h, x.values(), dw});
        return next;
    }
};

}  // namespace detail

/// Simulate the premodel (no regulation attached) on the grid.
inline RegulatedPath simulate_premodel(const CoefficientEvaluator& eval,
                                       const CapitalizationVector& x0, const SimConfig& cfg,
                                       const BrownianStream& stream,
                                       bool record_fine = true) {
    cfg.validate();
    if (!eval.in_domain(x0))
        throw DomainError("simulate_premodel: initial state outside the model domain");

    const std::size_t K = cfg.step_count();
    const std::size_t d = eval.noise_dimension();
    RegulatedPath path;
    path.times.resize(K + 1);
    path.Y.reserve(K + 1);
    path.pre.reserve(K + 1);
    path.Yhat.reserve(K + 1);
    detail::Engine engine{eval, cfg, stream, dynamic_cast<const LogPoleModel*>(&eval),
                          record_fine ? &path.fine : nullptr};

    CapitalizationVector x = x0;
    path.times[0] = 0.0;
    path.Y.push_back(x.values());
    path.pre.push_back(x.values());
    path.Yhat.push_back(x.values());
    for (std::size_t k = 0; k < K; ++k) {
        const double t_next = (k + 1 == K) ? cfg.horizon : (k + 1) * cfg.dt;
        const double h = t_next - path.times[k];
        detail::StepDraws draws(stream, k, d);
        x = engine.advance(x, k, h, 0, draws);
        path.times[k + 1] = t_next;
        path.Y.push_back(x.values());
        path.pre.push_back(x.values());
        path.Yhat.push_back(x.values());
    }
    return path;
}

/// Simulate the regulated process: diffuse with the premodel coefficients at
/// the current regulated state; when a grid state exits U (largest weight
/// >= 1 - delta'), apply the capital-conserving split-merge map at that grid
/// time, store the post-regulation value and log the event. The net process
/// Yhat accumulates only the diffusion increments.
inline RegulatedPath simulate_regulated(const CoefficientEvaluator& eval,
                                        const RegulatorySet& set,
                                        const CapitalizationVector& y0, const SimConfig& cfg,
                                        const BrownianStream& stream,
                                        bool record_fine = true) {
    cfg.validate();
    if (eval.dimension() != set.company_count())
        throw ConfigError("simulate_regulated: model and regulatory set dimension mismatch");
    if (!eval.in_domain(y0))
        throw DomainError("simulate_regulated: initial state outside the model domain");
    if (!set.contains(market_weights(y0)))
        throw DomainError("simulate_regulated: initial weights must lie inside U");

    const std::size_t K = cfg.step_count();
    const std::size_t d = eval.noise_dimension();
    RegulatedPath path;
    path.times.resize(K + 1);
    path.Y.reserve(K + 1);
    path.pre.reserve(K + 1);
    path.Yhat.reserve(K + 1);
    detail::Engine engine{eval, cfg, stream, dynamic_cast<const LogPoleModel*>(&eval),
                          record_fine ? &path.fine : nullptr};

    CapitalizationVector y = y0;
    path.times[0] = 0.0;
    path.Y.push_back(y.values());
    path.pre.push_back(y.values());
    path.Yhat.push_back(y.values());

    for (std::size_t k = 0; k < K; ++k) {
        const double t_next = (k + 1 == K) ? cfg.horizon : (k + 1) * cfg.dt;
        const double h = t_next - path.times[k];
        detail::StepDraws draws(stream, k, d);
        CapitalizationVector diffused = engine.advance(y, k, h, 0, draws);
        path.times[k + 1] = t_next;
        path.pre.push_back(diffused.values());

        // net increment: diffusion only, jump excluded by construction
        Vec yhat(path.Yhat.back());
        for (std::size_t i = 0; i < yhat.size(); ++i) yhat[i] += diffused[i] - y[i];
        path.Yhat.push_back(std::move(yhat));

        const WeightVector mu = market_weights(diffused);
        if (!set.contains(mu)) {
            if (path.events.size() >= cfg.event_cap)
                throw ViabilityFault("simulate_regulated: event cap " +
                                     std::to_string(cfg.event_cap) +
                                     " exceeded (stream key " + std::to_string(stream.key()) +
                                     ", grid step " + std::to_string(k) + ")");
            CapitalizationVector post = regulate_caps(diffused, set);
            const WeightVector post_mu = market_weights(post);
            RegulationEvent ev;
            ev.ordinal = path.events.size() + 1;
            ev.time = t_next;
            ev.pre_caps = diffused.values();
            ev.post_caps = post.values();
            ev.pre_weights = mu.values();
            ev.post_weights = post_mu.values();
            ev.entropy_jump = entropy(post_mu) - entropy(mu);
            ev.overshoot = mu.largest() > set.cap();
            path.events.push_back(std::move(ev));
            y = std::move(post);
        } else {
            y = std::move(diffused);
        }
        path.Y.push_back(y.values());
    }
    return path;
}

/// The net capitalization component of a path (Yhat levels).
inline std::vector<Vec> net_capitalization(const RegulatedPath& path) { return path.Yhat; }

}  // namespace regmkt
