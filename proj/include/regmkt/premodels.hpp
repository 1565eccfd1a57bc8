#pragma once

#include <cmath>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "regmkt/core.hpp"
#include "regmkt/linalg.hpp"

namespace regmkt {

/// Common contract for premodel SDE coefficients. Evaluators are immutable
/// after construction; concurrent evaluation from many threads is safe.
/// Both shipped models have constant square volatility (d = n); the contract
/// allows d > n for future models.
class CoefficientEvaluator {
public:
    virtual ~CoefficientEvaluator() = default;

    virtual std::size_t dimension() const = 0;        // n
    virtual std::size_t noise_dimension() const = 0;  // d

    /// Volatility at state x (constant for the shipped models).
    virtual const Matrix& sigma(const CapitalizationVector& x) const = 0;
    /// Covariance a = sigma sigma', precomputed once per model.
    virtual const CovarianceMatrix& covariance() const = 0;

    virtual void drift_into(const CapitalizationVector& x, std::span<double> out) const = 0;
    Vec drift(const CapitalizationVector& x) const {
        Vec out(dimension());
        drift_into(x, out);
        return out;
    }

    /// Membership test for the declared state domain O^x.
    virtual bool in_domain(const CapitalizationVector& x) const = 0;

    virtual std::string name() const = 0;
};

struct GbmParams {
    Vec b;         // constant drift, 1/time
    Matrix sigma;  // constant n x n volatility, rank n
};

/// Geometric Brownian motion: constant coefficients on O^x = R_{++}^n.
class GbmModel final : public CoefficientEvaluator {
public:
    explicit GbmModel(GbmParams params)
        : b_(std::move(params.b)),
          sigma_(std::move(params.sigma)),
          cov_(CovarianceMatrix::from_volatility(sigma_)) {
        const std::size_t n = b_.size();
        if (n < 2) throw ConfigError("GbmModel: need n >= 2");
        if (sigma_.rows() != n || sigma_.cols() != n)
            throw ConfigError("GbmModel: sigma must be n x n");
        ellipticity_constant(cov_);  // rank check; throws ModelError if deficient
    }

    std::size_t dimension() const override { return b_.size(); }
    std::size_t noise_dimension() const override { return sigma_.cols(); }
    const Matrix& sigma(const CapitalizationVector&) const override { return sigma_; }
    const CovarianceMatrix& covariance() const override { return cov_; }

    void drift_into(const CapitalizationVector& x, std::span<double> out) const override {
        if (x.size() != b_.size()) throw DomainError("GbmModel: state dimension mismatch");
        std::copy(b_.begin(), b_.end(), out.begin());
    }

    bool in_domain(const CapitalizationVector&) const override { return true; }
    std::string name() const override { return "gbm"; }

private:
    Vec b_;
    Matrix sigma_;
    CovarianceMatrix cov_;
};

/// Index of the unique Q_i containing x: the smallest index attaining the
/// maximum capitalization (ties go to the smaller index).
inline std::size_t largest_index(const CapitalizationVector& x) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < x.size(); ++i)
        if (x[i] > x[best]) best = i;
    return best;
}

struct LogPoleParams {
    double delta = 0.0;  // pole location parameter, in (0, 1/2)
    Vec g;               // per-company growth push when not largest, >= 0
    double c = 0.0;      // pole strength, > 0
    Matrix sigma;        // constant n x n volatility, rank n
};

/// Log-pole market: each company behaves like a GBM while not the largest;
/// the largest company's drift diverges to -infinity as its weight
/// approaches 1 - delta, which keeps the premodel diverse.
class LogPoleModel final : public CoefficientEvaluator {
public:
    // Evaluation refuses states with mu_(1) >= 1 - delta - 1e-12 instead of
    // returning a huge finite drift; the simulator's near-pole guard is
    // responsible for never stepping there.
    static constexpr double kEvalMargin = 1e-12;

    explicit LogPoleModel(LogPoleParams params)
        : delta_(params.delta),
          g_(std::move(params.g)),
          c_(params.c),
          sigma_(std::move(params.sigma)),
          cov_(CovarianceMatrix::from_volatility(sigma_)) {
        const std::size_t n = g_.size();
        if (n < 3) throw ConfigError("LogPoleModel: need n >= 3");
        if (!(delta_ > 0.0 && delta_ < 0.5))
            throw ConfigError("LogPoleModel: delta must lie in (0, 1/2)");
        if (!(c_ > 0.0)) throw ConfigError("LogPoleModel: c must be > 0");
        for (double gi : g_)
            if (!(gi >= 0.0)) throw ConfigError("LogPoleModel: g entries must be >= 0");
        if (sigma_.rows() != n || sigma_.cols() != n)
            throw ConfigError("LogPoleModel: sigma must be n x n");
        ellipticity_constant(cov_);
    }

    std::size_t dimension() const override { return g_.size(); }
    std::size_t noise_dimension() const override { return sigma_.cols(); }
    const Matrix& sigma(const CapitalizationVector&) const override { return sigma_; }
    const CovarianceMatrix& covariance() const override { return cov_; }
    double delta() const { return delta_; }

    void drift_into(const CapitalizationVector& x, std::span<double> out) const override {
        const std::size_t n = g_.size();
        if (x.size() != n) throw DomainError("LogPoleModel: state dimension mismatch");
        const std::size_t top = largest_index(x);
        const double mu_top = x[top] / x.total();
        if (mu_top >= 1.0 - delta_ - kEvalMargin)
            throw DomainError("LogPoleModel: state at or beyond the drift singularity, mu_(1) = " +
                              std::to_string(mu_top));
        for (std::size_t i = 0; i < n; ++i) out[i] = 0.5 * cov_(i, i) + g_[i];
        out[top] = 0.5 * cov_(top, top) - (c_ / delta_) / std::log((1.0 - delta_) / mu_top);
    }

    bool in_domain(const CapitalizationVector& x) const override {
        const double mu_top = x[largest_index(x)] / x.total();
        return mu_top < 1.0 - delta_;
    }

    std::string name() const override { return "logpole"; }

private:
    double delta_;
    Vec g_;
    double c_;
    Matrix sigma_;
    CovarianceMatrix cov_;
};

}  // namespace regmkt
