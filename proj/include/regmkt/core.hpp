#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "regmkt/linalg.hpp"

namespace regmkt {

// Error taxonomy. DomainError: input outside an operation's stated domain.
// ConfigError: invalid parameters at construction/config time.
// ModelError: a model-level contract broke (singular volatility, ...).
// SimulationFault / ViabilityFault: the path engine hit its guard or event cap.
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SimulationFault : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ViabilityFault : std::runtime_error {
    using std::runtime_error::runtime_error;
};

constexpr double kWeightSumTol = 1e-12;

/// Strictly positive per-company market capitalizations (currency units).
class CapitalizationVector {
public:
    explicit CapitalizationVector(Vec values) : v_(std::move(values)) {
        if (v_.size() < 2) throw DomainError("CapitalizationVector: need at least 2 companies");
        for (double x : v_)
            if (!(x > 0.0) || !std::isfinite(x))
                throw DomainError("CapitalizationVector: entries must be finite and > 0");
    }
    CapitalizationVector(std::initializer_list<double> values)
        : CapitalizationVector(Vec(values)) {}

    std::size_t size() const { return v_.size(); }
    double operator[](std::size_t i) const { return v_[i]; }
    const Vec& values() const { return v_; }
    std::span<const double> span() const { return v_; }

    double total() const { return std::accumulate(v_.begin(), v_.end(), 0.0); }

    CapitalizationVector scaled(double lambda) const {
        if (!(lambda > 0.0)) throw DomainError("scaled: lambda must be > 0");
        Vec out(v_);
        for (double& x : out) x *= lambda;
        return CapitalizationVector(std::move(out));
    }

private:
    Vec v_;
};

/// Point of the open unit simplex. Entries in (0,1), sum 1 within 1e-12.
/// Every construction renormalizes (divides by the sum) so repeated
/// regulation/diffusion arithmetic cannot drift the invariant.
class WeightVector {
public:
    explicit WeightVector(Vec weights) : w_(std::move(weights)) {
        if (w_.size() < 2) throw DomainError("WeightVector: need at least 2 entries");
        double sum = 0.0;
        for (double x : w_) {
            if (!(x > 0.0) || !std::isfinite(x))
                throw DomainError("WeightVector: entries must be finite and > 0");
            sum += x;
        }
        if (std::abs(sum - 1.0) > kWeightSumTol)
            throw DomainError("WeightVector: entries must sum to 1 within 1e-12");
        for (double& x : w_) x /= sum;
    }
    WeightVector(std::initializer_list<double> weights) : WeightVector(Vec(weights)) {}

    /// Normalize an arbitrary positive vector onto the simplex.
    static WeightVector normalized(Vec raw) {
        double sum = 0.0;
        for (double x : raw) {
            if (!(x > 0.0) || !std::isfinite(x))
                throw DomainError("WeightVector: entries must be finite and > 0");
            sum += x;
        }
        for (double& x : raw) x /= sum;
        return WeightVector(std::move(raw), Renormalized{});
    }

    std::size_t size() const { return w_.size(); }
    double operator[](std::size_t i) const { return w_[i]; }
    const Vec& values() const { return w_; }
    std::span<const double> span() const { return w_; }

    double largest() const { return *std::max_element(w_.begin(), w_.end()); }

private:
    struct Renormalized {};
    WeightVector(Vec w, Renormalized) : w_(std::move(w)) {}
    Vec w_;
};

/// mu(x): relative capitalization of each company.
inline WeightVector market_weights(const CapitalizationVector& x) {
    Vec w(x.values());
    return WeightVector::normalized(std::move(w));
}

/// Reverse-order-statistics permutation: x[perm[k]] is the (k+1)-largest
/// entry; ties broken by ascending index (exact floating comparison).
class RankPermutation {
public:
    explicit RankPermutation(std::span<const double> x) {
        if (x.empty()) throw DomainError("rank_permutation: empty input");
        for (double v : x)
            if (!std::isfinite(v)) throw DomainError("rank_permutation: non-finite entry");
        perm_.resize(x.size());
        std::iota(perm_.begin(), perm_.end(), std::size_t{0});
        std::stable_sort(perm_.begin(), perm_.end(),
                         [&](std::size_t i, std::size_t j) { return x[i] > x[j]; });
    }

    std::size_t size() const { return perm_.size(); }
    /// Index of the company at rank k (0-based; rank 0 = largest).
    std::size_t operator[](std::size_t k) const { return perm_[k]; }
    const std::vector<std::size_t>& indices() const { return perm_; }

private:
    std::vector<std::size_t> perm_;
};

inline RankPermutation rank_permutation(std::span<const double> x) {
    return RankPermutation(x);
}

/// Shannon entropy -sum mu_i ln mu_i (natural logarithm).
inline double entropy(const WeightVector& mu) {
    double s = 0.0;
    for (double w : mu.values()) s -= w * std::log(w);
    return s;
}

/// Instantaneous covariance matrix a = sigma sigma'. Symmetric positive definite.
class CovarianceMatrix {
public:
    explicit CovarianceMatrix(Matrix a) : a_(std::move(a)) {
        if (a_.rows() != a_.cols() || a_.rows() == 0)
            throw ModelError("CovarianceMatrix: must be square and non-empty");
        if (!a_.is_symmetric(0.0))
            throw ModelError("CovarianceMatrix: must be symmetric");
    }

    static CovarianceMatrix from_volatility(const Matrix& sigma) {
        return CovarianceMatrix(sigma.times_transpose());
    }

    std::size_t size() const { return a_.rows(); }
    const Matrix& matrix() const { return a_; }
    double operator()(std::size_t i, std::size_t j) const { return a_(i, j); }

private:
    Matrix a_;
};

/// Smallest eigenvalue of the covariance (uniform ellipticity constant).
/// Cyclic Jacobi; throws ModelError unless the result is strictly positive.
inline double ellipticity_constant(const CovarianceMatrix& a) {
    Vec eig = symmetric_eigenvalues(a.matrix());
    double lo = *std::min_element(eig.begin(), eig.end());
    if (!(lo > 0.0)) throw ModelError("ellipticity_constant: covariance not positive definite");
    return lo;
}

}  // namespace regmkt
