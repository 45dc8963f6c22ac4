#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gpcover/kernels.hpp"

namespace gpcover {

/// Raised when a factorization fails; the CLI maps it to exit code 3.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Dataset {
    std::vector<double> x;
    std::vector<double> y;

    [[nodiscard]] std::size_t size() const noexcept { return x.size(); }
    /// Throws std::invalid_argument on unequal lengths, an empty set or x outside [0,1].
    void validate() const;
};

/// GP posterior under the prior GP(0, sigma^2 (n lambda)^{-1} K) and N(0, sigma^2) noise.
///
/// Mean and covariance are evaluated through the Cholesky factor of
/// K(X,X) + n lambda I; no explicit inverse is formed. Immutable once fitted.
class PosteriorGP {
public:
    [[nodiscard]] double mean_at(double x) const;
    [[nodiscard]] double cov_at(double x, double xp) const;

    /// K(query, X) [K(X,X) + n lambda I]^{-1} K(X, anchor): the noiseless KRR fit of K(anchor, .).
    [[nodiscard]] Eigen::VectorXd noiseless_krr(double anchor, std::span<const double> query) const;

    [[nodiscard]] Eigen::VectorXd mean_on(std::span<const double> grid) const;
    /// Posterior covariance matrix on the grid.
    [[nodiscard]] Eigen::MatrixXd cov_on(std::span<const double> grid) const;

    [[nodiscard]] const Dataset& data() const noexcept { return data_; }
    [[nodiscard]] const Kernel& kernel() const noexcept { return kernel_; }
    [[nodiscard]] double lambda() const noexcept { return lambda_; }
    [[nodiscard]] double sigma2() const noexcept { return sigma2_; }
    [[nodiscard]] const Eigen::VectorXd& weights() const noexcept { return weights_; }
    /// sigma^2 / (n lambda), the prior scale in front of K.
    [[nodiscard]] double prior_scale() const noexcept;

    friend PosteriorGP fit(Dataset data, const KernelSpec& kernel, double lambda, double sigma2);

private:
    PosteriorGP(Dataset data, Kernel kernel, double lambda, double sigma2);

    [[nodiscard]] Eigen::VectorXd kernel_column(double x) const;

    Dataset data_;
    Kernel kernel_;
    double lambda_;
    double sigma2_;
    Eigen::LLT<Eigen::MatrixXd> system_;
    Eigen::VectorXd weights_;
};

/// Factorizes K(X,X) + n lambda I and solves for the mean weights.
/// Throws std::invalid_argument for an invalid dataset or lambda, sigma2 <= 0 and
/// NumericalError when the factorization fails.
PosteriorGP fit(Dataset data, const KernelSpec& kernel, double lambda, double sigma2);

struct GridPosterior {
    std::vector<double> grid;
    Eigen::VectorXd mean;
    /// Posterior covariance with `jitter` already added to the diagonal.
    Eigen::MatrixXd cov;
    double jitter = 0.0;
};

/// Relative diagonal jitter added by grid_posterior (times the largest variance).
inline constexpr double kBaseJitter = 1e-10;

GridPosterior grid_posterior(const PosteriorGP& post, std::span<const double> grid);

/// Wraps an explicit mean and covariance (jitter applied as in grid_posterior).
GridPosterior make_grid_posterior(std::vector<double> grid, Eigen::VectorXd mean, Eigen::MatrixXd cov);

/// Lower factor L with L L^T = cov, escalating extra diagonal jitter x10 from
/// 1e-9 up to 1e-6 times the largest variance. A zero matrix factors to zero.
/// Throws NumericalError if every attempt fails.
Eigen::MatrixXd covariance_factor(const Eigen::MatrixXd& cov);

/// draws x m matrix of centered draws L xi; standard normals are consumed draw by draw.
Eigen::MatrixXd sample_deviations(const Eigen::MatrixXd& factor, std::size_t draws, std::uint64_t seed);

/// draws x m matrix whose rows are mean + L xi.
Eigen::MatrixXd sample_posterior(const GridPosterior& gp, std::size_t draws, std::uint64_t seed);

/// m equally spaced points on [0,1] including both ends (m >= 2), or {0.5} for m = 1.
std::vector<double> equispaced_grid(std::size_t m);

}  // namespace gpcover
