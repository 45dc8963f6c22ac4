#include "gpcover/posterior.hpp"

#include <algorithm>
#include <cmath>

#include "gpcover/random.hpp"

namespace gpcover {

void Dataset::validate() const {
    if (x.size() != y.size()) throw std::invalid_argument("dataset x and y lengths differ");
    if (x.empty()) throw std::invalid_argument("dataset is empty");
    for (double v : x)
        if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("design points must lie in [0,1]");
}

PosteriorGP::PosteriorGP(Dataset data, Kernel kernel, double lambda, double sigma2)
    : data_(std::move(data)), kernel_(std::move(kernel)), lambda_(lambda), sigma2_(sigma2) {}

PosteriorGP fit(Dataset data, const KernelSpec& kernel, double lambda, double sigma2) {
    data.validate();
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
    if (!(sigma2 > 0.0)) throw std::invalid_argument("sigma2 must be positive");

    PosteriorGP post(std::move(data), Kernel(kernel), lambda, sigma2);
    const auto n = static_cast<Eigen::Index>(post.data_.size());
    Eigen::MatrixXd system = sym_gram(post.data_.x, post.kernel_);
    system.diagonal().array() += static_cast<double>(n) * lambda;
    post.system_.compute(system);
    if (post.system_.info() != Eigen::Success)
        throw NumericalError("Cholesky factorization of K(X,X) + n lambda I failed");
    const Eigen::Map<const Eigen::VectorXd> y(post.data_.y.data(), n);
    post.weights_ = post.system_.solve(y);
    return post;
}

double PosteriorGP::prior_scale() const noexcept {
    return sigma2_ / (static_cast<double>(data_.size()) * lambda_);
}

Eigen::VectorXd PosteriorGP::kernel_column(double x) const {
    Eigen::VectorXd k(static_cast<Eigen::Index>(data_.size()));
    for (std::size_t i = 0; i < data_.size(); ++i) k(static_cast<Eigen::Index>(i)) = kernel_(data_.x[i], x);
    return k;
}

double PosteriorGP::mean_at(double x) const { return kernel_column(x).dot(weights_); }

double PosteriorGP::cov_at(double x, double xp) const {
    const Eigen::VectorXd a = system_.matrixL().solve(kernel_column(x));
    const Eigen::VectorXd b = system_.matrixL().solve(kernel_column(xp));
    return prior_scale() * (kernel_(x, xp) - a.dot(b));
}

Eigen::VectorXd PosteriorGP::noiseless_krr(double anchor, std::span<const double> query) const {
    const Eigen::VectorXd coef = system_.solve(kernel_column(anchor));
    return cross_gram(query, data_.x, kernel_) * coef;
}

Eigen::VectorXd PosteriorGP::mean_on(std::span<const double> grid) const {
    return cross_gram(grid, data_.x, kernel_) * weights_;
}

Eigen::MatrixXd PosteriorGP::cov_on(std::span<const double> grid) const {
    const Eigen::MatrixXd v = system_.matrixL().solve(cross_gram(data_.x, grid, kernel_));
    Eigen::MatrixXd cov = sym_gram(grid, kernel_);
    cov.noalias() -= v.transpose() * v;
    cov *= prior_scale();
    // Exact symmetry; the product is symmetric only up to rounding.
    const Eigen::MatrixXd sym = 0.5 * (cov + cov.transpose());
    return sym;
}

GridPosterior make_grid_posterior(std::vector<double> grid, Eigen::VectorXd mean, Eigen::MatrixXd cov) {
    GridPosterior gp;
    gp.grid = std::move(grid);
    gp.mean = std::move(mean);
    gp.cov = std::move(cov);
    const double max_diag = gp.cov.size() ? std::max(gp.cov.diagonal().maxCoeff(), 0.0) : 0.0;
    gp.jitter = kBaseJitter * max_diag;
    gp.cov.diagonal().array() += gp.jitter;
    return gp;
}

GridPosterior grid_posterior(const PosteriorGP& post, std::span<const double> grid) {
    if (grid.empty()) throw std::invalid_argument("grid_posterior needs at least one point");
    return make_grid_posterior(std::vector<double>(grid.begin(), grid.end()), post.mean_on(grid), post.cov_on(grid));
}

Eigen::MatrixXd covariance_factor(const Eigen::MatrixXd& cov) {
    const auto m = cov.rows();
    const double max_diag = m ? std::max(cov.diagonal().maxCoeff(), 0.0) : 0.0;
    if (max_diag == 0.0) return Eigen::MatrixXd::Zero(m, m);

    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() == Eigen::Success) return llt.matrixL();
    for (double rel = 1e-9; rel <= 1.0001e-6; rel *= 10.0) {
        Eigen::MatrixXd shifted = cov;
        shifted.diagonal().array() += rel * max_diag;
        llt.compute(shifted);
        if (llt.info() == Eigen::Success) return llt.matrixL();
    }
    throw NumericalError("covariance factorization failed after jitter escalation to 1e-6");
}

Eigen::MatrixXd sample_deviations(const Eigen::MatrixXd& factor, std::size_t draws, std::uint64_t seed) {
    if (draws == 0) throw std::invalid_argument("draws must be at least 1");
    const auto m = factor.rows();
    Rng rng(seed);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd xi(m, static_cast<Eigen::Index>(draws));
    for (Eigen::Index d = 0; d < xi.cols(); ++d)
        for (Eigen::Index i = 0; i < m; ++i) xi(i, d) = normal(rng);
    return (factor.triangularView<Eigen::Lower>() * xi).transpose();
}

Eigen::MatrixXd sample_posterior(const GridPosterior& gp, std::size_t draws, std::uint64_t seed) {
    Eigen::MatrixXd out = sample_deviations(covariance_factor(gp.cov), draws, seed);
    out.rowwise() += gp.mean.transpose();
    return out;
}

std::vector<double> equispaced_grid(std::size_t m) {
    if (m == 0) throw std::invalid_argument("grid size must be positive");
    if (m == 1) return {0.5};
    std::vector<double> g(m);
    for (std::size_t i = 0; i < m; ++i) g[i] = static_cast<double>(i) / static_cast<double>(m - 1);
    return g;
}

}  // namespace gpcover
