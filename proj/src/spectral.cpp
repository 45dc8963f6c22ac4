#include "gpcover/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "gpcover/detail/trig_series.hpp"
#include "gpcover/kernels.hpp"
#include "gpcover/posterior.hpp"
#include "gpcover/normal.hpp"

namespace gpcover {

namespace {

void check_level(double beta) {
    if (!(beta > 0.0 && beta < 1.0)) throw std::domain_error("credible level must lie in (0,1)");
}

void check_alpha(double alpha) {
    if (!(alpha > 0.5)) throw std::domain_error("alpha must exceed 1/2, got " + std::to_string(alpha));
}

void check_length(const SpectralModel& model, const FunctionCoeffs& f) {
    if (f.size() > model.truncation())
        throw std::invalid_argument("function has " + std::to_string(f.size()) +
                                    " coefficients, more than the truncation " +
                                    std::to_string(model.truncation()));
}

// sum over complete pairs of w_k cos(pi k (x - x'))
double stationary_sum(std::span<const double> weights, double x, double xp) {
    return detail::cos_series(weights, std::numbers::pi * (x - xp));
}

Eigen::MatrixXd stationary_matrix(std::span<const double> weights, double tail, double scale,
                                  std::span<const double> grid) {
    const auto m = static_cast<Eigen::Index>(grid.size());
    Eigen::MatrixXd out(m, m);
    const double diag = scale * (std::accumulate(weights.begin(), weights.end(), 0.0) + tail);
    for (Eigen::Index j = 0; j < m; ++j) {
        out(j, j) = diag;
        for (Eigen::Index i = j + 1; i < m; ++i) {
            const double v =
                scale * stationary_sum(weights, grid[static_cast<std::size_t>(i)], grid[static_cast<std::size_t>(j)]);
            out(i, j) = v;
            out(j, i) = v;
        }
    }
    return out;
}

// int_{from}^inf 2 (1 + lambda t^{2a})^{-power} dt
double tail_integral(double lambda, double alpha, double from, int power) {
    boost::math::quadrature::exp_sinh<double> integrator;
    const auto f = [&](double u) { return 2.0 * std::pow(1.0 + lambda * std::pow(from + u, 2.0 * alpha), -power); };
    return integrator.integrate(f);
}

}  // namespace

double FunctionCoeffs::evaluate(double x) const {
    double sum = 0.0;
    for (std::size_t j = 0; j < coeffs.size(); ++j)
        if (coeffs[j] != 0.0) sum += coeffs[j] * fourier_basis(j + 1, x);
    return sum;
}

std::size_t SpectralModel::default_truncation(double h) {
    const auto by_h = static_cast<std::size_t>(20.0 * std::ceil(1.0 / h));
    std::size_t J = std::max<std::size_t>(2000, by_h);
    return J + (J % 2);
}

SpectralModel SpectralModel::make(double alpha, double h, double sigma2, std::size_t truncation) {
    check_alpha(alpha);
    if (!(h > 0.0 && h <= 1.0)) throw std::domain_error("bandwidth h must lie in (0,1], got " + std::to_string(h));
    if (!(sigma2 >= 0.0)) throw std::domain_error("noise variance must be nonnegative");
    std::size_t J = truncation == 0 ? default_truncation(h) : truncation;
    J += J % 2;

    SpectralModel model;
    model.alpha_ = alpha;
    model.h_ = h;
    model.lambda_ = std::pow(h, 2.0 * alpha);
    model.sigma2_ = sigma2;
    const std::size_t pairs = J / 2;
    model.pair_nu_.resize(pairs);
    model.eq_weights_.resize(pairs);
    model.sq_weights_.resize(pairs);
    for (std::size_t k = 1; k <= pairs; ++k) {
        // mu/(mu + lambda) written as 1/(1 + lambda k^{2 alpha}) to avoid underflow of mu.
        const double nu = 1.0 / (1.0 + model.lambda_ * std::pow(static_cast<double>(k), 2.0 * alpha));
        model.pair_nu_[k - 1] = nu;
        model.eq_weights_[k - 1] = 2.0 * nu;
        model.sq_weights_[k - 1] = 2.0 * nu * nu;
    }
    const double from = static_cast<double>(pairs) + 0.5;
    model.nu_tail_ = tail_integral(model.lambda_, alpha, from, 1);
    model.sq_tail_ = tail_integral(model.lambda_, alpha, from, 2);
    return model;
}

double SpectralModel::nu(std::size_t j) const {
    if (j == 0 || j > truncation())
        throw std::out_of_range("nu index " + std::to_string(j) + " outside [1, " + std::to_string(truncation()) + "]");
    return pair_nu_[(j + 1) / 2 - 1];
}

double SpectralModel::nu_sum() const { return std::accumulate(eq_weights_.begin(), eq_weights_.end(), 0.0); }

double SpectralModel::relative_tail_bound() const {
    // sum_{k > P} 2/(1 + lambda k^{2a}) <= 2 int_P^inf (lambda t^{2a})^{-1} dt
    const double P = static_cast<double>(pair_nu_.size());
    const double tail = 2.0 * std::pow(P, 1.0 - 2.0 * alpha_) / (lambda_ * (2.0 * alpha_ - 1.0));
    return tail / nu_sum();
}

double equivalent_kernel(const SpectralModel& model, double s, double t) {
    return stationary_sum(model.equivalent_weights(), s, t);
}

Eigen::MatrixXd equivalent_kernel_matrix(const KernelSpec& kernel, double lambda, std::span<const double> points,
                                         std::size_t nodes) {
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
    if (nodes < 2) throw std::invalid_argument("at least two quadrature nodes are required");
    const Kernel k(kernel);
    const double m = static_cast<double>(nodes);
    std::vector<double> z(nodes);
    for (std::size_t i = 0; i < nodes; ++i) z[i] = (static_cast<double>(i) + 0.5) / m;
    Eigen::MatrixXd A = sym_gram(z, k) / m;
    A.diagonal().array() += lambda;
    const Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() != Eigen::Success) throw NumericalError("equivalent kernel system is not positive definite");
    const Eigen::MatrixXd B = llt.matrixL().solve(cross_gram(z, points, k));
    Eigen::MatrixXd out = sym_gram(points, k);
    out.noalias() -= B.transpose() * B / m;
    return out / lambda;
}

FunctionCoeffs apply_F_lambda(const SpectralModel& model, const FunctionCoeffs& f) {
    check_length(model, f);
    FunctionCoeffs out{f.coeffs};
    for (std::size_t j = 0; j < out.size(); ++j) out.coeffs[j] *= model.nu(j + 1);
    return out;
}

FunctionCoeffs apply_P_lambda(const SpectralModel& model, const FunctionCoeffs& f) {
    check_length(model, f);
    FunctionCoeffs out{f.coeffs};
    for (std::size_t j = 0; j < out.size(); ++j) out.coeffs[j] *= 1.0 - model.nu(j + 1);
    return out;
}

double class_norm(const FunctionCoeffs& f, double alpha, SmoothnessClass cls) {
    if (!(alpha > 0.0)) throw std::domain_error("class_norm needs alpha > 0");
    double sum = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) {
        const double jj = static_cast<double>(j + 1);
        if (cls == SmoothnessClass::Sobolev) sum += std::pow(jj, 2.0 * alpha) * f.coeffs[j] * f.coeffs[j];
        else sum += std::pow(jj, alpha) * std::abs(f.coeffs[j]);
    }
    return cls == SmoothnessClass::Sobolev ? std::sqrt(sum) : sum;
}

double p_lambda_sup_bound(const SpectralModel& model, const FunctionCoeffs& f) {
    check_length(model, f);
    double sum = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) sum += (1.0 - model.nu(j + 1)) * std::abs(f.coeffs[j]);
    return std::numbers::sqrt2 * sum;
}

double c_hat_B(const SpectralModel& model, double x, double xp) {
    const double tail = x == xp ? model.nu_tail() : 0.0;
    return model.sigma2() * model.h() * (stationary_sum(model.equivalent_weights(), x, xp) + tail);
}

double c_hat(const SpectralModel& model, double x, double xp) {
    const double tail = x == xp ? model.squared_tail() : 0.0;
    return model.sigma2() * model.h() * (stationary_sum(model.squared_weights(), x, xp) + tail);
}

Eigen::MatrixXd c_hat_B_matrix(const SpectralModel& model, std::span<const double> grid) {
    return stationary_matrix(model.equivalent_weights(), model.nu_tail(), model.sigma2() * model.h(), grid);
}

Eigen::MatrixXd c_hat_matrix(const SpectralModel& model, std::span<const double> grid) {
    return stationary_matrix(model.squared_weights(), model.squared_tail(), model.sigma2() * model.h(), grid);
}

double c_ir(const SpectralModel& model) {
    const auto w = model.squared_weights();
    return (model.nu_sum() + model.nu_tail()) / (std::accumulate(w.begin(), w.end(), 0.0) + model.squared_tail());
}

double c_ir_limit(double alpha) {
    check_alpha(alpha);
    return 2.0 * alpha / (2.0 * alpha - 1.0);
}

double asymptotic_pointwise_coverage(double alpha, double beta) {
    check_level(beta);
    const double z = normal_quantile(0.5 * (1.0 + beta));
    return 2.0 * normal_cdf(std::sqrt(c_ir_limit(alpha)) * z) - 1.0;
}

double asymptotic_pointwise_coverage_unsquared(double alpha, double beta) {
    check_level(beta);
    const double z = normal_quantile(0.5 * (1.0 + beta));
    return 2.0 * normal_cdf(c_ir_limit(alpha) * z) - 1.0;
}

double coverage_from_terms(double inflated_quantile, double bias) {
    return normal_cdf(inflated_quantile + bias) - normal_cdf(-inflated_quantile + bias);
}

double coverage_prediction_from_bias(const SpectralModel& model, double x, double bias_at_x, std::size_t n,
                                     double beta) {
    check_level(beta);
    const double cb = c_hat_B(model, x, x);
    const double c = c_hat(model, x, x);
    const double u = std::sqrt(cb / c) * normal_quantile(0.5 * (1.0 + beta));
    const double b = std::sqrt(static_cast<double>(n) * model.h() / c) * bias_at_x;
    return coverage_from_terms(u, b);
}

double coverage_prediction(const SpectralModel& model, double x, const FunctionCoeffs& f, std::size_t n,
                           double beta) {
    return coverage_prediction_from_bias(model, x, apply_P_lambda(model, f).evaluate(x), n, beta);
}

RatesBundle rates(std::size_t n, const SpectralModel& model, const FunctionCoeffs& f) {
    if (n < 2) throw std::domain_error("rates need n >= 2");
    const double nn = static_cast<double>(n);
    const double a = model.alpha();
    const double h = model.h();
    const double log_n = std::log(nn);
    const double noise_rate = std::sqrt(log_n / (nn * h));
    const double lead = std::pow(nn, -1.0 + 1.0 / (2.0 * a)) * std::pow(h, -1.0 / (2.0 * a)) * std::sqrt(log_n);

    RatesBundle out;
    out.gamma_n = std::max(1.0, lead) * noise_rate;
    out.bias_supnorm = p_lambda_sup_bound(model, f);
    out.delta_n = out.gamma_n * (out.bias_supnorm + std::sqrt(model.sigma2()) * noise_rate);
    return out;
}

double bandwidth_for_class(std::size_t n, double alpha, double B, double sigma, SmoothnessClass cls) {
    if (n < 2) throw std::domain_error("bandwidth_for_class needs n >= 2");
    if (!(B > 0.0 && sigma > 0.0)) throw std::domain_error("bandwidth_for_class needs B, sigma > 0");
    if (!(alpha > 0.0)) throw std::domain_error("bandwidth_for_class needs alpha > 0");
    const double nn = static_cast<double>(n);
    const double base = B * B * nn / (sigma * sigma * std::log(nn));
    const double exponent = cls == SmoothnessClass::Sobolev ? -1.0 / (2.0 * alpha) : -1.0 / (2.0 * alpha + 1.0);
    return std::pow(base, exponent);
}

}  // namespace gpcover
