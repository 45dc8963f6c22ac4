#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace gpcover {

enum class SmoothnessClass { Sobolev, Holder };

/// A function through its coordinates f_1, f_2, ... in the Fourier basis.
struct FunctionCoeffs {
    std::vector<double> coeffs;

    [[nodiscard]] std::size_t size() const noexcept { return coeffs.size(); }
    /// sum_j f_j psi_j(x)
    [[nodiscard]] double evaluate(double x) const;
};

/// Population-level spectral quantities for paired eigenvalues
/// mu_{2k-1} = mu_{2k} = k^{-2 alpha} and regularization lambda = h^{2 alpha}.
///
/// The truncation J is rounded up to an even number so that every eigenvalue
/// pair is complete; with complete pairs the equivalent kernel and both
/// population covariances depend on x - x' only.
class SpectralModel {
public:
    /// truncation == 0 selects default_truncation(h).
    /// Throws std::domain_error for alpha <= 1/2, h outside (0,1] or sigma2 < 0.
    static SpectralModel make(double alpha, double h, double sigma2, std::size_t truncation = 0);

    /// max(2000, 20 ceil(1/h)), rounded up to even.
    static std::size_t default_truncation(double h);

    [[nodiscard]] double alpha() const noexcept { return alpha_; }
    [[nodiscard]] double h() const noexcept { return h_; }
    [[nodiscard]] double lambda() const noexcept { return lambda_; }
    [[nodiscard]] double sigma2() const noexcept { return sigma2_; }
    [[nodiscard]] std::size_t truncation() const noexcept { return 2 * pair_nu_.size(); }

    /// nu_j = mu_j / (mu_j + lambda), 1-based j <= truncation(); throws std::out_of_range otherwise.
    [[nodiscard]] double nu(std::size_t j) const;
    /// nu for the k-th eigenvalue pair (1-based), shared by psi_{2k-1} and psi_{2k}.
    [[nodiscard]] std::span<const double> pair_nu() const noexcept { return pair_nu_; }

    /// sum_{j <= J} nu_j
    [[nodiscard]] double nu_sum() const;
    /// Integral upper bound on sum_{j > J} nu_j relative to nu_sum().
    [[nodiscard]] double relative_tail_bound() const;

    /// sum_{k > J/2} 2 nu_k and sum_{k > J/2} 2 nu_k^2 beyond the truncation, by the
    /// midpoint integral from J/2 + 1/2. Added to diagonals and to c_ir.
    [[nodiscard]] double nu_tail() const noexcept { return nu_tail_; }
    [[nodiscard]] double squared_tail() const noexcept { return sq_tail_; }

    /// 2 nu_k and 2 nu_k^2 per pair: the cosine-series weights of K~ and of C / (sigma^2 h).
    [[nodiscard]] std::span<const double> equivalent_weights() const noexcept { return eq_weights_; }
    [[nodiscard]] std::span<const double> squared_weights() const noexcept { return sq_weights_; }

private:
    SpectralModel() = default;

    double alpha_ = 1.0;
    double h_ = 1.0;
    double lambda_ = 1.0;
    double sigma2_ = 1.0;
    double nu_tail_ = 0.0;
    double sq_tail_ = 0.0;
    std::vector<double> pair_nu_;
    std::vector<double> eq_weights_;
    std::vector<double> sq_weights_;
};

/// K~(s,t) = sum_j nu_j psi_j(s) psi_j(t)
double equivalent_kernel(const SpectralModel& model, double s, double t);

struct KernelSpec;

/// Reproducing kernel of <f,g>_{L2[0,1]} + lambda <f,g>_H at the given points,
/// K~ = (K - K_pz (K_zz / m + lambda I)^{-1} K_zp / m) / lambda on m midpoint nodes.
/// Agrees with the series form only when the basis is an L2[0,1] eigenbasis of K,
/// which the paired sine/cosine basis is not.
Eigen::MatrixXd equivalent_kernel_matrix(const KernelSpec& kernel, double lambda, std::span<const double> points,
                                         std::size_t nodes = 2000);

/// Coefficient-wise nu_j f_j. Throws std::invalid_argument when f is longer than the truncation.
FunctionCoeffs apply_F_lambda(const SpectralModel& model, const FunctionCoeffs& f);
/// Coefficient-wise (1 - nu_j) f_j.
FunctionCoeffs apply_P_lambda(const SpectralModel& model, const FunctionCoeffs& f);

/// sqrt(sum j^{2a} f_j^2) for Sobolev, sum j^a |f_j| for Holder.
double class_norm(const FunctionCoeffs& f, double alpha, SmoothnessClass cls);

/// sqrt2 * sum (1 - nu_j)|f_j|, an upper bound on the sup norm of P_lambda f.
double p_lambda_sup_bound(const SpectralModel& model, const FunctionCoeffs& f);

/// C^B(x,x') = sigma^2 h sum nu_j psi_j(x) psi_j(x'). The terms beyond the
/// truncation oscillate away off the diagonal, so their mass is added only at x = x'.
double c_hat_B(const SpectralModel& model, double x, double xp);
/// C(x,x') = sigma^2 h sum nu_j^2 psi_j(x) psi_j(x'), tail handled as in c_hat_B.
double c_hat(const SpectralModel& model, double x, double xp);

Eigen::MatrixXd c_hat_B_matrix(const SpectralModel& model, std::span<const double> grid);
Eigen::MatrixXd c_hat_matrix(const SpectralModel& model, std::span<const double> grid);

/// Variance inflation ratio C^B(x,x) / C(x,x), tails included.
double c_ir(const SpectralModel& model);
/// h -> 0 limit 2 alpha / (2 alpha - 1).
double c_ir_limit(double alpha);

/// 2 Phi(sqrt(C_IR) z_{(1+beta)/2}) - 1 at the limiting C_IR.
double asymptotic_pointwise_coverage(double alpha, double beta);
/// 2 Phi(C_IR z_{(1+beta)/2}) - 1, the variant without the square root.
double asymptotic_pointwise_coverage_unsquared(double alpha, double beta);

/// Phi(u + b) - Phi(-u + b)
double coverage_from_terms(double inflated_quantile, double bias);

/// Predicted pointwise coverage at x given the bias value (P_lambda f*)(x).
double coverage_prediction_from_bias(const SpectralModel& model, double x, double bias_at_x,
                                     std::size_t n, double beta);
/// Predicted pointwise coverage at x with P_lambda f* taken from f's coefficients.
double coverage_prediction(const SpectralModel& model, double x, const FunctionCoeffs& f,
                           std::size_t n, double beta);

struct RatesBundle {
    double gamma_n = 0.0;
    double delta_n = 0.0;
    double bias_supnorm = 0.0;
};

/// Unspecified constants in the rate expressions are set to 1.
RatesBundle rates(std::size_t n, const SpectralModel& model, const FunctionCoeffs& f);

/// Bandwidth of the minimax rate choice: (B^2 n / (sigma^2 log n))^{-1/(2a)} for
/// Sobolev, exponent -1/(2a+1) for Holder. Throws std::domain_error when n < 2.
double bandwidth_for_class(std::size_t n, double alpha, double B, double sigma, SmoothnessClass cls);

}  // namespace gpcover
