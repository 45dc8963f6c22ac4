#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace gpcover {

/// Supported range of the Matérn smoothness parameter.
inline constexpr double kMaternNuMin = 0.05;
inline constexpr double kMaternNuMax = 5.0;

enum class KernelKind { Matern, Spectral };

/// A positive-definite kernel on [0,1]: either the closed-form Matérn(ν)
/// covariance (unit length scale) or a truncated Mercer sum over the Fourier
/// basis with paired eigenvalues mu_{2k-1} = mu_{2k} = k^{-2 alpha}.
struct KernelSpec {
    KernelKind kind = KernelKind::Matern;
    double matern_smoothness = 0.5;
    double spectral_alpha = 1.0;
    std::size_t spectral_truncation = 2000;

    static KernelSpec matern(double nu);
    static KernelSpec spectral(double alpha, std::size_t truncation);

    /// Throws std::domain_error when the parameters are outside the supported range.
    void validate() const;
};

/// Matérn correlation (2^{1-nu}/Gamma(nu)) z^nu K_nu(z), z = sqrt(2 nu)|x-y|.
/// Throws std::domain_error for nu outside [0.05, 5].
double matern_eval(double x, double y, double nu);

/// Constant c in the paired eigenvalue law mu_{2k-1} = mu_{2k} ~ c k^{-2 alpha},
/// alpha = nu + 1/2, for the Matérn kernel on [0,1] under the uniform measure.
/// The j-th eigenvalue is asymptotically the spectral density at pi j, and the
/// density decays as S0 w^{-2 alpha} with S0 = 2 sqrt(pi) Gamma(alpha) (2 nu)^nu / Gamma(nu),
/// so c = S0 (2 pi)^{-2 alpha}.
double matern_eigen_constant(double nu);

/// Fourier basis on [0,1]: j = 2k-1 -> sqrt2 sin(pi k x), j = 2k -> sqrt2 cos(pi k x).
double fourier_basis(std::size_t j, double x);

/// Eigenvalue attached to basis index j (1-based) for the spectral kernel.
double spectral_eigenvalue(std::size_t j, double alpha);

double spectral_kernel_eval(const KernelSpec& spec, double x, double y);

/// Callable kernel with per-parameter constants computed once.
class Kernel {
public:
    explicit Kernel(KernelSpec spec);

    [[nodiscard]] double operator()(double x, double y) const;
    [[nodiscard]] const KernelSpec& spec() const noexcept { return spec_; }

private:
    [[nodiscard]] double matern(double r) const;

    KernelSpec spec_;
    double matern_prefactor_ = 1.0;
    double matern_scale_ = 1.0;
    int half_integer_order_ = -1;  // 0,1,2 for nu = 1/2, 3/2, 5/2
};

struct GramMatrix {
    Eigen::MatrixXd entries;
    std::vector<double> points;

    /// Minimum eigenvalue via a dense symmetric eigensolver.
    [[nodiscard]] double min_eigenvalue() const;
};

GramMatrix gram(std::span<const double> points, const KernelSpec& spec);

/// K(a, b) as an |a| x |b| matrix.
Eigen::MatrixXd cross_gram(std::span<const double> a, std::span<const double> b, const Kernel& kernel);

/// K(a, a), filled symmetrically.
Eigen::MatrixXd sym_gram(std::span<const double> a, const Kernel& kernel);

}  // namespace gpcover
