#include "gpcover/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace gpcover {

namespace {

bool is_close(double a, double b) { return std::abs(a - b) < 1e-14; }

}  // namespace

KernelSpec KernelSpec::matern(double nu) {
    KernelSpec s;
    s.kind = KernelKind::Matern;
    s.matern_smoothness = nu;
    s.validate();
    return s;
}

KernelSpec KernelSpec::spectral(double alpha, std::size_t truncation) {
    KernelSpec s;
    s.kind = KernelKind::Spectral;
    s.spectral_alpha = alpha;
    s.spectral_truncation = truncation;
    s.validate();
    return s;
}

void KernelSpec::validate() const {
    if (kind == KernelKind::Matern) {
        if (!(matern_smoothness >= kMaternNuMin && matern_smoothness <= kMaternNuMax))
            throw std::domain_error("Matern smoothness must lie in [0.05, 5], got " +
                                    std::to_string(matern_smoothness));
    } else {
        if (!(spectral_alpha > 0.5))
            throw std::domain_error("spectral alpha must exceed 1/2, got " + std::to_string(spectral_alpha));
        if (spectral_truncation == 0) throw std::domain_error("spectral truncation must be positive");
    }
}

Kernel::Kernel(KernelSpec spec) : spec_(spec) {
    spec_.validate();
    if (spec_.kind == KernelKind::Matern) {
        const double nu = spec_.matern_smoothness;
        matern_prefactor_ = std::exp((1.0 - nu) * std::numbers::ln2 - std::lgamma(nu));
        matern_scale_ = std::sqrt(2.0 * nu);
        if (is_close(nu, 0.5)) half_integer_order_ = 0;
        else if (is_close(nu, 1.5)) half_integer_order_ = 1;
        else if (is_close(nu, 2.5)) half_integer_order_ = 2;
    }
}

double Kernel::matern(double r) const {
    const double z = matern_scale_ * r;
    switch (half_integer_order_) {
        case 0: return std::exp(-z);
        case 1: return (1.0 + z) * std::exp(-z);
        case 2: return (1.0 + z + z * z / 3.0) * std::exp(-z);
        default: break;
    }
    // r = 0 limit; K_nu(z) overflows for tiny z.
    if (z < 1e-100) return 1.0;
    const double nu = spec_.matern_smoothness;
    const double v = matern_prefactor_ * std::pow(z, nu) * std::cyl_bessel_k(nu, z);
    return std::min(v, 1.0);
}

double Kernel::operator()(double x, double y) const {
    if (spec_.kind == KernelKind::Matern) return matern(std::abs(x - y));
    return spectral_kernel_eval(spec_, x, y);
}

double matern_eval(double x, double y, double nu) {
    return Kernel(KernelSpec::matern(nu))(x, y);
}

double matern_eigen_constant(double nu) {
    KernelSpec::matern(nu).validate();
    const double alpha = nu + 0.5;
    const double log_tail = std::log(2.0) + 0.5 * std::log(std::numbers::pi) + std::lgamma(alpha) - std::lgamma(nu) +
                            nu * std::log(2.0 * nu);
    return std::exp(log_tail - 2.0 * alpha * std::log(2.0 * std::numbers::pi));
}

double fourier_basis(std::size_t j, double x) {
    if (j == 0) throw std::out_of_range("Fourier basis index starts at 1");
    const double k = static_cast<double>((j + 1) / 2);
    const double arg = std::numbers::pi * k * x;
    return std::numbers::sqrt2 * ((j % 2 == 1) ? std::sin(arg) : std::cos(arg));
}

double spectral_eigenvalue(std::size_t j, double alpha) {
    if (j == 0) throw std::out_of_range("eigenvalue index starts at 1");
    const double k = static_cast<double>((j + 1) / 2);
    return std::pow(k, -2.0 * alpha);
}

double spectral_kernel_eval(const KernelSpec& spec, double x, double y) {
    if (spec.kind != KernelKind::Spectral) throw std::invalid_argument("spectral_kernel_eval needs a Spectral kernel");
    const std::size_t J = spec.spectral_truncation;
    const std::size_t pairs = J / 2;
    // Each complete pair contributes mu_k * 2 (sin sin + cos cos) = 2 mu_k cos(pi k (x - y)).
    const double d = std::numbers::pi * (x - y);
    double sum = 0.0;
    for (std::size_t k = 1; k <= pairs; ++k) {
        const double kk = static_cast<double>(k);
        sum += 2.0 * std::pow(kk, -2.0 * spec.spectral_alpha) * std::cos(kk * d);
    }
    if (J % 2 == 1) sum += spectral_eigenvalue(J, spec.spectral_alpha) * fourier_basis(J, x) * fourier_basis(J, y);
    return sum;
}

double GramMatrix::min_eigenvalue() const {
    if (entries.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(entries, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

Eigen::MatrixXd cross_gram(std::span<const double> a, std::span<const double> b, const Kernel& kernel) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(a.size()), static_cast<Eigen::Index>(b.size()));
    for (Eigen::Index j = 0; j < out.cols(); ++j)
        for (Eigen::Index i = 0; i < out.rows(); ++i)
            out(i, j) = kernel(a[static_cast<std::size_t>(i)], b[static_cast<std::size_t>(j)]);
    return out;
}

Eigen::MatrixXd sym_gram(std::span<const double> a, const Kernel& kernel) {
    const auto n = static_cast<Eigen::Index>(a.size());
    Eigen::MatrixXd out(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        out(j, j) = kernel(a[static_cast<std::size_t>(j)], a[static_cast<std::size_t>(j)]);
        for (Eigen::Index i = j + 1; i < n; ++i) {
            const double v = kernel(a[static_cast<std::size_t>(i)], a[static_cast<std::size_t>(j)]);
            out(i, j) = v;
            out(j, i) = v;
        }
    }
    return out;
}

GramMatrix gram(std::span<const double> points, const KernelSpec& spec) {
    for (double p : points)
        if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("gram points must lie in [0,1]");
    const Kernel kernel(spec);
    return GramMatrix{sym_gram(points, kernel), std::vector<double>(points.begin(), points.end())};
}

}  // namespace gpcover
