#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gpcover/spectral.hpp"

namespace gpcover {

/// The simulation truth f*(x) = sum_{j>=1} j^{-1.7} sin(j) cos(pi (j - 1/2) x),
/// truncated at `terms`. The sup-norm truncation error is at most
/// sum_{j > terms} j^{-1.7}, about 4.5e-4 at the default 1e5 terms.
class TrueFunction {
public:
    static constexpr std::size_t kDefaultTerms = 100000;

    explicit TrueFunction(std::size_t terms = kDefaultTerms);

    [[nodiscard]] double operator()(double x) const;
    [[nodiscard]] std::vector<double> operator()(std::span<const double> xs) const;

    [[nodiscard]] std::span<const double> coefficients() const noexcept { return coeffs_; }
    /// sum_{j > terms} j^{-1.7} bounded by the integral from `terms`.
    [[nodiscard]] double truncation_bound() const;

    /// Coordinates g_0..g_count of f* in the orthonormal cosine basis
    /// {1, sqrt2 cos(pi k x)} of L^2[0,1], in closed form term by term.
    [[nodiscard]] std::vector<double> cosine_coefficients(std::size_t count) const;

    /// Process-wide instance at the default truncation.
    static const TrueFunction& shared();

private:
    std::vector<double> coeffs_;
};

/// (P_lambda f*)(x) = f*(x) - (F_lambda f*)(x). F_lambda f* is the convolution
/// of the even extension of f* to [-1,1] with the equivalent kernel, which
/// shrinks the k-th cosine coordinate by nu_k and keeps the constant.
std::vector<double> population_bias(const SpectralModel& model, const TrueFunction& f, std::span<const double> xs);

}  // namespace gpcover
