#include "gpcover/true_function.hpp"

#include <cmath>
#include <numbers>

#include "gpcover/detail/trig_series.hpp"
#include "gpcover/kernels.hpp"

namespace gpcover {

TrueFunction::TrueFunction(std::size_t terms) : coeffs_(terms) {
    for (std::size_t j = 1; j <= terms; ++j) {
        const double jj = static_cast<double>(j);
        coeffs_[j - 1] = std::pow(jj, -1.7) * std::sin(jj);
    }
}

double TrueFunction::operator()(double x) const {
    return detail::cos_series(coeffs_, std::numbers::pi * x, -0.5);
}

std::vector<double> TrueFunction::operator()(std::span<const double> xs) const {
    std::vector<double> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = (*this)(xs[i]);
    return out;
}

double TrueFunction::truncation_bound() const {
    return std::pow(static_cast<double>(coeffs_.size()), -0.7) / 0.7;
}

std::vector<double> TrueFunction::cosine_coefficients(std::size_t count) const {
    // With a = pi (j - 1/2) and b = pi k, sin(a - b) = sin(a + b) = -(-1)^{j + k}, so
    //   int_0^1 cos(a x) cos(b x) dx = -(-1)^{j + k} (1/(a - b) + 1/(a + b)) / 2.
    constexpr double pi = std::numbers::pi;
    std::vector<double> out(count + 1, 0.0);
    for (std::size_t k = 0; k <= count; ++k) {
        const double b = pi * static_cast<double>(k);
        double sum = 0.0;
        for (std::size_t j = 1; j <= coeffs_.size(); ++j) {
            const double a = pi * (static_cast<double>(j) - 0.5);
            const double sign = (j + k) % 2 == 0 ? -1.0 : 1.0;
            sum += coeffs_[j - 1] * sign * (1.0 / (a - b) + 1.0 / (a + b));
        }
        out[k] = k == 0 ? 0.5 * sum : std::numbers::sqrt2 / 2.0 * sum;
    }
    return out;
}

const TrueFunction& TrueFunction::shared() {
    static const TrueFunction instance;
    return instance;
}

std::vector<double> population_bias(const SpectralModel& model, const TrueFunction& f, std::span<const double> xs) {
    const auto nu = model.pair_nu();
    std::vector<double> w = f.cosine_coefficients(nu.size());
    for (std::size_t k = 1; k < w.size(); ++k) w[k] *= std::numbers::sqrt2 * nu[k - 1];
    const std::span<const double> tail(w.begin() + 1, w.end());
    std::vector<double> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
        out[i] = f(xs[i]) - w[0] - detail::cos_series(tail, std::numbers::pi * xs[i]);
    return out;
}

}  // namespace gpcover
