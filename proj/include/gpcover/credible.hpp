#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gpcover/normal.hpp"
#include "gpcover/posterior.hpp"
#include "gpcover/spectral.hpp"

namespace gpcover {

struct PointwiseInterval {
    double center = 0.0;
    double half_length = 0.0;
    double level = 0.0;

    [[nodiscard]] double lower() const noexcept { return center - half_length; }
    [[nodiscard]] double upper() const noexcept { return center + half_length; }
    [[nodiscard]] bool contains(double v) const noexcept { return lower() <= v && v <= upper(); }
};

/// Closed sup-norm ball {f : max_i |f(grid_i) - center_i| <= radius}.
struct CredibleBand {
    std::vector<double> grid;
    Eigen::VectorXd center;
    double radius = 0.0;
    double level = 0.0;
    std::size_t draws = 0;
};

/// Centered at the posterior mean with half length z_{(1+beta)/2} sqrt(posterior variance).
PointwiseInterval pointwise_interval(const PosteriorGP& post, double x, double beta);
PointwiseInterval pointwise_interval(double mean, double variance, double beta);

/// Order statistic at 1-based index ceil(beta * N) of `sorted` (ascending).
double empirical_quantile(std::span<const double> sorted, double beta);

/// Sorted max_i |L xi|_i over `draws` posterior draws.
std::vector<double> sup_deviations(const GridPosterior& gp, std::size_t draws, std::uint64_t seed);

/// Empirical beta-quantile of the posterior sup deviation. Throws std::invalid_argument for draws < 100.
double simultaneous_radius(const GridPosterior& gp, double beta, std::size_t draws, std::uint64_t seed);

/// One radius per level, all from the same draw set.
std::vector<double> simultaneous_radii(const GridPosterior& gp, std::span<const double> betas, std::size_t draws,
                                       std::uint64_t seed);

CredibleBand credible_band(const GridPosterior& gp, double beta, std::size_t draws, std::uint64_t seed);

/// Throws std::invalid_argument when the lengths differ.
bool band_contains(const CredibleBand& band, std::span<const double> f_values);

/// Fraction of sup|B| draws not exceeding the beta-quantile of sup|A| draws,
/// with A ~ N(0, cov_a) and B ~ N(0, cov_b) on the same grid.
double sup_comparison_coverage(const Eigen::MatrixXd& cov_a, const Eigen::MatrixXd& cov_b, double beta,
                               std::size_t draws, std::uint64_t seed);

/// P[ sup|W| <= q^B(beta) ] with W^B ~ GP(0, C^B) defining the quantile and W ~ GP(0, C).
/// Throws std::invalid_argument for draws < 1000.
double band_coverage_limit(const SpectralModel& model, std::span<const double> grid, double beta,
                           std::size_t draws, std::uint64_t seed);

/// sup_t |F_a(t) - F_b(t)| between the two empirical CDFs. Throws std::invalid_argument on empty input.
double kolmogorov_distance(std::span<const double> a, std::span<const double> b);

}  // namespace gpcover
