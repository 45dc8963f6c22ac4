#include "gpcover/credible.hpp"

#include <algorithm>
#include <cmath>

#include "gpcover/random.hpp"

namespace gpcover {

namespace {

void check_level(double beta) {
    if (!(beta > 0.0 && beta < 1.0)) throw std::domain_error("credible level must lie in (0,1)");
}

std::vector<double> sorted_row_sup(const Eigen::MatrixXd& deviations) {
    std::vector<double> out(static_cast<std::size_t>(deviations.rows()));
    for (Eigen::Index d = 0; d < deviations.rows(); ++d)
        out[static_cast<std::size_t>(d)] = deviations.row(d).cwiseAbs().maxCoeff();
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

PointwiseInterval pointwise_interval(double mean, double variance, double beta) {
    check_level(beta);
    const double z = normal_quantile(0.5 * (1.0 + beta));
    return PointwiseInterval{mean, z * std::sqrt(std::max(variance, 0.0)), beta};
}

PointwiseInterval pointwise_interval(const PosteriorGP& post, double x, double beta) {
    return pointwise_interval(post.mean_at(x), post.cov_at(x, x), beta);
}

double empirical_quantile(std::span<const double> sorted, double beta) {
    check_level(beta);
    if (sorted.empty()) throw std::invalid_argument("empirical_quantile of an empty sample");
    const double n = static_cast<double>(sorted.size());
    // Guard against beta * N landing one ulp above an integer.
    auto idx = static_cast<std::size_t>(std::ceil(beta * n - 1e-9));
    idx = std::clamp<std::size_t>(idx, 1, sorted.size());
    return sorted[idx - 1];
}

std::vector<double> sup_deviations(const GridPosterior& gp, std::size_t draws, std::uint64_t seed) {
    return sorted_row_sup(sample_deviations(covariance_factor(gp.cov), draws, seed));
}

std::vector<double> simultaneous_radii(const GridPosterior& gp, std::span<const double> betas, std::size_t draws,
                                       std::uint64_t seed) {
    if (draws < 100) throw std::invalid_argument("simultaneous radius needs at least 100 draws");
    const std::vector<double> sups = sup_deviations(gp, draws, seed);
    std::vector<double> out;
    out.reserve(betas.size());
    for (double b : betas) out.push_back(empirical_quantile(sups, b));
    return out;
}

double simultaneous_radius(const GridPosterior& gp, double beta, std::size_t draws, std::uint64_t seed) {
    return simultaneous_radii(gp, std::span<const double>(&beta, 1), draws, seed).front();
}

CredibleBand credible_band(const GridPosterior& gp, double beta, std::size_t draws, std::uint64_t seed) {
    return CredibleBand{gp.grid, gp.mean, simultaneous_radius(gp, beta, draws, seed), beta, draws};
}

bool band_contains(const CredibleBand& band, std::span<const double> f_values) {
    if (f_values.size() != static_cast<std::size_t>(band.center.size()))
        throw std::invalid_argument("band_contains: length mismatch");
    for (std::size_t i = 0; i < f_values.size(); ++i)
        if (std::abs(f_values[i] - band.center(static_cast<Eigen::Index>(i))) > band.radius) return false;
    return true;
}

double sup_comparison_coverage(const Eigen::MatrixXd& cov_a, const Eigen::MatrixXd& cov_b, double beta,
                               std::size_t draws, std::uint64_t seed) {
    check_level(beta);
    if (cov_a.rows() != cov_b.rows()) throw std::invalid_argument("covariances differ in size");
    const std::vector<double> sup_a =
        sorted_row_sup(sample_deviations(covariance_factor(cov_a), draws, derive_seed(seed, 0, 1)));
    const std::vector<double> sup_b =
        sorted_row_sup(sample_deviations(covariance_factor(cov_b), draws, derive_seed(seed, 0, 2)));
    const double q = empirical_quantile(sup_a, beta);
    const auto covered = std::upper_bound(sup_b.begin(), sup_b.end(), q) - sup_b.begin();
    return static_cast<double>(covered) / static_cast<double>(sup_b.size());
}

double band_coverage_limit(const SpectralModel& model, std::span<const double> grid, double beta, std::size_t draws,
                           std::uint64_t seed) {
    if (draws < 1000) throw std::invalid_argument("band_coverage_limit needs at least 1000 draws");
    return sup_comparison_coverage(c_hat_B_matrix(model, grid), c_hat_matrix(model, grid), beta, draws, seed);
}

double kolmogorov_distance(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("kolmogorov_distance needs nonempty samples");
    std::vector<double> sa(a.begin(), a.end());
    std::vector<double> sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    const double na = static_cast<double>(sa.size());
    const double nb = static_cast<double>(sb.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double best = 0.0;
    while (i < sa.size() || j < sb.size()) {
        // Advance past every copy of the next pooled value in both samples.
        double t;
        if (j == sb.size() || (i < sa.size() && sa[i] <= sb[j])) t = sa[i];
        else t = sb[j];
        while (i < sa.size() && sa[i] == t) ++i;
        while (j < sb.size() && sb[j] == t) ++j;
        best = std::max(best, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return best;
}

}  // namespace gpcover
