#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gpcover/posterior.hpp"
#include "gpcover/spectral.hpp"

namespace gpcover {

/// Noise variance used in the prior scale when sigma = 0, so posterior variances stay positive.
inline constexpr double kMinNoiseVariance = 1e-12;

/// How the regularization lambda is chosen for a sample size n and prior
/// smoothness alpha = nu + 1/2.
enum class LambdaRule {
    Rate,      // n^{-2 alpha/(2 alpha + 1)}
    Power,     // scale * n^{-exponent}
    Explicit,  // fixed value
    Class,     // h^{2 alpha}, h from bandwidth_for_class(n, alpha, B, sigma, class)
    Matched,   // scale * c(nu) * n^{-2 alpha/(2 alpha + 1)}, c = matern_eigen_constant(alpha - 1/2)
};

struct LambdaChoice {
    LambdaRule rule = LambdaRule::Matched;
    double value = 0.0;
    double scale = 1.9;
    double exponent = 0.5;
    double class_B = 1.0;
    SmoothnessClass smoothness_class = SmoothnessClass::Holder;

    [[nodiscard]] double resolve(std::size_t n, double alpha, double sigma) const;
};

std::string to_string(LambdaRule rule);
/// Throws std::invalid_argument for an unknown name.
LambdaRule lambda_rule_from_string(const std::string& name);

struct SimConfig {
    std::size_t n = 200;
    double kernel_nu = 0.1;
    std::vector<double> betas{0.8, 0.9};
    std::size_t replicates = 1000;
    std::size_t grid_size = 200;
    double sigma = 0.1;
    std::size_t draws = 1000;
    LambdaChoice lambda;
    std::uint64_t base_seed = 20190101;
    /// 0 = all available cores. Results do not depend on it.
    std::size_t threads = 0;
    /// Draws for the population band-coverage limit; 0 skips it.
    std::size_t theory_draws = 10000;

    /// Throws std::invalid_argument when a field is out of range.
    void validate() const;
    [[nodiscard]] double alpha() const noexcept { return kernel_nu + 0.5; }
};

struct TheoryPrediction {
    double alpha = 0.0;
    double h = 0.0;
    double c_ir_finite = 0.0;
    double c_ir_limit = 0.0;
    double spectral_tail_bound = 0.0;
    std::vector<double> pointwise_limit;            // per beta, square-root inflation
    std::vector<double> pointwise_limit_unsquared;  // per beta
    std::vector<double> pointwise_finite_mean;      // per beta, grid average of the bias-aware prediction
    std::vector<double> band_limit;                 // per beta, empty when theory_draws == 0
};

struct CoverageReport {
    SimConfig config;
    double lambda = 0.0;
    std::vector<double> grid;
    std::vector<double> truth_on_grid;

    std::vector<double> simultaneous;     // per beta
    std::vector<double> simultaneous_se;  // per beta
    std::vector<std::vector<double>> pointwise;  // [beta][grid point]
    std::vector<double> pointwise_mean;          // per beta, averaged over the grid

    std::vector<double> sup_error;                // per replicate
    std::vector<std::vector<double>> radius;      // [replicate][beta]
    std::optional<TheoryPrediction> theory;
};

/// x_i ~ Unif(0,1), y_i = f(x_i) + sigma xi_i.
Dataset generate_data(std::size_t n, double sigma, std::uint64_t seed, const std::function<double(double)>& truth);
/// Same with the coverage truth f*.
Dataset generate_data(std::size_t n, double sigma, std::uint64_t seed);

/// Sqrt(p (1 - p) / R).
double binomial_se(double p, std::size_t replicates);

/// Replicated simultaneous and pointwise coverage of f* with theory attached.
/// Replicate r draws its data and posterior samples from seeds derived from
/// (base_seed, r), so the report does not depend on `threads`.
/// Throws NumericalError (with the replicate index) if a fit fails.
CoverageReport run_replicates(const SimConfig& config, bool with_theory = true);

/// Runs task(i) for i in [0, count) over `threads` workers (0 = all cores).
/// The first exception thrown by any task is rethrown after all workers stop.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& task);

enum class RateTruth {
    Series,  // the coverage-experiment f*
    Holder,  // sum_j j^{-(alpha + 1.5)} sin(j) psi_j, a member of the Holder-alpha class
};

struct RateConfig {
    std::vector<std::size_t> ns{100, 200, 400, 800, 1600};
    double alpha = 1.2;
    SmoothnessClass smoothness_class = SmoothnessClass::Holder;
    RateTruth truth = RateTruth::Holder;
    std::size_t seeds = 20;
    double sigma = 0.1;
    std::size_t grid_size = 200;
    std::uint64_t base_seed = 20190101;
    std::size_t threads = 0;

    void validate() const;
};

struct RateRow {
    std::size_t n = 0;
    double h = 0.0;
    double lambda = 0.0;
    double median_error = 0.0;
    std::vector<double> errors;  // per seed
    RatesBundle rates;
};

struct RateReport {
    RateConfig config;
    double class_B = 0.0;
    std::vector<RateRow> rows;
    double slope = 0.0;
    double slope_ci_low = 0.0;
    double slope_ci_high = 0.0;
    double target_slope = 0.0;
};

/// Coefficients of the Holder test truth for smoothness alpha.
FunctionCoeffs holder_truth(double alpha, std::size_t terms = 2000);

/// Least-squares slope of log(median sup error) on log n, with a 95% t interval.
/// Throws std::invalid_argument with fewer than 4 distinct n.
RateReport rate_experiment(const RateConfig& config);

}  // namespace gpcover
