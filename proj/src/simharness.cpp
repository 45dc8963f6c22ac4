#include "gpcover/simharness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

#include "gpcover/credible.hpp"
#include "gpcover/kernels.hpp"
#include "gpcover/normal.hpp"
#include "gpcover/random.hpp"
#include "gpcover/true_function.hpp"

namespace gpcover {

namespace {

// Seed streams within one replicate.
constexpr std::uint64_t kDataStream = 0;
constexpr std::uint64_t kBandStream = 1;
constexpr std::uint64_t kTheoryIndex = ~std::uint64_t{0};

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

struct ReplicateResult {
    double sup_error = 0.0;
    std::vector<double> radii;
    std::vector<std::vector<std::uint8_t>> pointwise_hit;  // [beta][grid]
};

TheoryPrediction predict(const SimConfig& config, double lambda, std::span<const double> grid) {
    TheoryPrediction t;
    t.alpha = config.alpha();
    t.c_ir_limit = c_ir_limit(t.alpha);
    for (double b : config.betas) {
        t.pointwise_limit.push_back(asymptotic_pointwise_coverage(t.alpha, b));
        t.pointwise_limit_unsquared.push_back(asymptotic_pointwise_coverage_unsquared(t.alpha, b));
    }
    t.h = std::pow(lambda / matern_eigen_constant(config.kernel_nu), 1.0 / (2.0 * t.alpha));
    if (!(t.h > 0.0 && t.h <= 1.0)) return t;

    const double sigma2 = config.sigma * config.sigma;
    const SpectralModel model = SpectralModel::make(t.alpha, t.h, sigma2);
    t.c_ir_finite = c_ir(model);
    t.spectral_tail_bound = model.relative_tail_bound();
    if (sigma2 > 0.0) {
        const std::vector<double> bias = population_bias(model, TrueFunction::shared(), grid);
        for (double b : config.betas) {
            double acc = 0.0;
            for (std::size_t i = 0; i < grid.size(); ++i)
                acc += coverage_prediction_from_bias(model, grid[i], bias[i], config.n, b);
            t.pointwise_finite_mean.push_back(acc / static_cast<double>(grid.size()));
        }
        if (config.theory_draws > 0) {
            for (std::size_t k = 0; k < config.betas.size(); ++k)
                t.band_limit.push_back(band_coverage_limit(model, grid, config.betas[k], config.theory_draws,
                                                           derive_seed(config.base_seed, kTheoryIndex, k)));
        }
    }
    return t;
}

}  // namespace

double LambdaChoice::resolve(std::size_t n, double alpha, double sigma) const {
    const double nn = static_cast<double>(n);
    switch (rule) {
        case LambdaRule::Rate: return std::pow(nn, -2.0 * alpha / (2.0 * alpha + 1.0));
        case LambdaRule::Power: return scale * std::pow(nn, -exponent);
        case LambdaRule::Explicit: return value;
        case LambdaRule::Class:
            return std::pow(bandwidth_for_class(n, alpha, class_B, sigma, smoothness_class), 2.0 * alpha);
        case LambdaRule::Matched:
            return scale * matern_eigen_constant(alpha - 0.5) * std::pow(nn, -2.0 * alpha / (2.0 * alpha + 1.0));
    }
    throw std::logic_error("unhandled lambda rule");
}

std::string to_string(LambdaRule rule) {
    switch (rule) {
        case LambdaRule::Rate: return "rate";
        case LambdaRule::Power: return "power";
        case LambdaRule::Explicit: return "explicit";
        case LambdaRule::Class: return "class";
        case LambdaRule::Matched: return "matched";
    }
    return "?";
}

LambdaRule lambda_rule_from_string(const std::string& name) {
    if (name == "rate") return LambdaRule::Rate;
    if (name == "power") return LambdaRule::Power;
    if (name == "explicit") return LambdaRule::Explicit;
    if (name == "class") return LambdaRule::Class;
    if (name == "matched") return LambdaRule::Matched;
    throw std::invalid_argument("unknown lambda rule '" + name +
                                "' (expected rate, power, explicit, class or matched)");
}

void SimConfig::validate() const {
    if (n < 1) throw std::invalid_argument("n must be at least 1");
    if (replicates < 1) throw std::invalid_argument("replicates must be at least 1");
    if (grid_size < 2) throw std::invalid_argument("grid size must be at least 2");
    if (draws < 100) throw std::invalid_argument("draws must be at least 100");
    if (!(sigma >= 0.0)) throw std::invalid_argument("sigma must be nonnegative");
    if (betas.empty()) throw std::invalid_argument("at least one credible level is required");
    for (double b : betas)
        if (!(b > 0.0 && b < 1.0)) throw std::invalid_argument("credible levels must lie in (0,1)");
    KernelSpec::matern(kernel_nu);
    if (lambda.rule == LambdaRule::Explicit && !(lambda.value > 0.0))
        throw std::invalid_argument("explicit lambda must be positive");
    if ((lambda.rule == LambdaRule::Power || lambda.rule == LambdaRule::Matched) && !(lambda.scale > 0.0))
        throw std::invalid_argument("lambda scale must be positive");
    if (theory_draws != 0 && theory_draws < 1000) throw std::invalid_argument("theory draws must be 0 or >= 1000");
}

Dataset generate_data(std::size_t n, double sigma, std::uint64_t seed, const std::function<double(double)>& truth) {
    Rng rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> normal;
    Dataset d;
    d.x.resize(n);
    d.y.resize(n);
    for (auto& x : d.x) x = unif(rng);
    for (std::size_t i = 0; i < n; ++i) {
        const double noise = normal(rng);
        d.y[i] = truth(d.x[i]) + sigma * noise;
    }
    return d;
}

Dataset generate_data(std::size_t n, double sigma, std::uint64_t seed) {
    const TrueFunction& f = TrueFunction::shared();
    return generate_data(n, sigma, seed, [&f](double x) { return f(x); });
}

double binomial_se(double p, std::size_t replicates) {
    return std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(replicates));
}

void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& task) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, std::max<std::size_t>(count, 1));

    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    std::size_t error_index = count;
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                task(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                // Report the lowest failing index so the error does not depend on scheduling.
                if (i < error_index) {
                    error_index = i;
                    error = std::current_exception();
                }
            }
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (error) std::rethrow_exception(error);
}

CoverageReport run_replicates(const SimConfig& config, bool with_theory) {
    config.validate();
    CoverageReport report;
    report.config = config;
    report.grid = equispaced_grid(config.grid_size);
    report.truth_on_grid = TrueFunction::shared()(report.grid);
    report.lambda = config.lambda.resolve(config.n, config.alpha(), config.sigma);
    if (!(report.lambda > 0.0)) throw std::invalid_argument("resolved lambda must be positive");

    const KernelSpec kernel = KernelSpec::matern(config.kernel_nu);
    const double sigma2 = config.sigma * config.sigma;
    const double fit_sigma2 = std::max(sigma2, kMinNoiseVariance);
    const std::size_t nb = config.betas.size();
    const std::size_t m = report.grid.size();
    std::vector<double> z(nb);
    for (std::size_t k = 0; k < nb; ++k) z[k] = normal_quantile(0.5 * (1.0 + config.betas[k]));

    std::vector<ReplicateResult> results(config.replicates);
    parallel_for(config.replicates, config.threads, [&](std::size_t r) {
        try {
            const Dataset data = generate_data(config.n, config.sigma, derive_seed(config.base_seed, r, kDataStream));
            const PosteriorGP post = fit(data, kernel, report.lambda, fit_sigma2);
            const GridPosterior gp = grid_posterior(post, report.grid);

            ReplicateResult& out = results[r];
            double sup = 0.0;
            for (std::size_t i = 0; i < m; ++i)
                sup = std::max(sup, std::abs(gp.mean(static_cast<Eigen::Index>(i)) - report.truth_on_grid[i]));
            out.sup_error = sup;
            out.radii = simultaneous_radii(gp, config.betas, config.draws,
                                           derive_seed(config.base_seed, r, kBandStream));
            out.pointwise_hit.assign(nb, std::vector<std::uint8_t>(m, 0));
            for (std::size_t i = 0; i < m; ++i) {
                const auto ii = static_cast<Eigen::Index>(i);
                const double sd = std::sqrt(std::max(gp.cov(ii, ii) - gp.jitter, 0.0));
                const double dev = std::abs(gp.mean(ii) - report.truth_on_grid[i]);
                for (std::size_t k = 0; k < nb; ++k) out.pointwise_hit[k][i] = dev <= z[k] * sd;
            }
        } catch (const NumericalError& e) {
            throw NumericalError("replicate " + std::to_string(r) + ": " + e.what());
        }
    });

    const double R = static_cast<double>(config.replicates);
    report.simultaneous.assign(nb, 0.0);
    report.pointwise.assign(nb, std::vector<double>(m, 0.0));
    for (const ReplicateResult& res : results) {
        report.sup_error.push_back(res.sup_error);
        report.radius.push_back(res.radii);
        for (std::size_t k = 0; k < nb; ++k) {
            if (res.sup_error <= res.radii[k]) report.simultaneous[k] += 1.0;
            for (std::size_t i = 0; i < m; ++i) report.pointwise[k][i] += res.pointwise_hit[k][i];
        }
    }
    for (std::size_t k = 0; k < nb; ++k) {
        report.simultaneous[k] /= R;
        report.simultaneous_se.push_back(binomial_se(report.simultaneous[k], config.replicates));
        for (double& p : report.pointwise[k]) p /= R;
        report.pointwise_mean.push_back(std::accumulate(report.pointwise[k].begin(), report.pointwise[k].end(), 0.0) /
                                        static_cast<double>(m));
    }
    if (with_theory) report.theory = predict(config, report.lambda, report.grid);
    return report;
}

void RateConfig::validate() const {
    std::vector<std::size_t> distinct(ns);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 4) throw std::invalid_argument("rate experiment needs at least 4 distinct n");
    if (distinct.front() < 2) throw std::invalid_argument("rate experiment needs n >= 2");
    if (seeds < 1) throw std::invalid_argument("rate experiment needs at least one seed");
    if (!(sigma > 0.0)) throw std::invalid_argument("rate experiment needs sigma > 0");
    if (grid_size < 2) throw std::invalid_argument("grid size must be at least 2");
    KernelSpec::matern(alpha - 0.5);
}

FunctionCoeffs holder_truth(double alpha, std::size_t terms) {
    FunctionCoeffs f;
    f.coeffs.resize(terms);
    for (std::size_t j = 1; j <= terms; ++j) {
        const double jj = static_cast<double>(j);
        f.coeffs[j - 1] = std::pow(jj, -(alpha + 1.5)) * std::sin(jj);
    }
    return f;
}

RateReport rate_experiment(const RateConfig& config) {
    config.validate();
    RateReport report;
    report.config = config;

    const std::vector<double> grid = equispaced_grid(config.grid_size);
    const FunctionCoeffs holder = holder_truth(config.alpha);
    const TrueFunction& series = TrueFunction::shared();
    std::function<double(double)> truth;
    FunctionCoeffs truth_coeffs;
    if (config.truth == RateTruth::Holder) {
        truth = [&holder](double x) { return holder.evaluate(x); };
        truth_coeffs = holder;
        report.class_B = class_norm(holder, config.alpha, config.smoothness_class);
    } else {
        truth = [&series](double x) { return series(x); };
        report.class_B = 1.0;
    }
    std::vector<double> truth_grid(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) truth_grid[i] = truth(grid[i]);

    const KernelSpec kernel = KernelSpec::matern(config.alpha - 0.5);
    const double sigma2 = config.sigma * config.sigma;
    report.target_slope = config.smoothness_class == SmoothnessClass::Holder
                              ? -config.alpha / (2.0 * config.alpha + 1.0)
                              : -(config.alpha - 0.5) / (2.0 * config.alpha);

    for (std::size_t n : config.ns) {
        RateRow row;
        row.n = n;
        row.h = bandwidth_for_class(n, config.alpha, report.class_B, config.sigma, config.smoothness_class);
        row.lambda = std::pow(row.h, 2.0 * config.alpha);
        row.errors.assign(config.seeds, 0.0);
        parallel_for(config.seeds, config.threads, [&](std::size_t s) {
            const Dataset data = generate_data(n, config.sigma, derive_seed(config.base_seed, n, s), truth);
            const PosteriorGP post = fit(data, kernel, row.lambda, sigma2);
            const Eigen::VectorXd mean = post.mean_on(grid);
            double sup = 0.0;
            for (std::size_t i = 0; i < grid.size(); ++i)
                sup = std::max(sup, std::abs(mean(static_cast<Eigen::Index>(i)) - truth_grid[i]));
            row.errors[s] = sup;
        });
        row.median_error = median(row.errors);
        const SpectralModel model = SpectralModel::make(config.alpha, std::min(row.h, 1.0), sigma2);
        FunctionCoeffs f = truth_coeffs;
        if (f.size() > model.truncation()) f.coeffs.resize(model.truncation());
        row.rates = rates(n, model, f);
        report.rows.push_back(std::move(row));
    }

    const std::size_t k = report.rows.size();
    double mx = 0.0;
    double my = 0.0;
    for (const RateRow& row : report.rows) {
        mx += std::log(static_cast<double>(row.n));
        my += std::log(row.median_error);
    }
    mx /= static_cast<double>(k);
    my /= static_cast<double>(k);
    double sxx = 0.0;
    double sxy = 0.0;
    for (const RateRow& row : report.rows) {
        const double dx = std::log(static_cast<double>(row.n)) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(row.median_error) - my);
    }
    report.slope = sxy / sxx;
    double rss = 0.0;
    for (const RateRow& row : report.rows) {
        const double fitted = my + report.slope * (std::log(static_cast<double>(row.n)) - mx);
        rss += std::pow(std::log(row.median_error) - fitted, 2);
    }
    const double dof = static_cast<double>(k) - 2.0;
    const double se = std::sqrt(rss / dof / sxx);
    const double t = boost::math::quantile(boost::math::students_t_distribution<double>(dof), 0.975);
    report.slope_ci_low = report.slope - t * se;
    report.slope_ci_high = report.slope + t * se;
    return report;
}

}  // namespace gpcover
