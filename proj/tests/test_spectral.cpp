#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "gpcover/kernels.hpp"
#include "gpcover/normal.hpp"
#include "gpcover/spectral.hpp"
#include "oracles.hpp"

using namespace gpcover;

using oracle::bisect_quantile;
using oracle::power_integral;

TEST_CASE("nu spec examples") {
    const SpectralModel m1 = SpectralModel::make(1.0, 1.0, 1.0);
    CHECK(m1.nu(2) == doctest::Approx(0.5));
    const SpectralModel m2 = SpectralModel::make(1.0, 0.1, 1.0);
    CHECK(m2.nu(20) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(m2.nu(19) == m2.nu(20));
    CHECK_THROWS_AS((void)m2.nu(0), std::out_of_range);
    CHECK_THROWS_AS((void)m2.nu(m2.truncation() + 1), std::out_of_range);
}

TEST_CASE("model construction") {
    CHECK_THROWS_AS(SpectralModel::make(0.5, 0.1, 1.0), std::domain_error);
    CHECK_THROWS_AS(SpectralModel::make(1.0, 0.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(SpectralModel::make(1.0, 1.5, 1.0), std::domain_error);
    CHECK_THROWS_AS(SpectralModel::make(1.0, 0.5, -1.0), std::domain_error);
    CHECK(SpectralModel::default_truncation(0.1) == 2000);
    CHECK(SpectralModel::default_truncation(0.001) == 20000);
    CHECK(SpectralModel::make(2.0, 0.1, 1.0, 7).truncation() == 8);
    CHECK(SpectralModel::make(2.0, 0.1, 1.0).lambda() == doctest::Approx(1e-4));
}

TEST_CASE("nu_j lies in (0,1) and strictly decreases across pairs") {
    for (double a : {0.6, 1.0, 2.0, 3.0})
        for (double h : {0.2, 0.05}) {
            const SpectralModel m = SpectralModel::make(a, h, 1.0);
            const auto nu = m.pair_nu();
            for (std::size_t k = 0; k < nu.size(); ++k) {
                CHECK(nu[k] > 0.0);
                CHECK(nu[k] < 1.0);
                if (k > 0) CHECK(nu[k] < nu[k - 1]);
            }
        }
}

TEST_CASE("equivalent kernel") {
    const SpectralModel m = SpectralModel::make(2.0, 0.1, 1.0);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        const double s = u(rng);
        const double t = u(rng);
        CHECK(equivalent_kernel(m, s, s) > 0.0);
        CHECK(equivalent_kernel(m, s, t) == doctest::Approx(equivalent_kernel(m, t, s)).epsilon(1e-12));
        // brute force over the basis
        double brute = 0.0;
        for (std::size_t j = 1; j <= m.truncation(); ++j) brute += m.nu(j) * fourier_basis(j, s) * fourier_basis(j, t);
        CHECK(equivalent_kernel(m, s, t) == doctest::Approx(brute).epsilon(1e-6));
    }
    // Heavy regularization: K~ <= K / lambda term by term.
    const SpectralModel heavy = SpectralModel::make(3.0, 1.0, 1.0, 40);
    const KernelSpec k = KernelSpec::spectral(3.0, 40);
    for (double s : {0.0, 0.3, 0.8}) CHECK(equivalent_kernel(heavy, s, s) <= spectral_kernel_eval(k, s, s) / heavy.lambda());
    // diagonal scales like 1/h
    double lo = 1e300;
    double hi = 0.0;
    for (double h : {0.2, 0.1, 0.05}) {
        const double v = equivalent_kernel(SpectralModel::make(2.0, h, 1.0), 0.4, 0.4) * h;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    CHECK(hi / lo < 3.0);
}

TEST_CASE("equivalent kernel by quadrature") {
    const KernelSpec spec = KernelSpec::matern(1.5);
    const Kernel k(spec);
    const double lambda = 0.01;
    const std::size_t N = 200;
    std::vector<double> t(N + 1);
    for (std::size_t i = 0; i <= N; ++i) t[i] = static_cast<double>(i) / N;
    const Eigen::MatrixXd Kt = equivalent_kernel_matrix(spec, lambda, t);
    CHECK((Kt - Kt.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * Kt.cwiseAbs().maxCoeff());
    CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(Kt).eigenvalues().minCoeff() >= -1e-8 * Kt.norm());

    // int K(s,u) K~(u,x) du + lambda K~(s,x) = K(s,x), integral by Simpson on the t nodes
    double worst = 0.0;
    for (std::size_t a : {0u, 37u, 100u, 163u, 200u})
        for (std::size_t b : {0u, 50u, 121u, 200u}) {
            double integral = 0.0;
            for (std::size_t i = 0; i <= N; ++i) {
                const double w = (i == 0 || i == N) ? 1.0 : (i % 2 ? 4.0 : 2.0);
                integral += w * k(t[a], t[i]) * Kt(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(b));
            }
            integral /= 3.0 * N;
            const double lhs = integral + lambda * Kt(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
            worst = std::max(worst, std::abs(lhs - k(t[a], t[b])));
        }
    CHECK(worst <= 1e-4);

    // heavy regularization: K~ ~ K / lambda
    const std::vector<double> p{0.1, 0.5, 0.9};
    const Eigen::MatrixXd heavy = equivalent_kernel_matrix(spec, 1e4, p, 500);
    for (Eigen::Index i = 0; i < 3; ++i)
        for (Eigen::Index j = 0; j < 3; ++j) CHECK(heavy(i, j) * 1e4 == doctest::Approx(k(p[i], p[j])).epsilon(1e-3));

    CHECK_THROWS_AS((void)equivalent_kernel_matrix(spec, 0.0, p), std::invalid_argument);
    CHECK_THROWS_AS((void)equivalent_kernel_matrix(spec, 0.1, p, 1), std::invalid_argument);
}

TEST_CASE("F_lambda and P_lambda") {
    const SpectralModel m = SpectralModel::make(1.0, 1.0, 1.0, 10);
    FunctionCoeffs zero{std::vector<double>(6, 0.0)};
    for (double c : apply_F_lambda(m, zero).coeffs) CHECK(c == 0.0);
    for (double c : apply_P_lambda(m, zero).coeffs) CHECK(c == 0.0);

    // nu_1 = 1/(1 + 1) = 0.5 at alpha = 1, h = 1
    const FunctionCoeffs e1{{1.0, 0.0, 0.0}};
    const FunctionCoeffs f1 = apply_F_lambda(m, e1);
    CHECK(f1.coeffs[0] == doctest::Approx(0.5));
    CHECK(f1.coeffs[1] == 0.0);

    std::mt19937_64 rng(2);
    std::normal_distribution<double> z;
    FunctionCoeffs f;
    for (int j = 0; j < 10; ++j) f.coeffs.push_back(z(rng));
    const FunctionCoeffs F = apply_F_lambda(m, f);
    const FunctionCoeffs P = apply_P_lambda(m, f);
    for (std::size_t j = 0; j < 10; ++j) CHECK(F.coeffs[j] + P.coeffs[j] == doctest::Approx(f.coeffs[j]).epsilon(1e-12));

    const SpectralModel tiny = SpectralModel::make(2.0, 1e-4, 1.0, 100);
    for (std::size_t j = 0; j < 10; ++j) CHECK(std::abs(apply_P_lambda(tiny, f).coeffs[j]) <= 1e-10 * std::abs(f.coeffs[j]));

    FunctionCoeffs too_long{std::vector<double>(12, 1.0)};
    CHECK_THROWS_AS(apply_F_lambda(m, too_long), std::invalid_argument);
    CHECK_THROWS_AS(apply_P_lambda(m, too_long), std::invalid_argument);
}

TEST_CASE("class_norm") {
    CHECK(class_norm(FunctionCoeffs{{0.0, 0.0}}, 1.0, SmoothnessClass::Sobolev) == 0.0);
    CHECK(class_norm(FunctionCoeffs{{1.0}}, 2.0, SmoothnessClass::Sobolev) == doctest::Approx(1.0));
    FunctionCoeffs f;
    double harmonic = 0.0;
    for (int j = 1; j <= 100; ++j) {
        f.coeffs.push_back(1.0 / (j * j));
        harmonic += 1.0 / j;
    }
    CHECK(class_norm(f, 1.0, SmoothnessClass::Holder) == doctest::Approx(harmonic).epsilon(1e-12));
    CHECK(harmonic == doctest::Approx(5.187).epsilon(1e-3));
}

TEST_CASE("Holder bias bound scales like h^alpha") {
    // f_j = j^{-(alpha + 1.5)} is in the Holder-alpha class.
    const double alpha = 1.5;
    FunctionCoeffs f;
    for (int j = 1; j <= 2000; ++j) f.coeffs.push_back(std::pow(j, -(alpha + 1.5)));
    const double B = class_norm(f, alpha, SmoothnessClass::Holder);
    std::vector<double> lx, ly;
    for (double h : {0.2, 0.1, 0.05}) {
        const double bound = p_lambda_sup_bound(SpectralModel::make(alpha, h, 1.0), f);
        CHECK(bound <= 10.0 * std::pow(h, alpha) * B);
        lx.push_back(std::log(h));
        ly.push_back(std::log(bound));
    }
    const double slope = (ly[2] - ly[0]) / (lx[2] - lx[0]);
    CHECK(slope > alpha - 0.15);
}

TEST_CASE("c_hat_B and c_hat") {
    const SpectralModel m = SpectralModel::make(2.0, 0.05, 0.01);
    const double cb0 = c_hat_B(m, 0.0, 0.0);
    for (int i = 0; i <= 20; ++i) {
        const double x = i / 20.0;
        CHECK(c_hat_B(m, x, x) > c_hat(m, x, x));
        CHECK(c_hat_B(m, x, x) == doctest::Approx(cb0).epsilon(1e-12));
        CHECK(c_hat_B(m, x, 0.3) == doctest::Approx(c_hat_B(m, 0.3, x)).epsilon(1e-12));
    }

    // alpha = 1, h = 1: sigma^2 sum_k 2/(1 + k^2) = sigma^2 (pi coth pi - 1)
    const SpectralModel one = SpectralModel::make(1.0, 1.0, 0.5);
    const double pi = std::numbers::pi;
    CHECK(c_hat_B(one, 0.2, 0.2) == doctest::Approx(0.5 * (pi / std::tanh(pi) - 1.0)).epsilon(1e-9));

    // matrices agree with the pointwise functions
    const std::vector<double> grid{0.0, 0.25, 0.6, 1.0};
    const Eigen::MatrixXd MB = c_hat_B_matrix(m, grid);
    const Eigen::MatrixXd MC = c_hat_matrix(m, grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
        for (std::size_t j = 0; j < grid.size(); ++j) {
            const auto ii = static_cast<Eigen::Index>(i);
            const auto jj = static_cast<Eigen::Index>(j);
            CHECK(MB(ii, jj) == doctest::Approx(c_hat_B(m, grid[i], grid[j])).epsilon(1e-10));
            CHECK(MC(ii, jj) == doctest::Approx(c_hat(m, grid[i], grid[j])).epsilon(1e-10));
        }
}

TEST_CASE("tail correction matches a long direct sum") {
    // alpha close to 1/2 has a heavy tail beyond the default truncation.
    const SpectralModel m = SpectralModel::make(0.6, 0.1, 1.0);
    CHECK(m.relative_tail_bound() > 1e-4);
    double direct = 0.0;
    for (long k = static_cast<long>(m.truncation() / 2) + 1; k <= 20000000; ++k)
        direct += 2.0 / (1.0 + m.lambda() * std::pow(static_cast<double>(k), 1.2));
    // the rest beyond 2e7 by the integral
    const double rest = 2.0 * std::pow(2e7, -0.2) / (0.2 * m.lambda());
    CHECK(m.nu_tail() == doctest::Approx(direct + rest).epsilon(1e-3));
    CHECK(m.nu_tail() <= m.relative_tail_bound() * m.nu_sum() * (1.0 + 1e-9));
}

TEST_CASE("c_ir") {
    for (double a : {0.6, 1.0, 2.0, 3.0})
        for (double h : {0.5, 0.1, 0.01}) CHECK(c_ir(SpectralModel::make(a, h, 1.0)) > 1.0);

    for (double a : {2.0, 3.0}) {
        const double quad = power_integral(a, 1) / power_integral(a, 2);
        CHECK(c_ir_limit(a) == doctest::Approx(quad).epsilon(1e-6));
        CHECK(c_ir(SpectralModel::make(a, 1e-3, 1.0)) == doctest::Approx(quad).epsilon(1e-2));
    }
    CHECK(c_ir_limit(2.0) == doctest::Approx(4.0 / 3.0));
    CHECK(std::abs(c_ir(SpectralModel::make(3.0, 1e-3, 1.0)) - 1.2) < 1e-2);
    CHECK_THROWS_AS(c_ir_limit(0.5), std::domain_error);
}

TEST_CASE("sum of nu is of order 1/h") {
    for (double a : {1.0, 2.0, 3.0}) {
        std::vector<double> c;
        for (double h : {0.2, 0.1, 0.05, 0.025}) c.push_back(SpectralModel::make(a, h, 1.0).nu_sum() * h);
        const auto [lo, hi] = std::minmax_element(c.begin(), c.end());
        CHECK(*hi / *lo < 2.0);
    }
}

TEST_CASE("asymptotic pointwise coverage") {
    CHECK(std::abs(asymptotic_pointwise_coverage(2.0, 0.95) - 0.976) <= 1e-3);
    CHECK(std::abs(asymptotic_pointwise_coverage(3.0, 0.95) - 0.969) <= 1e-3);
    CHECK(asymptotic_pointwise_coverage(200.0, 0.9) == doctest::Approx(0.9).epsilon(1e-2));
    for (double a : {0.6, 1.0, 2.0, 3.0, 5.0})
        for (double b : {0.8, 0.9, 0.95}) {
            const double p = asymptotic_pointwise_coverage(a, b);
            CHECK(p > b);
            CHECK(p < 1.0);
            CHECK(asymptotic_pointwise_coverage_unsquared(a, b) >= p);
        }
    CHECK_THROWS_AS(asymptotic_pointwise_coverage(2.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(asymptotic_pointwise_coverage(0.4, 0.9), std::domain_error);
}

TEST_CASE("coverage prediction") {
    const SpectralModel m = SpectralModel::make(2.0, 0.05, 0.01);
    const FunctionCoeffs zero{std::vector<double>(10, 0.0)};
    const double z = bisect_quantile(0.975);
    const double expected = 2.0 * 0.5 * std::erfc(-std::sqrt(c_ir(m)) * z / std::numbers::sqrt2) - 1.0;
    for (std::size_t n : {10u, 1000u, 100000u})
        CHECK(coverage_prediction(m, 0.3, zero, n, 0.95) == doctest::Approx(expected).epsilon(1e-10));
    CHECK(coverage_prediction_from_bias(m, 0.3, 1e3, 1000, 0.95) < 1e-12);
    CHECK(coverage_from_terms(1.96, 0.0) == doctest::Approx(0.95).epsilon(1e-3));
}

TEST_CASE("rates") {
    const std::size_t n = 10000;
    const double a = 2.0;
    const SpectralModel m = SpectralModel::make(a, std::pow(n, -1.0 / (2 * a + 1)), 0.01);
    CHECK(rates(n, m, FunctionCoeffs{{0.0}}).gamma_n < 1.0);
    CHECK(rates(n, m, FunctionCoeffs{{0.0}}).bias_supnorm == 0.0);
    double prev = 1e300;
    for (std::size_t nn : {1000u, 10000u, 100000u}) {
        const double h = bandwidth_for_class(nn, a, 1.0, 0.1, SmoothnessClass::Holder);
        const double g = rates(nn, SpectralModel::make(a, h, 0.01), FunctionCoeffs{{0.0}}).gamma_n;
        CHECK(g < prev);
        prev = g;
    }
    CHECK_THROWS_AS(rates(1, m, FunctionCoeffs{{0.0}}), std::domain_error);
}

TEST_CASE("bandwidth_for_class") {
    const double a = 1.0;
    const double n = 500.0;
    const double expected_sob = std::pow(n / (0.01 * std::log(n)), -1.0 / (2.0 * 1.5));
    CHECK(bandwidth_for_class(500, 1.5, 1.0, 0.1, SmoothnessClass::Sobolev) == doctest::Approx(expected_sob));
    const double expected_hol = std::exp(-std::log(n / (0.01 * std::log(n))) / 4.0);
    CHECK(bandwidth_for_class(500, 1.5, 1.0, 0.1, SmoothnessClass::Holder) == doctest::Approx(expected_hol));
    // doubling B^2 n/(sigma^2 log n) by B -> sqrt2 B scales h by 2^{-1/(2a+1)}
    const double h1 = bandwidth_for_class(300, a, 1.0, 0.1, SmoothnessClass::Holder);
    const double h2 = bandwidth_for_class(300, a, std::numbers::sqrt2, 0.1, SmoothnessClass::Holder);
    CHECK(h2 / h1 == doctest::Approx(std::pow(2.0, -1.0 / 3.0)));
    CHECK_THROWS_AS(bandwidth_for_class(1, a, 1.0, 0.1, SmoothnessClass::Holder), std::domain_error);
}

TEST_CASE("normal quantile") {
    CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(normal_quantile(0.975) == doctest::Approx(bisect_quantile(0.975)).epsilon(1e-12));
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959964).epsilon(1e-6));
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(1e-6, 1.0 - 1e-6);
    for (int i = 0; i < 20; ++i) {
        const double g = u(rng);
        CHECK(normal_quantile(g) == doctest::Approx(-normal_quantile(1.0 - g)).epsilon(1e-9));
        CHECK(std::abs(normal_cdf(normal_quantile(g)) - g) < 1e-10);
    }
    CHECK_THROWS_AS(normal_quantile(0.0), std::domain_error);
    CHECK_THROWS_AS(normal_quantile(1.0), std::domain_error);
}
