#include "gpcover/normal.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>

namespace gpcover {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_quantile(double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::domain_error("normal_quantile needs 0 < gamma < 1");
    static const boost::math::normal_distribution<double> standard;
    return boost::math::quantile(standard, gamma);
}

}  // namespace gpcover
