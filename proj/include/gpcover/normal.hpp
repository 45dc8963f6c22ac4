#pragma once

namespace gpcover {

/// Standard normal CDF.
double normal_cdf(double z);

/// z_gamma with Phi(z_gamma) = gamma. Throws std::domain_error unless 0 < gamma < 1.
double normal_quantile(double gamma);

}  // namespace gpcover
