#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace gpcover::detail {

/// sum_{k=1}^{P} w[k-1] cos((k + shift) theta), by complex rotation with an
/// exact resync every 128 terms so the phase error stays near machine precision.
inline double cos_series(std::span<const double> w, double theta, double shift = 0.0) {
    constexpr std::size_t kResync = 128;
    const double step_c = std::cos(theta);
    const double step_s = std::sin(theta);
    double sum = 0.0;
    double c = 0.0;
    double s = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        if (k % kResync == 0) {
            const double angle = (static_cast<double>(k + 1) + shift) * theta;
            c = std::cos(angle);
            s = std::sin(angle);
        } else {
            const double nc = c * step_c - s * step_s;
            s = s * step_c + c * step_s;
            c = nc;
        }
        sum += w[k] * c;
    }
    return sum;
}

}  // namespace gpcover::detail
