#pragma once

// Private numeric helpers shared by the analytic modules.

#include <boost/math/distributions/normal.hpp>
#include <boost/math/tools/minima.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <utility>

namespace netdetect::detail {

struct Maximum {
    double argmax;
    double value;
};

// Brent's derivative-free search; f must be unimodal on [lo, hi].
template <class F>
Maximum maximize_unimodal(F&& f, double lo, double hi) {
    std::uintmax_t iterations = 500;
    auto neg = [&](double x) { return -f(x); };
    const auto [x, v] = boost::math::tools::brent_find_minima(neg, lo, hi, std::numeric_limits<double>::digits / 2,
                                                              iterations);
    Maximum best{x, -v};
    // Brent never probes the interval ends exactly.
    for (double edge : {lo, hi}) {
        const double fe = f(edge);
        if (fe > best.value) best = {edge, fe};
    }
    return best;
}

/// Q(z) = P(N(0,1) > z).
inline double normal_tail(double z) {
    return boost::math::cdf(boost::math::complement(boost::math::normal_distribution<double>(), z));
}

/// log Q(z), accurate far into the tail where Q underflows.
inline double log_normal_tail(double z) {
    if (z < 30.0) return std::log(normal_tail(z));
    const double z2 = z * z;
    const double series = 1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2);
    return -0.5 * z2 - std::log(z) - 0.5 * std::log(2.0 * std::numbers::pi) + std::log(series);
}

/// Q^{-1}(p).
inline double normal_tail_quantile(double p) {
    return boost::math::quantile(boost::math::complement(boost::math::normal_distribution<double>(), p));
}

}  // namespace netdetect::detail
