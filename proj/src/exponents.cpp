#include "netdetect/exponents.hpp"

#include "netdetect/errors.hpp"
#include "netdetect/learning.hpp"
#include "numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace netdetect {

namespace {

void require_bounded_llr(const LlrBounds& bounds) {
    if (!bounds.all_finite()) {
        throw AssumptionViolated("log-likelihood ratio is unbounded (bounded-LLR assumption fails)");
    }
}

double mixing_ratio(double rho) { return rho / (1.0 - rho); }

double inverse_pi_sum(std::span<const double> pi, std::span<const double> values) {
    double acc = 0.0;
    for (std::size_t j = 0; j < pi.size(); ++j) acc += values[j] * values[j] / pi[j];
    return acc;
}

}  // namespace

double general_exponent_objective(const NetworkModel& model, std::span<const double> pi,
                                  std::span<const double> r, double lambda) {
    double acc = 0.0;
    for (std::size_t j = 0; j < model.size(); ++j) {
        const double s = lambda * pi[j] * r[j];
        const auto& p0 = model.node(j, 0);
        const auto& p1 = model.node(j, 1);
        acc += s * kl(p0, p1) - log_affinity(p0, p1, s);
    }
    return acc;
}

GeneralExponent exponent_general(const NetworkModel& model, const Network& net, std::span<const double> r) {
    model.require_binary();
    net.require_ergodic();
    const std::size_t n = net.size();
    if (model.size() != n) throw InvalidArgument("model and network sizes differ");
    validate_geometric_weights(r, n);
    const auto& pi = net.profile.pi;

    double total_kl = 0.0;
    for (std::size_t j = 0; j < n; ++j) total_kl += kl(model, j, 0, 1);
    if (total_kl == 0.0) return {0.0, 0.0};

    auto f = [&](double lambda) { return general_exponent_objective(model, pi, r, lambda); };
    double max_weight = 0.0;
    for (std::size_t j = 0; j < n; ++j) max_weight = std::max(max_weight, pi[j] * r[j]);
    double hi = 1.0 / max_weight;
    for (int k = 0; k < 1100 && f(2.0 * hi) > f(hi); ++k) hi *= 2.0;
    const auto best = detail::maximize_unimodal(f, 0.0, 2.0 * hi);
    return {best.value, best.argmax};
}

double exponent_optimal(const NetworkModel& model) {
    model.require_binary();
    double acc = 0.0;
    for (std::size_t j = 0; j < model.size(); ++j) acc += kl(model, j, 0, 1);
    return acc;
}

ChernoffResult exponent_bayes(const NetworkModel& model) { return chernoff_information(model); }

double cnp_constant(const NetworkModel& model, const Network& net, std::size_t i, DeviationFactor factor) {
    model.require_binary();
    net.require_reversible();
    if (i >= net.size()) throw InvalidArgument("node index out of range");
    const auto bounds = llr_bounds(model);
    require_bounded_llr(bounds);
    const auto& pi = net.profile.pi;
    Vector divergences(model.size());
    for (std::size_t j = 0; j < model.size(); ++j) divergences[j] = kl(model, j, 0, 1);
    const double spread = std::sqrt(inverse_pi_sum(pi, divergences)) + std::sqrt(inverse_pi_sum(pi, bounds.bound));
    if (net.profile.rho == 0.0) return 0.0;
    return mixing_ratio(net.profile.rho) * std::sqrt(deviation_factor(pi[i], factor)) * spread;
}

double cb_constant(const NetworkModel& model, const Network& net, std::size_t i, DeviationFactor factor) {
    model.require_binary();
    net.require_reversible();
    if (i >= net.size()) throw InvalidArgument("node index out of range");
    const auto bounds = llr_bounds(model);
    require_bounded_llr(bounds);
    if (net.profile.rho == 0.0) return 0.0;
    const double theta = chernoff_information(model).theta_star;
    const auto& pi = net.profile.pi;
    return std::max(theta, 1.0 - theta) * mixing_ratio(net.profile.rho) *
           std::sqrt(deviation_factor(pi[i], factor) * inverse_pi_sum(pi, bounds.bound));
}

double delay(const NetworkModel& model, const Network& net, std::size_t i, DeviationFactor factor) {
    const double total = exponent_optimal(model);
    if (!(total > 0.0)) throw InvalidArgument("hypotheses are indistinguishable (zero total divergence)");
    return cnp_constant(model, net, i, factor) / total;
}

double gaussian_bound_constant(const NetworkModel& model, const Network& net, std::size_t i,
                               DeviationFactor factor) {
    if (!model.is_symmetric_gaussian()) throw InvalidArgument("gaussian constant requires a symmetric gaussian model");
    if (net.size() < 2) throw InvalidArgument("gaussian constant is undefined for a single node");
    net.require_reversible();
    if (i >= net.size()) throw InvalidArgument("node index out of range");
    const double rho = net.profile.rho;
    if (rho == 0.0) return 0.0;
    const double mu = model.node(0, 1).mean();
    const double sigma = std::sqrt(model.node(0, 1).variance());
    double inverse_mass = 0.0;
    for (double p : net.profile.pi) inverse_mass += 1.0 / p;
    return (2.0 * mu / sigma) * (rho * rho / (1.0 - rho * rho)) * deviation_factor(net.profile.pi[i], factor) *
           inverse_mass;
}

double periodic_exponent(const NetworkModel& model, std::size_t period) {
    if (period < 1) throw InvalidArgument("period must be at least 1");
    return exponent_optimal(model) / static_cast<double>(period);
}

LlrMoments llr_moments(const NetworkModel& model) {
    model.require_binary();
    LlrMoments m{0.0, 0.0, 0.0};
    for (std::size_t j = 0; j < model.size(); ++j) {
        const auto& p0 = model.node(j, 0);
        const auto& p1 = model.node(j, 1);
        if (!p0.is_discrete()) {
            if (p0.variance() != p1.variance()) {
                throw InvalidArgument("moments are implemented for equal-variance gaussians only");
            }
            const double shift = p1.mean() - p0.mean();
            m.mean -= 0.5 * shift * shift / p0.variance();
            m.variance += shift * shift / p0.variance();
            continue;
        }
        double mean = 0.0;
        for (std::size_t k = 0; k < p0.probs().size(); ++k)
            mean += p0.probs()[k] * std::log(p1.probs()[k] / p0.probs()[k]);
        double second = 0.0, third = 0.0;
        for (std::size_t k = 0; k < p0.probs().size(); ++k) {
            const double d = std::log(p1.probs()[k] / p0.probs()[k]) - mean;
            second += p0.probs()[k] * d * d;
            third += p0.probs()[k] * d * d * d;
        }
        m.mean += mean;
        m.variance += second;
        m.third += third;
    }
    return m;
}

double strassen_centralized_log_beta(const NetworkModel& model, std::size_t t, double epsilon) {
    if (t < 1) throw InvalidArgument("horizon must be at least 1");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidArgument("epsilon must lie in (0,1)");
    const auto m = llr_moments(model);
    if (!(m.variance > 0.0)) throw InvalidArgument("log-likelihood ratio is degenerate");
    const double s = std::sqrt(m.variance);
    const double lambda = detail::normal_tail_quantile(epsilon);
    const double phi = m.third * (1.0 - lambda * lambda) / (6.0 * m.variance);
    const double tt = static_cast<double>(t);
    return m.mean * tt + lambda * s * std::sqrt(tt) - 0.5 * std::log(tt) - 0.5 * std::log(2.0 * std::numbers::pi) -
           std::log(s) - phi - 0.5 * lambda * lambda;
}

double strassen_centralized_beta(const NetworkModel& model, std::size_t t, double epsilon) {
    return std::exp(strassen_centralized_log_beta(model, t, epsilon));
}

ExponentFit empirical_exponent(std::span<const double> times, std::span<const double> probabilities,
                               std::size_t window, std::size_t trials, double min_count) {
    if (times.size() != probabilities.size()) throw InvalidArgument("times and probabilities differ in length");
    std::vector<std::size_t> usable;
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double p = probabilities[k];
        if (!(p > 0.0)) continue;
        if (trials > 0 && p * static_cast<double>(trials) < min_count) continue;
        usable.push_back(k);
    }
    if (window < usable.size()) usable.erase(usable.begin(), usable.end() - static_cast<std::ptrdiff_t>(window));
    if (usable.size() < 3) {
        throw InvalidArgument("exponent fit needs at least 3 usable points, got " + std::to_string(usable.size()));
    }

    const double k = static_cast<double>(usable.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t idx : usable) {
        mx += times[idx];
        my += -std::log(probabilities[idx]);
    }
    mx /= k;
    my /= k;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t idx : usable) {
        const double dx = times[idx] - mx;
        const double dy = -std::log(probabilities[idx]) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (!(sxx > 0.0)) throw InvalidArgument("exponent fit needs distinct times");
    ExponentFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    const double sse = std::max(syy - fit.slope * sxy, 0.0);
    fit.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
    fit.slope_stderr = k > 2.0 ? std::sqrt(sse / (k - 2.0) / sxx) : 0.0;
    fit.points = usable.size();
    return fit;
}

ExponentReport exponent_report(const NetworkModel& model, const Network& net, std::span<const double> r,
                               DeviationFactor factor) {
    model.require_binary();
    ExponentReport rep;
    rep.optimal = exponent_optimal(model);
    const auto ch = exponent_bayes(model);
    rep.bayes = ch.value;
    rep.theta_star = ch.theta_star;
    rep.period = net.profile.period;
    rep.factor = factor;
    if (net.profile.irreducible && net.profile.aperiodic) {
        const auto g = exponent_general(model, net, r);
        rep.general = g.value;
        rep.lambda_star = g.lambda_star;
    }
    if (net.profile.irreducible && net.profile.period > 1) rep.periodic = periodic_exponent(model, net.profile.period);

    auto attempt = [](auto&& fn) -> std::optional<double> {
        try {
            return fn();
        } catch (const Error&) {
            return std::nullopt;
        }
    };
    for (std::size_t i = 0; i < net.size(); ++i) {
        rep.cnp.push_back(attempt([&] { return cnp_constant(model, net, i, factor); }));
        rep.cb.push_back(attempt([&] { return cb_constant(model, net, i, factor); }));
        rep.delay.push_back(attempt([&] { return delay(model, net, i, factor); }));
        rep.gaussian_bound.push_back(attempt([&] { return gaussian_bound_constant(model, net, i, factor); }));
    }
    return rep;
}

}  // namespace netdetect
