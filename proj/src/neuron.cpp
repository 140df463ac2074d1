#include "gnconvert/neuron.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace gnc {

void IFConfig::validate() const {
    if (!(theta > 0.0) || !std::isfinite(theta)) {
        throw std::invalid_argument("IF threshold must be finite and > 0, got " + std::to_string(theta));
    }
}

GNConfig::GNConfig(double theta, int tau) : theta_(theta), tau_(tau) {
    if (!(theta > 0.0) || !std::isfinite(theta)) {
        throw std::invalid_argument("GN threshold must be finite and > 0, got " + std::to_string(theta));
    }
    if (tau < 1) {
        throw std::invalid_argument("GN member count tau must be >= 1, got " + std::to_string(tau));
    }
}

double GNConfig::member_threshold(int i) const {
    return gnc::member_threshold(theta_, tau_, i);
}

std::vector<double> GNConfig::member_thresholds() const {
    std::vector<double> out(static_cast<std::size_t>(tau_));
    for (int i = 1; i <= tau_; ++i) {
        out[static_cast<std::size_t>(i - 1)] = member_threshold(i);
    }
    return out;
}

IFStep if_step(IFState state, const IFConfig& cfg, double input_current) {
    const double p = state.v + input_current;
    // Heaviside(0) = 1: reaching the threshold exactly fires.
    const bool fire = p >= cfg.theta;
    IFStep r;
    r.out.count = fire ? 1 : 0;
    r.out.psp = fire ? cfg.theta : 0.0;
    r.state.v = fire ? p - cfg.theta : p;
    return r;
}

GNStep gn_step(GNState state, const GNConfig& cfg, double input_current) {
    const double theta = cfg.theta();
    const int tau = cfg.tau();
    const double p = state.v + input_current;

    double q = std::floor((p * tau) / theta);
    q = std::clamp(q, 0.0, static_cast<double>(tau));
    int k = static_cast<int>(q);
    if (k < tau && p >= member_threshold(theta, tau, k + 1)) {
        ++k;
    } else if (k > 0 && p < member_threshold(theta, tau, k)) {
        --k;
    }

    const double theta_gn = cfg.theta_gn();
    GNStep r;
    r.out.count = k;
    r.out.psp = static_cast<double>(k) * theta_gn;
    r.state.v = p - theta_gn * static_cast<double>(k);
    return r;
}

GNStep gn_step_memberloop(GNState state, const GNConfig& cfg, double input_current) {
    const double p = state.v + input_current;
    const double theta_gn = cfg.theta_gn();

    // Every member sees the same charged potential p before any reset.
    int count = 0;
    for (int i = 1; i <= cfg.tau(); ++i) {
        const double s_i = (p - cfg.member_threshold(i)) >= 0.0 ? 1.0 : 0.0;
        count += static_cast<int>(s_i);
    }
    // Lateral inhibition: each firing member pulls the shared potential down.
    double v = p;
    for (int j = 0; j < count; ++j) {
        v -= theta_gn;
    }

    GNStep r;
    r.out.count = count;
    r.out.psp = static_cast<double>(count) * theta_gn;
    r.state.v = v;
    return r;
}

namespace {

// Spike count of a soft-reset neuron with per-spike threshold `unit` that may
// emit up to `max_per_step` spikes per step, under constant input x for T
// steps. Once the potential is in [0, unit) it stays there for inputs in
// [0, max_per_step*unit], so v(T) = v0 + T*x - n*unit pins n. Larger inputs
// saturate every step, which holds only if the neuron starts at v0 >= 0.
double constant_input_rate(double x, double unit, int max_per_step, int T, double v0) {
    if (T < 1) {
        throw std::invalid_argument("T must be >= 1, got " + std::to_string(T));
    }
    if (!(v0 < unit)) {
        throw std::invalid_argument("closed-form rate needs v0 below the per-spike threshold");
    }
    if (v0 < 0.0 && x > max_per_step * unit) {
        throw std::invalid_argument("closed-form rate undefined for v0 < 0 with saturating input");
    }
    const double total = static_cast<double>(T) * static_cast<double>(max_per_step);
    double n = std::floor((v0 + static_cast<double>(T) * x) / unit);
    n = std::clamp(n, 0.0, total);
    return (n * unit) / static_cast<double>(T);
}

}  // namespace

double closed_form_if_rate(double x, double theta, int T, double v0) {
    IFConfig{theta}.validate();
    return constant_input_rate(x, theta, 1, T, v0);
}

double closed_form_gn_rate(double x, double theta, int tau, int T, double v0) {
    const GNConfig cfg(theta, tau);
    return constant_input_rate(x, cfg.theta_gn(), tau, T, v0);
}

}  // namespace gnc
