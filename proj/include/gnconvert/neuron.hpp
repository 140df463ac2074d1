#pragma once

// Integrate-and-fire (IF) and Group Neuron (GN) dynamics with soft reset.
//
// An IF neuron integrates input into v, fires one spike when the charged
// potential reaches theta, and subtracts theta on firing. A GN is tau IF
// members sharing one membrane potential; member i fires when the potential
// reaches i*theta/tau, and every member spike subtracts theta/tau from the
// shared potential (lateral inhibition). The GN emits the number of firing
// members, each worth theta/tau downstream.

#include <cstdint>
#include <vector>

namespace gnc {

struct IFConfig {
    double theta = 1.0;

    void validate() const;
};

struct IFState {
    double v = 0.0;
};

class GNConfig {
public:
    GNConfig(double theta, int tau);

    double theta() const { return theta_; }
    int tau() const { return tau_; }
    // Per-spike weight and lowest member threshold, theta / tau.
    double theta_gn() const { return theta_ / tau_; }
    // Threshold of member i in 1..tau.
    double member_threshold(int i) const;
    std::vector<double> member_thresholds() const;

private:
    double theta_;
    int tau_;
};

struct GNState {
    double v = 0.0;
};

struct SpikeOut {
    int count = 0;
    double psp = 0.0;
};

/// Threshold of member `i` of a `tau`-member group with top threshold `theta`.
/// Computed as i*theta/tau rather than by repeated addition; the top member
/// is pinned to `theta` itself so that p >= theta always fires every member.
inline double member_threshold(double theta, int tau, int i) {
    return i == tau ? theta : (static_cast<double>(i) * theta) / static_cast<double>(tau);
}

struct IFStep {
    SpikeOut out;
    IFState state;
};

struct GNStep {
    SpikeOut out;
    GNState state;
};

IFStep if_step(IFState state, const IFConfig& cfg, double input_current);

/// Closed-form GN update: the spike count is floor(p*tau/theta) clamped to
/// [0, tau], then nudged by one against the member thresholds so it agrees
/// exactly with the member loop when rounding lands next to a threshold.
GNStep gn_step(GNState state, const GNConfig& cfg, double input_current);

/// Literal member-by-member evaluation: each member compares the shared
/// potential with its own threshold, then each firing member inhibits the
/// group by theta/tau. Kept as the reference for gn_step.
GNStep gn_step_memberloop(GNState state, const GNConfig& cfg, double input_current);

// Constant-input rate oracles. Both return the average postsynaptic
// potential (sum of psp over T steps) / T. They require v0 below the
// per-spike threshold (theta for IF, theta/tau for GN), and v0 >= 0 when the
// input exceeds the per-step maximum theta; outside that region the
// potential is not confined to one spike interval and std::invalid_argument
// is thrown.
double closed_form_if_rate(double x, double theta, int T, double v0);
double closed_form_gn_rate(double x, double theta, int tau, int T, double v0);

}  // namespace gnc
