#pragma once

#include <optional>
#include <span>
#include <vector>

#include "gnconvert/dataset.hpp"
#include "gnconvert/model.hpp"
#include "gnconvert/network.hpp"
#include "gnconvert/report.hpp"

namespace gnc {

// ---------------------------------------------------------------------------
// Firing-rate staircases of a single neuron under constant input
// ---------------------------------------------------------------------------

struct CurvePoint {
    double x = 0.0;
    double rate = 0.0;
};

/// `uniform_points` evenly spaced inputs on [lo, hi], merged with every input
/// at which the constant-input spike count steps up, (k*unit - v0)/T for
/// k = 1..members*T with unit = theta/members. Sorted, duplicates removed.
std::vector<double> curve_grid(NeuronKind kind, double theta, int tau, int T, V0Policy v0, double lo, double hi,
                               std::size_t uniform_points = 2048);

/// Average postsynaptic potential after T steps of step-by-step simulation,
/// one point per grid input. `tau` is ignored for IF.
std::vector<CurvePoint> firing_rate_curve(NeuronKind kind, double theta, int tau, int T, V0Policy v0,
                                          std::span<const double> x_grid);

/// Inputs at which the rate is higher than at the previous grid point.
std::vector<double> riser_positions(std::span<const CurvePoint> curve);

/// Distances between consecutive risers.
std::vector<double> step_widths(std::span<const double> risers);

// ---------------------------------------------------------------------------
// Dataset-level evaluation
// ---------------------------------------------------------------------------

/// Per T, the mean over samples and outputs of (ann logit - snn logit)^2.
/// Each sample is simulated once for max(T_list) steps; shorter horizons read
/// the same run's prefix, which is identical to a separate shorter run.
/// `sim.T` is ignored.
EvalReport conversion_mse(const ModelSpec& ann, const ModelSpec& snn, const Dataset& data, std::span<const int> T_list,
                          const SimConfig& sim);

/// As above with the neuron kind taken from the SNN's tags.
EvalReport conversion_mse(const ModelSpec& ann, const ModelSpec& snn, const Dataset& data, std::span<const int> T_list,
                          V0Policy v0 = V0Policy::half_threshold);

/// Fraction of samples whose argmax matches the label. ANN semantics when
/// `sim` is empty.
double accuracy_eval(const ModelSpec& model, const Dataset& data, const std::optional<SimConfig>& sim);

/// accuracy_eval for every T in T_list from one simulation of max(T_list) steps per sample.
std::vector<double> snn_accuracy_over_T(const ModelSpec& model, const Dataset& data, const SimConfig& sim,
                                        std::span<const int> T_list);

struct LayerAudit {
    std::size_t layer = 0;
    // max |phi^l - (W^l phi^{l-1} + b^l - (v^l(T) - v^l(0))/T)| over neurons
    double residual_max = 0.0;
    // |v^l(T) - v^l(0)| / T over neurons
    double mapping_error_mean = 0.0;
    double mapping_error_max = 0.0;
};

/// Checks the rate-balance identity of every spiking layer on one run.
std::vector<LayerAudit> phi_residual_audit(const ModelSpec& model, std::span<const double> input, const SimConfig& sim);

// Report builders for the three metrics, one row per T.
EvalReport accuracy_report(const ModelSpec& model, const Dataset& data, const SimConfig& sim, std::span<const int> T_list);
EvalReport phi_report(const ModelSpec& model, const Dataset& data, const SimConfig& sim, std::span<const int> T_list);

}  // namespace gnc
