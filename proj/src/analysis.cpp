#include "gnconvert/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "gnconvert/neuron.hpp"

namespace gnc {

namespace {

int members_of(NeuronKind kind, int tau) {
    return kind == NeuronKind::group ? tau : 1;
}

void check_T_list(std::span<const int> T_list) {
    for (int T : T_list) {
        if (T < 1) throw std::invalid_argument("time-steps must be >= 1, got " + std::to_string(T));
    }
}

int max_T(std::span<const int> T_list) {
    return T_list.empty() ? 0 : *std::max_element(T_list.begin(), T_list.end());
}

std::optional<int> tau_column(const SimConfig& sim) {
    return sim.neuron == NeuronKind::group ? std::optional<int>(sim.tau) : std::nullopt;
}

void check_same_architecture(const ModelSpec& a, const ModelSpec& b) {
    a.validate();
    b.validate();
    if (a.input_shape != b.input_shape || a.layers.size() != b.layers.size()) {
        throw std::invalid_argument("ANN and SNN models have different architectures");
    }
    for (std::size_t i = 0; i < a.layers.size(); ++i) {
        const LayerSpec& la = a.layers[i];
        const LayerSpec& lb = b.layers[i];
        if (la.kind != lb.kind || la.shape != lb.shape || la.activated != lb.activated || la.stride != lb.stride ||
            la.padding != lb.padding) {
            throw std::invalid_argument("ANN and SNN models differ at layer " + std::to_string(i));
        }
    }
}

void check_dataset(const ModelSpec& model, const Dataset& data) {
    data.validate();
    if (data.input_shape != model.input_shape) {
        throw std::invalid_argument("dataset input shape " + to_string(data.input_shape) + " does not match model input " +
                                    to_string(model.input_shape));
    }
}

// Logits after the first T steps of a longer run.
std::vector<double> logits_at(const Trace& trace, int T) {
    std::vector<double> out(trace.n_out);
    const std::size_t row = static_cast<std::size_t>(T - 1) * trace.n_out;
    for (std::size_t j = 0; j < trace.n_out; ++j) {
        out[j] = trace.output_accumulated[row + j] / static_cast<double>(T);
    }
    return out;
}

}  // namespace

std::vector<double> curve_grid(NeuronKind kind, double theta, int tau, int T, V0Policy v0, double lo, double hi,
                               std::size_t uniform_points) {
    if (!(hi > lo)) throw std::invalid_argument("curve range must have hi > lo");
    if (uniform_points < 2) throw std::invalid_argument("curve grid needs at least two points");
    if (T < 1) throw std::invalid_argument("T must be >= 1");
    const int members = members_of(kind, tau);
    if (members < 1) throw std::invalid_argument("tau must be >= 1");

    std::vector<double> grid;
    grid.reserve(uniform_points + static_cast<std::size_t>(members * T));
    for (std::size_t i = 0; i < uniform_points; ++i) {
        grid.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(uniform_points - 1));
    }
    const double unit = theta / members;
    const double start = v0 == V0Policy::half_threshold ? unit / 2.0 : 0.0;
    for (int k = 1; k <= members * T; ++k) {
        const double x = (k * unit - start) / T;
        if (x >= lo && x <= hi) grid.push_back(x);
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

std::vector<CurvePoint> firing_rate_curve(NeuronKind kind, double theta, int tau, int T, V0Policy v0,
                                          std::span<const double> x_grid) {
    if (T < 1) throw std::invalid_argument("T must be >= 1");
    std::vector<CurvePoint> curve;
    curve.reserve(x_grid.size());
    if (kind == NeuronKind::group) {
        const GNConfig cfg(theta, tau);
        const double start = v0 == V0Policy::half_threshold ? cfg.theta_gn() / 2.0 : 0.0;
        for (double x : x_grid) {
            GNState s{start};
            long total = 0;
            for (int t = 0; t < T; ++t) {
                const GNStep r = gn_step(s, cfg, x);
                s = r.state;
                total += r.out.count;
            }
            curve.push_back({x, (static_cast<double>(total) * cfg.theta_gn()) / T});
        }
    } else {
        const IFConfig cfg{theta};
        cfg.validate();
        const double start = v0 == V0Policy::half_threshold ? theta / 2.0 : 0.0;
        for (double x : x_grid) {
            IFState s{start};
            long total = 0;
            for (int t = 0; t < T; ++t) {
                const IFStep r = if_step(s, cfg, x);
                s = r.state;
                total += r.out.count;
            }
            curve.push_back({x, (static_cast<double>(total) * theta) / T});
        }
    }
    return curve;
}

std::vector<double> riser_positions(std::span<const CurvePoint> curve) {
    std::vector<double> out;
    for (std::size_t i = 1; i < curve.size(); ++i) {
        if (curve[i].rate > curve[i - 1].rate) out.push_back(curve[i].x);
    }
    return out;
}

std::vector<double> step_widths(std::span<const double> risers) {
    std::vector<double> out;
    for (std::size_t i = 1; i < risers.size(); ++i) out.push_back(risers[i] - risers[i - 1]);
    return out;
}

EvalReport conversion_mse(const ModelSpec& ann, const ModelSpec& snn, const Dataset& data, std::span<const int> T_list,
                          const SimConfig& sim) {
    check_same_architecture(ann, snn);
    check_T_list(T_list);
    EvalReport report;
    if (T_list.empty()) return report;
    check_dataset(ann, data);

    SimConfig run = sim;
    run.T = max_T(T_list);
    std::vector<double> sq_sum(T_list.size(), 0.0);
    std::size_t terms = 0;
    for (std::size_t n = 0; n < data.size(); ++n) {
        const auto x = data.sample(n);
        const std::vector<double> ref = ann_forward(ann, x);
        const SnnResult res = snn_forward(snn, x, run);
        for (std::size_t k = 0; k < T_list.size(); ++k) {
            const std::vector<double> out = logits_at(res.trace, T_list[k]);
            for (std::size_t j = 0; j < out.size(); ++j) {
                const double d = ref[j] - out[j];
                sq_sum[k] += d * d;
            }
        }
        terms += ref.size();
    }
    for (std::size_t k = 0; k < T_list.size(); ++k) {
        report.rows.push_back({T_list[k], tau_column(sim), to_string(sim.neuron), "mse",
                               sq_sum[k] / static_cast<double>(terms)});
    }
    return report;
}

EvalReport conversion_mse(const ModelSpec& ann, const ModelSpec& snn, const Dataset& data, std::span<const int> T_list,
                          V0Policy v0) {
    return conversion_mse(ann, snn, data, T_list, sim_for_model(snn, 1, v0));
}

double accuracy_eval(const ModelSpec& model, const Dataset& data, const std::optional<SimConfig>& sim) {
    check_dataset(model, data);
    std::size_t correct = 0;
    for (std::size_t n = 0; n < data.size(); ++n) {
        const auto x = data.sample(n);
        const std::vector<double> logits = sim ? snn_forward(model, x, *sim).logits : ann_forward(model, x);
        if (argmax(logits) == static_cast<std::size_t>(data.labels[n])) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(data.size());
}

std::vector<double> snn_accuracy_over_T(const ModelSpec& model, const Dataset& data, const SimConfig& sim,
                                        std::span<const int> T_list) {
    check_T_list(T_list);
    if (T_list.empty()) return {};
    check_dataset(model, data);
    SimConfig run = sim;
    run.T = max_T(T_list);
    std::vector<std::size_t> correct(T_list.size(), 0);
    for (std::size_t n = 0; n < data.size(); ++n) {
        const SnnResult res = snn_forward(model, data.sample(n), run);
        for (std::size_t k = 0; k < T_list.size(); ++k) {
            if (argmax(logits_at(res.trace, T_list[k])) == static_cast<std::size_t>(data.labels[n])) ++correct[k];
        }
    }
    std::vector<double> acc(T_list.size());
    for (std::size_t k = 0; k < T_list.size(); ++k) {
        acc[k] = static_cast<double>(correct[k]) / static_cast<double>(data.size());
    }
    return acc;
}

std::vector<LayerAudit> phi_residual_audit(const ModelSpec& model, std::span<const double> input, const SimConfig& sim) {
    const std::vector<Shape> shapes = model.validate();
    const SnnResult res = snn_forward(model, input, sim);
    const Trace& trace = res.trace;
    const double T = static_cast<double>(sim.T);

    std::vector<LayerAudit> audits;
    // Time-averaged signal entering each layer: the raw input, then the rates
    // of the spiking layer before, passed through any linear layers between.
    Tensor avg(model.input_shape, std::vector<double>(input.begin(), input.end()));
    for (std::size_t i = 0; i + 1 < model.layers.size(); ++i) {
        Tensor drive = apply_linear(model.layers[i], avg, shapes[i]);
        const LayerTrace& lt = trace.layers[i];
        if (!lt.spiking) {
            avg = std::move(drive);
            continue;
        }
        const std::vector<double> rate = phi(trace, i, lt.per_spike_weight, sim.T);
        LayerAudit audit;
        audit.layer = i;
        double err_sum = 0.0;
        for (std::size_t j = 0; j < lt.neurons; ++j) {
            const double drift = (lt.vT[j] - lt.v0[j]) / T;
            audit.residual_max = std::max(audit.residual_max, std::abs(rate[j] - (drive.data[j] - drift)));
            audit.mapping_error_max = std::max(audit.mapping_error_max, std::abs(drift));
            err_sum += std::abs(drift);
        }
        audit.mapping_error_mean = err_sum / static_cast<double>(lt.neurons);
        audits.push_back(audit);
        avg = Tensor(shapes[i], rate);
    }
    return audits;
}

EvalReport accuracy_report(const ModelSpec& model, const Dataset& data, const SimConfig& sim, std::span<const int> T_list) {
    EvalReport report;
    const std::vector<double> acc = snn_accuracy_over_T(model, data, sim, T_list);
    for (std::size_t k = 0; k < T_list.size(); ++k) {
        report.rows.push_back({T_list[k], tau_column(sim), to_string(sim.neuron), "accuracy", acc[k]});
    }
    return report;
}

EvalReport phi_report(const ModelSpec& model, const Dataset& data, const SimConfig& sim, std::span<const int> T_list) {
    check_T_list(T_list);
    EvalReport report;
    if (T_list.empty()) return report;
    check_dataset(model, data);
    for (int T : T_list) {
        SimConfig run = sim;
        run.T = T;
        double worst = 0.0;
        for (std::size_t n = 0; n < data.size(); ++n) {
            for (const LayerAudit& a : phi_residual_audit(model, data.sample(n), run)) {
                worst = std::max(worst, a.residual_max);
            }
        }
        report.rows.push_back({T, tau_column(sim), to_string(sim.neuron), "phi_residual_max", worst});
    }
    return report;
}

}  // namespace gnc
