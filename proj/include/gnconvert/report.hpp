#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gnc {

struct ReportRow {
    int T = 0;
    std::optional<int> tau;  // set for Group Neuron runs
    std::string neuron;      // "if", "gn" or "ann"
    std::string metric;      // "accuracy", "mse" or "phi_residual_max"
    double value = 0.0;
};

struct EvalReport {
    std::vector<ReportRow> rows;

    /// Throws std::logic_error on a non-finite value, an accuracy outside
    /// [0, 1] or a negative mse.
    void validate() const;

    /// Header `T,tau,neuron,metric,value`, one row per line, values printed
    /// with 17 significant digits.
    std::string to_csv() const;
    std::string to_json(const std::string& model_hash = {}) const;
};

/// report_<hash>_T<t1-t2-...>_tau<tau|none>_<neuron>.<ext>
std::string report_file_name(const std::string& model_hash, std::span<const int> T_list, std::optional<int> tau,
                             const std::string& neuron, const std::string& ext);

}  // namespace gnc
