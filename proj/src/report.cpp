#include "gnconvert/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace gnc {

namespace {

std::string fmt_value(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void EvalReport::validate() const {
    for (const ReportRow& r : rows) {
        if (!std::isfinite(r.value)) throw std::logic_error("report metric " + r.metric + " is not finite");
        if (r.metric == "accuracy" && (r.value < 0.0 || r.value > 1.0)) {
            throw std::logic_error("accuracy outside [0, 1]");
        }
        if (r.metric == "mse" && r.value < 0.0) throw std::logic_error("negative mse");
    }
}

std::string EvalReport::to_csv() const {
    validate();
    std::ostringstream os;
    os << "T,tau,neuron,metric,value\n";
    for (const ReportRow& r : rows) {
        os << r.T << ',' << (r.tau ? std::to_string(*r.tau) : "") << ',' << r.neuron << ',' << r.metric << ','
           << fmt_value(r.value) << '\n';
    }
    return os.str();
}

std::string EvalReport::to_json(const std::string& model_hash) const {
    validate();
    nlohmann::json j;
    if (!model_hash.empty()) j["model_hash"] = model_hash;
    j["rows"] = nlohmann::json::array();
    for (const ReportRow& r : rows) {
        nlohmann::json row;
        row["T"] = r.T;
        row["tau"] = r.tau ? nlohmann::json(*r.tau) : nlohmann::json(nullptr);
        row["neuron"] = r.neuron;
        row["metric"] = r.metric;
        row["value"] = r.value;
        j["rows"].push_back(std::move(row));
    }
    return j.dump(2) + "\n";
}

std::string report_file_name(const std::string& model_hash, std::span<const int> T_list, std::optional<int> tau,
                             const std::string& neuron, const std::string& ext) {
    std::ostringstream os;
    os << "report_" << model_hash << "_T";
    for (std::size_t i = 0; i < T_list.size(); ++i) os << (i ? "-" : "") << T_list[i];
    os << "_tau" << (tau ? std::to_string(*tau) : std::string("none")) << '_' << neuron << '.' << ext;
    return os.str();
}

}  // namespace gnc
