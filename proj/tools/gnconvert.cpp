// gnconvert: train a QCFS network, convert it to an IF or Group Neuron SNN,
// evaluate conversion error, and print single-neuron firing-rate curves.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage error.
// Settings precedence: command-line flags > GNCONVERT_* environment > defaults.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gnconvert/analysis.hpp"
#include "gnconvert/conversion.hpp"
#include "gnconvert/dataset.hpp"
#include "gnconvert/kernels.hpp"
#include "gnconvert/model_io.hpp"
#include "gnconvert/trainer.hpp"

namespace {

constexpr int kRuntimeFailure = 1;
constexpr int kUsageError = 2;

// Raised for flag combinations CLI11 cannot express on its own.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DatasetOptions {
    std::string synthetic;
    std::string csv;
    std::string idx_images;
    std::string idx_labels;
    bool idx_image_layout = false;
    gnc::BlobsConfig blobs;

    void add_to(CLI::App& cmd) {
        cmd.add_option("--synthetic", synthetic, "Built-in dataset (blobs)")->check(CLI::IsMember({"blobs"}));
        cmd.add_option("--csv", csv, "CSV dataset: label,f1,f2,...")->check(CLI::ExistingFile);
        cmd.add_option("--idx-images", idx_images, "IDX image file (magic 0x00000803)")->check(CLI::ExistingFile);
        cmd.add_option("--idx-labels", idx_labels, "IDX label file (magic 0x00000801)")->check(CLI::ExistingFile);
        cmd.add_flag("--idx-image-layout", idx_image_layout, "Keep IDX images as {1,H,W} instead of flattening");
        cmd.add_option("--samples", blobs.samples, "Blobs: number of samples")->check(CLI::PositiveNumber)->capture_default_str();
        cmd.add_option("--classes", blobs.classes, "Blobs: number of classes")->check(CLI::PositiveNumber)->capture_default_str();
        cmd.add_option("--clusters", blobs.clusters_per_class, "Blobs: clusters per class")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        cmd.add_option("--radius", blobs.radius, "Blobs: radius of the circle of centers")->capture_default_str();
        cmd.add_option("--stddev", blobs.stddev, "Blobs: per-coordinate standard deviation")
            ->check(CLI::NonNegativeNumber)
            ->capture_default_str();
    }

    gnc::Dataset load(std::uint64_t seed) const {
        const int sources = !synthetic.empty() + !csv.empty() + (!idx_images.empty() || !idx_labels.empty());
        if (sources != 1) {
            throw UsageError("choose exactly one dataset: --synthetic blobs, --csv PATH, or --idx-images/--idx-labels");
        }
        if (!synthetic.empty()) {
            gnc::BlobsConfig cfg = blobs;
            cfg.seed = seed;
            return gnc::make_blobs(cfg);
        }
        if (!csv.empty()) return gnc::load_csv(csv);
        if (idx_images.empty() || idx_labels.empty()) throw UsageError("--idx-images and --idx-labels go together");
        return gnc::load_idx(idx_images, idx_labels, idx_image_layout);
    }
};

std::vector<std::size_t> parse_widths(const std::string& text) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        long v = 0;
        try {
            v = std::stol(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != item.size() || v <= 0) throw UsageError("--arch expects positive comma-separated widths, got '" + text + "'");
        out.push_back(static_cast<std::size_t>(v));
    }
    if (out.size() < 2) throw UsageError("--arch needs at least an input and an output width");
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

// ---------------------------------------------------------------------------

struct TrainCmd {
    DatasetOptions data;
    std::string arch = "2,16,2";
    gnc::TrainConfig cfg;
    std::string output;

    void add_to(CLI::App& app) {
        CLI::App* cmd = app.add_subcommand("train", "Train a dense QCFS network and write the model JSON");
        data.add_to(*cmd);
        cmd->add_option("--arch", arch, "Layer widths, input first, e.g. 2,16,2")->capture_default_str();
        cmd->add_option("--L", cfg.L, "QCFS quantization level")->check(CLI::PositiveNumber)->envname("GNCONVERT_L")->capture_default_str();
        cmd->add_option("--epochs", cfg.epochs, "Training epochs")->check(CLI::NonNegativeNumber)->envname("GNCONVERT_EPOCHS")->capture_default_str();
        cmd->add_option("--lr", cfg.learning_rate, "Learning rate")->check(CLI::NonNegativeNumber)->envname("GNCONVERT_LR")->capture_default_str();
        cmd->add_option("--batch", cfg.batch_size, "Mini-batch size")->check(CLI::PositiveNumber)->envname("GNCONVERT_BATCH")->capture_default_str();
        cmd->add_option("--seed", cfg.seed, "Seed for data, initialisation and shuffling")->envname("GNCONVERT_SEED")->capture_default_str();
        cmd->add_option("-o,--output", output, "Model file to write")->required();
        cmd->callback([this] { run(); });
    }

    void run() {
        cfg.arch = parse_widths(arch);
        const gnc::Dataset ds = data.load(cfg.seed);
        const gnc::TrainResult res = gnc::train(ds, cfg);
        gnc::save_model(res.model, output);
        const double acc = gnc::accuracy_eval(res.model, ds, std::nullopt);
        std::cerr << "trained " << arch << " for " << cfg.epochs << " epochs; final loss "
                  << (res.epoch_loss.empty() ? 0.0 : res.epoch_loss.back()) << ", training accuracy " << acc
                  << "; wrote " << output << "\n";
    }
};

struct ConvertCmd {
    std::string input;
    std::optional<int> tau;
    std::string output;

    void add_to(CLI::App& app) {
        CLI::App* cmd = app.add_subcommand("convert", "Map QCFS thresholds onto IF neurons, optionally replace them with Group Neurons");
        cmd->add_option("model", input, "Trained model JSON")->required()->check(CLI::ExistingFile);
        cmd->add_option("--tau", tau, "Group Neuron member count; omit for an IF network")
            ->check(CLI::Range(1, 1 << 20))
            ->envname("GNCONVERT_TAU");
        cmd->add_option("-o,--output", output, "Converted model file to write")->required();
        cmd->callback([this] { run(); });
    }

    void run() {
        gnc::ModelSpec model = gnc::ann_to_snn(gnc::load_model(input));
        if (tau) model = gnc::replace_if_with_gn(model, *tau);
        gnc::save_model(model, output);
        std::cerr << "converted " << input << " to " << (tau ? "GN(tau=" + std::to_string(*tau) + ")" : std::string("IF"))
                  << "; wrote " << output << "\n";
    }
};

struct EvalCmd {
    std::string input;
    DatasetOptions data;
    std::vector<int> T_list{1, 2, 4, 8};
    std::string metric = "accuracy";
    std::string ann;
    std::string neuron;
    std::optional<int> tau;
    std::string v0 = "half_threshold";
    std::string format = "csv";
    std::string output;
    std::string out_dir;
    std::uint64_t seed = 0;

    void add_to(CLI::App& app) {
        CLI::App* cmd = app.add_subcommand("eval", "Evaluate a converted model and emit a CSV/JSON report");
        cmd->add_option("model", input, "Converted model JSON")->required()->check(CLI::ExistingFile);
        data.add_to(*cmd);
        cmd->add_option("--T", T_list, "Time-steps, comma separated")
            ->delimiter(',')
            ->check(CLI::PositiveNumber)
            ->envname("GNCONVERT_T")
            ->capture_default_str();
        cmd->add_option("--metric", metric, "accuracy | mse | phi")
            ->check(CLI::IsMember({"accuracy", "mse", "phi"}))
            ->envname("GNCONVERT_METRIC")
            ->capture_default_str();
        cmd->add_option("--ann", ann, "Source ANN model (required for --metric mse)")->check(CLI::ExistingFile);
        cmd->add_option("--neuron", neuron, "Override the model's neuron kind: if | gn")->check(CLI::IsMember({"if", "gn"}));
        cmd->add_option("--tau", tau, "Override the Group Neuron member count")->check(CLI::Range(1, 1 << 20));
        cmd->add_option("--v0", v0, "Initial potential: zero | half_threshold")
            ->check(CLI::IsMember({"zero", "half", "half_threshold"}))
            ->envname("GNCONVERT_V0")
            ->capture_default_str();
        cmd->add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}))->envname("GNCONVERT_FORMAT")->capture_default_str();
        cmd->add_option("-o,--output", output, "Report file (default: standard output)");
        cmd->add_option("--out-dir", out_dir, "Directory for an automatically named report file")->check(CLI::ExistingDirectory);
        cmd->add_option("--seed", seed, "Seed for the synthetic dataset")->envname("GNCONVERT_SEED")->capture_default_str();
        cmd->callback([this] { run(); });
    }

    void run() {
        if (metric == "mse" && ann.empty()) throw UsageError("--metric mse requires --ann ANN_MODEL");
        if (!output.empty() && !out_dir.empty()) throw UsageError("use either -o or --out-dir, not both");

        const gnc::ModelSpec model = gnc::load_model(input);
        gnc::SimConfig sim = gnc::sim_for_model(model, 1, gnc::v0_policy_from_string(v0));
        if (neuron == "if") {
            if (tau) throw UsageError("--tau applies to --neuron gn only");
            sim.neuron = gnc::NeuronKind::if_neuron;
            sim.tau = 1;
        } else if (neuron == "gn" || tau) {
            sim.neuron = gnc::NeuronKind::group;
            if (tau) sim.tau = *tau;
            else if (sim.tau < 1 || model.metadata.count("tau") == 0) {
                bool tagged = false;
                for (const auto& l : model.layers) tagged = tagged || l.tau.has_value();
                if (!tagged) throw UsageError("--neuron gn on an IF model needs --tau");
            }
        }

        const gnc::Dataset ds = data.load(seed);
        gnc::EvalReport report;
        if (metric == "accuracy") {
            report = gnc::accuracy_report(model, ds, sim, T_list);
        } else if (metric == "mse") {
            report = gnc::conversion_mse(gnc::load_model(ann), model, ds, T_list, sim);
        } else {
            report = gnc::phi_report(model, ds, sim, T_list);
        }

        const std::string hash = gnc::model_hash(model);
        const std::string text = format == "json" ? report.to_json(hash) : report.to_csv();
        std::string path = output;
        if (!out_dir.empty()) {
            const std::optional<int> tau_col =
                sim.neuron == gnc::NeuronKind::group ? std::optional<int>(sim.tau) : std::nullopt;
            path = (std::filesystem::path(out_dir) /
                    gnc::report_file_name(hash, T_list, tau_col, gnc::to_string(sim.neuron), format))
                       .string();
        }
        write_text(path, text);
        if (!path.empty()) std::cerr << "wrote " << path << "\n";
    }
};

struct CurveCmd {
    std::string neuron;
    double theta = 1.0;
    int tau = 4;
    int T = 4;
    std::string v0 = "half_threshold";
    std::size_t points = 2048;
    std::string output;

    void add_to(CLI::App& app) {
        CLI::App* cmd = app.add_subcommand("curve", "Firing rate versus constant input current on [-0.5 theta, 1.5 theta]");
        cmd->add_option("--neuron", neuron, "if | gn")->required()->check(CLI::IsMember({"if", "gn"}));
        cmd->add_option("--theta", theta, "IF threshold")->check(CLI::PositiveNumber)->capture_default_str();
        cmd->add_option("--tau", tau, "Group Neuron member count")->check(CLI::Range(1, 1 << 20))->envname("GNCONVERT_TAU")->capture_default_str();
        cmd->add_option("--T", T, "Time-steps")->check(CLI::Range(1, 1 << 20))->envname("GNCONVERT_T")->capture_default_str();
        cmd->add_option("--v0", v0, "Initial potential: zero | half_threshold")
            ->check(CLI::IsMember({"zero", "half", "half_threshold"}))
            ->envname("GNCONVERT_V0")
            ->capture_default_str();
        cmd->add_option("--points", points, "Uniform grid points (analytic risers are added)")
            ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 24))
            ->capture_default_str();
        cmd->add_option("-o,--output", output, "CSV file (default: standard output)");
        cmd->callback([this] { run(); });
    }

    void run() {
        const gnc::NeuronKind kind = neuron == "gn" ? gnc::NeuronKind::group : gnc::NeuronKind::if_neuron;
        const gnc::V0Policy policy = gnc::v0_policy_from_string(v0);
        const auto grid = gnc::curve_grid(kind, theta, tau, T, policy, -0.5 * theta, 1.5 * theta, points);
        const auto curve = gnc::firing_rate_curve(kind, theta, tau, T, policy, grid);

        std::ostringstream os;
        os << "x,rate\n";
        char buf[80];
        for (const gnc::CurvePoint& p : curve) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", p.x, p.rate);
            os << buf;
        }
        write_text(output, os.str());

        const auto risers = gnc::riser_positions(curve);
        const auto widths = gnc::step_widths(risers);
        std::cerr << risers.size() << " risers";
        if (!widths.empty()) std::cerr << ", step width " << widths.front();
        std::cerr << "\n";
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ANN-to-SNN conversion with Group Neurons"};
    app.require_subcommand(1);
    std::string kernel_set = "auto";
    app.add_option("--kernels", kernel_set, "Kernel set: auto | scalar | avx2 | neon")
        ->envname("GNCONVERT_KERNELS")
        ->capture_default_str();
    app.parse_complete_callback([&] {
        try {
            gnc::kernels::set_active(kernel_set);
        } catch (const std::invalid_argument& e) {
            throw CLI::ValidationError("--kernels", e.what());
        }
    });

    TrainCmd train;
    ConvertCmd convert;
    EvalCmd eval;
    CurveCmd curve;
    train.add_to(app);
    convert.add_to(app);
    eval.add_to(app);
    curve.add_to(app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kUsageError;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsageError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntimeFailure;
    }
    return 0;
}
