#include "gnconvert/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>

#include "gnconvert/rng.hpp"

namespace gnc {

std::span<const double> Dataset::sample(std::size_t i) const {
    const std::size_t d = dim();
    return std::span<const double>(features).subspan(i * d, d);
}

Dataset Dataset::head(std::size_t n) const {
    n = std::min(n, size());
    Dataset out;
    out.input_shape = input_shape;
    out.num_classes = num_classes;
    out.features.assign(features.begin(), features.begin() + static_cast<std::ptrdiff_t>(n * dim()));
    out.labels.assign(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(n));
    return out;
}

void Dataset::validate() const {
    if (labels.empty()) throw std::invalid_argument("dataset is empty");
    if (features.size() != labels.size() * dim()) {
        throw std::invalid_argument("dataset feature count does not match samples x input size");
    }
    for (int y : labels) {
        if (y < 0 || static_cast<std::size_t>(y) >= num_classes) {
            throw std::invalid_argument("label " + std::to_string(y) + " outside [0, " + std::to_string(num_classes) + ")");
        }
    }
}

Dataset make_blobs(const BlobsConfig& cfg) {
    if (cfg.classes < 1 || cfg.clusters_per_class < 1 || cfg.samples == 0 || !(cfg.stddev >= 0.0)) {
        throw std::invalid_argument("invalid blobs configuration");
    }
    const int clusters = cfg.classes * cfg.clusters_per_class;
    Rng rng(cfg.seed);

    std::vector<std::size_t> order(cfg.samples);
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(order));

    Dataset ds;
    ds.input_shape = {2};
    ds.num_classes = static_cast<std::size_t>(cfg.classes);
    ds.features.resize(cfg.samples * 2);
    ds.labels.resize(cfg.samples);
    for (std::size_t i = 0; i < cfg.samples; ++i) {
        const int m = static_cast<int>(i % static_cast<std::size_t>(clusters));
        const double angle = 2.0 * std::numbers::pi * m / clusters;
        const std::size_t slot = order[i];
        ds.features[2 * slot] = cfg.radius * std::cos(angle) + cfg.stddev * rng.normal();
        ds.features[2 * slot + 1] = cfg.radius * std::sin(angle) + cfg.stddev * rng.normal();
        ds.labels[slot] = m % cfg.classes;
    }
    return ds;
}

namespace {

bool parse_double(std::string_view s, double& out) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    if (s.empty()) return false;
    // from_chars rejects a leading '+'
    if (s.front() == '+') s.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open CSV dataset '" + path.string() + "'");

    Dataset ds;
    std::size_t width = 0;
    int max_label = -1;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = split_commas(line);
        double label = 0.0;
        if (!parse_double(fields[0], label)) {
            if (ds.labels.empty() && width == 0) continue;  // header
            throw std::invalid_argument(path.string() + ":" + std::to_string(line_no) + ": bad label");
        }
        if (fields.size() < 2) {
            throw std::invalid_argument(path.string() + ":" + std::to_string(line_no) + ": no features");
        }
        if (width == 0) width = fields.size() - 1;
        if (fields.size() - 1 != width) {
            throw std::invalid_argument(path.string() + ":" + std::to_string(line_no) + ": expected " +
                                        std::to_string(width) + " features");
        }
        if (label < 0 || label != std::floor(label)) {
            throw std::invalid_argument(path.string() + ":" + std::to_string(line_no) + ": label must be a non-negative integer");
        }
        for (std::size_t k = 1; k < fields.size(); ++k) {
            double v = 0.0;
            if (!parse_double(fields[k], v)) {
                throw std::invalid_argument(path.string() + ":" + std::to_string(line_no) + ": bad feature value");
            }
            ds.features.push_back(v);
        }
        ds.labels.push_back(static_cast<int>(label));
        max_label = std::max(max_label, static_cast<int>(label));
    }
    if (ds.labels.empty()) throw std::invalid_argument("CSV dataset '" + path.string() + "' has no rows");
    ds.input_shape = {width};
    ds.num_classes = static_cast<std::size_t>(max_label + 1);
    return ds;
}

namespace {

struct IdxArray {
    std::vector<std::uint32_t> dims;
    std::vector<std::uint8_t> bytes;
};

std::uint32_t read_be32(std::istream& in, const std::filesystem::path& path) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) {
        throw std::invalid_argument("IDX file '" + path.string() + "' is truncated");
    }
    return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) | std::uint32_t{b[3]};
}

IdxArray read_idx(const std::filesystem::path& path, std::uint32_t expected_magic) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open IDX file '" + path.string() + "'");
    const std::uint32_t magic = read_be32(in, path);
    if (magic != expected_magic) {
        std::ostringstream os;
        os << "IDX file '" << path.string() << "' has magic 0x" << std::hex << magic << ", expected 0x" << expected_magic;
        throw std::invalid_argument(os.str());
    }
    IdxArray arr;
    std::size_t total = 1;
    for (std::uint32_t d = 0; d < (magic & 0xffu); ++d) {
        arr.dims.push_back(read_be32(in, path));
        total *= arr.dims.back();
    }
    arr.bytes.resize(total);
    if (!in.read(reinterpret_cast<char*>(arr.bytes.data()), static_cast<std::streamsize>(total))) {
        throw std::invalid_argument("IDX file '" + path.string() + "' is truncated");
    }
    return arr;
}

}  // namespace

Dataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels, bool image_layout) {
    const IdxArray img = read_idx(images, 0x00000803u);
    const IdxArray lab = read_idx(labels, 0x00000801u);
    if (img.dims[0] != lab.dims[0]) {
        throw std::invalid_argument("IDX image count " + std::to_string(img.dims[0]) + " != label count " +
                                    std::to_string(lab.dims[0]));
    }
    Dataset ds;
    const std::size_t rows = img.dims[1], cols = img.dims[2];
    ds.input_shape = image_layout ? Shape{1, rows, cols} : Shape{rows * cols};
    ds.features.resize(img.bytes.size());
    for (std::size_t i = 0; i < img.bytes.size(); ++i) {
        ds.features[i] = static_cast<double>(img.bytes[i]) / 255.0;
    }
    int max_label = 0;
    ds.labels.reserve(lab.bytes.size());
    for (std::uint8_t y : lab.bytes) {
        ds.labels.push_back(y);
        max_label = std::max(max_label, static_cast<int>(y));
    }
    ds.num_classes = static_cast<std::size_t>(max_label + 1);
    return ds;
}

}  // namespace gnc
