#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "gnconvert/model.hpp"

namespace gnc {

struct Dataset {
    Shape input_shape;
    std::size_t num_classes = 0;
    std::vector<double> features;  // size() x numel(input_shape), row-major
    std::vector<int> labels;

    std::size_t size() const { return labels.size(); }
    std::size_t dim() const { return numel(input_shape); }
    std::span<const double> sample(std::size_t i) const;

    /// First `n` samples (or all, if fewer).
    Dataset head(std::size_t n) const;
    void validate() const;
};

// Gaussian blobs in the plane. `classes * clusters_per_class` centers sit
// evenly on a circle of radius `radius`, labelled round-robin, so with two
// clusters per class neighbouring blobs belong to different classes and no
// single line separates the data. Samples are spread evenly over the blobs
// and returned in shuffled order.
struct BlobsConfig {
    std::size_t samples = 2000;
    int classes = 2;
    int clusters_per_class = 2;
    double radius = 2.0;
    double stddev = 0.5;
    std::uint64_t seed = 0;
};

Dataset make_blobs(const BlobsConfig& cfg);

/// CSV rows of `label,f1,f2,...`. A first line whose label field is not a
/// number is treated as a header. Input shape is {number of features}.
Dataset load_csv(const std::filesystem::path& path);

/// IDX pair: unsigned-byte images (magic 0x00000803) and labels (magic
/// 0x00000801), both big-endian. Pixels are scaled by 1/255. Images are
/// flattened to {rows*cols} unless `image_layout` keeps them as {1, rows, cols}.
Dataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels, bool image_layout = false);

}  // namespace gnc
