#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cvnn/complex_core.hpp"

namespace cvnn {

/// Train/test split with one-hot labels. Real-valued data carries a zero
/// imaginary plane.
struct Dataset {
    std::string name;
    ComplexTensor x_train;
    ComplexTensor x_test;
    RealMatrix y_train;
    RealMatrix y_test;
    std::map<std::string, std::string> metadata;

    Eigen::Index n_features() const { return x_train.cols(); }
    Eigen::Index n_classes() const { return y_train.cols(); }
    bool is_real() const { return x_train.imag_is_zero() && x_test.imag_is_zero(); }
};

RealMatrix one_hot(std::span<const int> labels, int classes);
std::vector<int> argmax_rows(const RealMatrix& m);

// ---------------------------------------------------------------------------
// Synthetic quadrant task.
// ---------------------------------------------------------------------------

enum class SyntheticMode { complex, real_projection };

struct SyntheticSpec {
    Eigen::Index n_samples = 10000;
    Eigen::Index d = 25;
    double sigma = 0.2;
    SyntheticMode mode = SyntheticMode::complex;
    double origin_radius = 4.0;
    std::uint64_t seed = 0;
    double train_fraction = 0.8;

    void validate() const;
};

/// Label of a complex feature sum: 0 near the origin (|s| < 0.9 r), 1..4 for
/// quadrants I..IV (|s| > 1.1 r), -1 inside the ambiguous annulus.
int complex_region(Complex s, double origin_radius) noexcept;

/// Label of a real feature sum: 0 near zero (|s| < 0.9 r), 1 positive,
/// 2 negative (|s| > 1.1 r), -1 ambiguous.
int real_region(double s, double origin_radius) noexcept;

/// One pre-relabeling draw: the class the target sum was drawn for and the
/// complex feature row. Both modes consume the same candidate stream.
struct SyntheticCandidate {
    int drawn_class = 0;
    std::vector<Complex> features;
};

SyntheticCandidate draw_candidate(const SyntheticSpec& spec, std::uint64_t index);

/// Generates the dataset; throws ValidationError if more than 90% of the
/// candidates fall in an ambiguous band.
Dataset gen_synthetic(const SyntheticSpec& spec);

/// One row per sample: re_0..re_{d-1}, im_0..im_{d-1}, label, split.
void export_csv(const Dataset& ds, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// IDX / MNIST.
// ---------------------------------------------------------------------------

struct IdxImages {
    std::int32_t count = 0;
    std::int32_t rows = 0;
    std::int32_t cols = 0;
    std::vector<std::uint8_t> pixels;  // count * rows * cols, row-major
};

IdxImages read_idx_images(const std::filesystem::path& path);
std::vector<std::uint8_t> read_idx_labels(const std::filesystem::path& path);

struct LabeledSplit {
    ComplexTensor x;  // pixels / 255, flattened
    RealMatrix y;     // one-hot over 10 classes
};

LabeledSplit load_mnist_split(const std::filesystem::path& images, const std::filesystem::path& labels);

/// Loads train-images-idx3-ubyte, train-labels-idx1-ubyte,
/// t10k-images-idx3-ubyte and t10k-labels-idx1-ubyte from `dir`.
Dataset load_mnist(const std::filesystem::path& dir);

/// Directory named by CVNN_DATA_DIR, or "data" when unset.
std::filesystem::path dataset_cache_dir();

}  // namespace cvnn
