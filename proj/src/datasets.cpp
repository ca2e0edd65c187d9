#include "cvnn/datasets.hpp"

#include <array>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include "cvnn/errors.hpp"
#include "cvnn/rng.hpp"

namespace cvnn {

RealMatrix one_hot(std::span<const int> labels, int classes) {
    if (classes < 1) throw ValidationError("one_hot: class count must be >= 1");
    RealMatrix out = RealMatrix::Zero(static_cast<Eigen::Index>(labels.size()), classes);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || labels[i] >= classes) {
            throw ValidationError("one_hot: label " + std::to_string(labels[i]) + " at index " + std::to_string(i) +
                                  " is outside [0, " + std::to_string(classes) + ")");
        }
        out(static_cast<Eigen::Index>(i), labels[i]) = 1.0;
    }
    return out;
}

std::vector<int> argmax_rows(const RealMatrix& m) {
    std::vector<int> out(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Eigen::Index idx = 0;
        m.row(r).maxCoeff(&idx);
        out[static_cast<std::size_t>(r)] = static_cast<int>(idx);
    }
    return out;
}

// ---------------------------------------------------------------------------

void SyntheticSpec::validate() const {
    if (n_samples < 10) throw ValidationError("synthetic: n_samples must be >= 10");
    if (d < 1) throw ValidationError("synthetic: d must be >= 1");
    if (!(sigma > 0.0)) throw ValidationError("synthetic: sigma must be > 0");
    if (!(origin_radius > 0.0)) throw ValidationError("synthetic: origin_radius must be > 0");
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ValidationError("synthetic: train_fraction must be in (0, 1)");
}

namespace {

constexpr double kInner = 0.9;  // ambiguity band is [0.9 r, 1.1 r]
constexpr double kOuter = 1.1;

}  // namespace

int complex_region(Complex s, double origin_radius) noexcept {
    const double r = std::abs(s);
    if (r < kInner * origin_radius) return 0;
    if (r <= kOuter * origin_radius) return -1;
    const bool right = s.real() >= 0.0;
    const bool up = s.imag() >= 0.0;
    if (right && up) return 1;
    if (!right && up) return 2;
    if (!right) return 3;
    return 4;
}

int real_region(double s, double origin_radius) noexcept {
    const double a = std::abs(s);
    if (a < kInner * origin_radius) return 0;
    if (a <= kOuter * origin_radius) return -1;
    return s > 0.0 ? 1 : 2;
}

SyntheticCandidate draw_candidate(const SyntheticSpec& spec, std::uint64_t index) {
    Rng rng(Rng::derive_seed(spec.seed, index));
    SyntheticCandidate c;
    c.drawn_class = static_cast<int>(rng.below(5));

    const double r0 = spec.origin_radius;
    Complex target;
    if (c.drawn_class == 0) {
        // uniform in the disc of radius 0.8 r
        const double rad = 0.8 * r0 * std::sqrt(rng.uniform01());
        const double ang = rng.uniform(-std::numbers::pi, std::numbers::pi);
        target = std::polar(rad, ang);
    } else {
        // open interior of quadrant (drawn_class - 1)
        const double lo = (c.drawn_class - 1) * std::numbers::pi / 2.0;
        double ang;
        do {
            ang = rng.uniform(lo, lo + std::numbers::pi / 2.0);
        } while (ang == lo);
        const double rad = rng.uniform(2.0 * r0, 4.0 * r0);
        target = std::polar(rad, ang);
    }

    const double d = static_cast<double>(spec.d);
    c.features.resize(static_cast<std::size_t>(spec.d));
    for (auto& f : c.features) {
        const double nr = rng.normal();
        const double ni = rng.normal();
        f = target / d + Complex{spec.sigma * nr, spec.sigma * ni};
    }
    return c;
}

Dataset gen_synthetic(const SyntheticSpec& spec) {
    spec.validate();
    const bool complex_mode = spec.mode == SyntheticMode::complex;
    const int classes = complex_mode ? 5 : 3;

    std::vector<SyntheticCandidate> kept;
    std::vector<int> labels;
    kept.reserve(static_cast<std::size_t>(spec.n_samples));
    const std::uint64_t max_attempts = 10 * static_cast<std::uint64_t>(spec.n_samples);
    std::uint64_t attempts = 0;

    while (static_cast<Eigen::Index>(kept.size()) < spec.n_samples) {
        if (attempts >= max_attempts) {
            throw ValidationError("synthetic: more than 90% of candidates rejected; origin_radius " +
                                  std::to_string(spec.origin_radius) + " is degenerate for sigma " +
                                  std::to_string(spec.sigma));
        }
        SyntheticCandidate c = draw_candidate(spec, attempts++);
        Complex sum{0.0, 0.0};
        for (const auto& f : c.features) sum += complex_mode ? f : Complex{f.real(), 0.0};
        const int label = complex_mode ? complex_region(sum, spec.origin_radius)
                                       : real_region(sum.real(), spec.origin_radius);
        if (label < 0) continue;
        if (!complex_mode) {
            for (auto& f : c.features) f = {f.real(), 0.0};
        }
        kept.push_back(std::move(c));
        labels.push_back(label);
    }

    // seeded 80/20 split
    std::vector<Eigen::Index> order(kept.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<Eigen::Index>(i);
    Rng shuffle_rng(Rng::derive_seed(spec.seed, ~std::uint64_t{0}));
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[shuffle_rng.below(i)]);

    const auto n_train = static_cast<Eigen::Index>(std::llround(spec.train_fraction * static_cast<double>(spec.n_samples)));
    const Eigen::Index n_test = spec.n_samples - n_train;

    auto fill = [&](Eigen::Index offset, Eigen::Index count, ComplexTensor& x, RealMatrix& y) {
        x = ComplexTensor(count, spec.d);
        std::vector<int> split_labels(static_cast<std::size_t>(count));
        for (Eigen::Index i = 0; i < count; ++i) {
            const auto src = static_cast<std::size_t>(order[static_cast<std::size_t>(offset + i)]);
            for (Eigen::Index j = 0; j < spec.d; ++j) x.set(i, j, kept[src].features[static_cast<std::size_t>(j)]);
            split_labels[static_cast<std::size_t>(i)] = labels[src];
        }
        y = one_hot(split_labels, classes);
    };

    Dataset ds;
    ds.name = complex_mode ? "synthetic_complex" : "synthetic_real";
    fill(0, n_train, ds.x_train, ds.y_train);
    fill(n_train, n_test, ds.x_test, ds.y_test);
    std::ostringstream os;
    ds.metadata["n_samples"] = std::to_string(spec.n_samples);
    ds.metadata["d"] = std::to_string(spec.d);
    os << spec.sigma;
    ds.metadata["sigma"] = os.str();
    os.str("");
    os << spec.origin_radius;
    ds.metadata["origin_radius"] = os.str();
    ds.metadata["seed"] = std::to_string(spec.seed);
    ds.metadata["split"] = std::to_string(n_train) + "/" + std::to_string(n_test);
    ds.metadata["candidates"] = std::to_string(attempts);
    return ds;
}

void export_csv(const Dataset& ds, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("export_csv: cannot open " + path.string());
    const Eigen::Index d = ds.n_features();
    for (Eigen::Index j = 0; j < d; ++j) out << "re_" << j << ',';
    for (Eigen::Index j = 0; j < d; ++j) out << "im_" << j << ',';
    out << "label,split\n";
    out.precision(17);
    auto write = [&](const ComplexTensor& x, const RealMatrix& y, const char* split) {
        const auto labels = argmax_rows(y);
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            for (Eigen::Index j = 0; j < d; ++j) out << x.re()(i, j) << ',';
            for (Eigen::Index j = 0; j < d; ++j) out << x.im()(i, j) << ',';
            out << labels[static_cast<std::size_t>(i)] << ',' << split << '\n';
        }
    };
    write(ds.x_train, ds.y_train, "train");
    write(ds.x_test, ds.y_test, "test");
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::uint32_t kImagesMagic = 0x00000803;
constexpr std::uint32_t kLabelsMagic = 0x00000801;

std::vector<std::uint8_t> slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t read_be32(const std::vector<std::uint8_t>& bytes, std::size_t offset, const std::filesystem::path& path) {
    if (offset + 4 > bytes.size()) {
        throw DataFormatError(path.string() + ": truncated header", bytes.size());
    }
    return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
           (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

}  // namespace

IdxImages read_idx_images(const std::filesystem::path& path) {
    const auto bytes = slurp(path);
    const std::uint32_t magic = read_be32(bytes, 0, path);
    if (magic != kImagesMagic) {
        std::ostringstream os;
        os << path.string() << ": bad magic 0x" << std::hex << magic << " (expected 0x00000803)";
        throw DataFormatError(os.str(), 0);
    }
    IdxImages img;
    img.count = static_cast<std::int32_t>(read_be32(bytes, 4, path));
    img.rows = static_cast<std::int32_t>(read_be32(bytes, 8, path));
    img.cols = static_cast<std::int32_t>(read_be32(bytes, 12, path));
    if (img.count < 0 || img.rows < 0 || img.cols < 0) throw DataFormatError(path.string() + ": negative dimension", 4);
    const std::size_t need = static_cast<std::size_t>(img.count) * static_cast<std::size_t>(img.rows) *
                             static_cast<std::size_t>(img.cols);
    if (bytes.size() < 16 + need) {
        throw DataFormatError(path.string() + ": truncated pixel data, expected " + std::to_string(need) + " bytes",
                              bytes.size());
    }
    img.pixels.assign(bytes.begin() + 16, bytes.begin() + 16 + static_cast<std::ptrdiff_t>(need));
    return img;
}

std::vector<std::uint8_t> read_idx_labels(const std::filesystem::path& path) {
    const auto bytes = slurp(path);
    const std::uint32_t magic = read_be32(bytes, 0, path);
    if (magic != kLabelsMagic) {
        std::ostringstream os;
        os << path.string() << ": bad magic 0x" << std::hex << magic << " (expected 0x00000801)";
        throw DataFormatError(os.str(), 0);
    }
    const std::uint32_t count = read_be32(bytes, 4, path);
    if (bytes.size() < 8 + static_cast<std::size_t>(count)) {
        throw DataFormatError(path.string() + ": truncated label data, expected " + std::to_string(count) + " bytes",
                              bytes.size());
    }
    return {bytes.begin() + 8, bytes.begin() + 8 + static_cast<std::ptrdiff_t>(count)};
}

LabeledSplit load_mnist_split(const std::filesystem::path& images, const std::filesystem::path& labels) {
    const IdxImages img = read_idx_images(images);
    const auto lab = read_idx_labels(labels);
    if (static_cast<std::size_t>(img.count) != lab.size()) {
        throw DataFormatError(labels.string() + ": " + std::to_string(lab.size()) + " labels for " +
                                  std::to_string(img.count) + " images",
                              4);
    }
    const Eigen::Index features = static_cast<Eigen::Index>(img.rows) * img.cols;
    RealMatrix x(img.count, features);
    for (Eigen::Index i = 0; i < img.count; ++i) {
        for (Eigen::Index j = 0; j < features; ++j) {
            x(i, j) = static_cast<double>(img.pixels[static_cast<std::size_t>(i * features + j)]) / 255.0;
        }
    }
    std::vector<int> ints(lab.begin(), lab.end());
    for (std::size_t i = 0; i < ints.size(); ++i) {
        if (ints[i] > 9) throw DataFormatError(labels.string() + ": label out of range", 8 + i);
    }
    return {ComplexTensor::from_real(std::move(x)), one_hot(ints, 10)};
}

Dataset load_mnist(const std::filesystem::path& dir) {
    Dataset ds;
    ds.name = "mnist";
    auto train = load_mnist_split(dir / "train-images-idx3-ubyte", dir / "train-labels-idx1-ubyte");
    auto test = load_mnist_split(dir / "t10k-images-idx3-ubyte", dir / "t10k-labels-idx1-ubyte");
    ds.x_train = std::move(train.x);
    ds.y_train = std::move(train.y);
    ds.x_test = std::move(test.x);
    ds.y_test = std::move(test.y);
    ds.metadata["source"] = dir.string();
    ds.metadata["split"] = std::to_string(ds.x_train.rows()) + "/" + std::to_string(ds.x_test.rows());
    return ds;
}

std::filesystem::path dataset_cache_dir() {
    if (const char* env = std::getenv("CVNN_DATA_DIR"); env != nullptr && *env != '\0') return env;
    return "data";
}

}  // namespace cvnn
