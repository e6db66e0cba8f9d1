#include "alearn/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "alearn/errors.hpp"
#include "alearn/rng.hpp"

namespace alearn {

namespace {

/// Round-half-up, fixed here so counts derived from fractions are identical
/// across platforms.
std::int64_t round_count(double x) {
    return static_cast<std::int64_t>(std::floor(x + 0.5));
}

std::uint32_t read_u32_be(std::istream& in, const std::string& path) {
    unsigned char buf[4];
    in.read(reinterpret_cast<char*>(buf), 4);
    if (!in) throw IoError("truncated file: " + path);
    return (static_cast<std::uint32_t>(buf[0]) << 24) |
           (static_cast<std::uint32_t>(buf[1]) << 16) |
           (static_cast<std::uint32_t>(buf[2]) << 8) |
           static_cast<std::uint32_t>(buf[3]);
}

constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

} // namespace

void Dataset::validate() const {
    if (static_cast<std::int64_t>(labels.size()) != features.rows) {
        throw ValidationError("dataset has " + std::to_string(features.rows) +
                              " feature rows but " + std::to_string(labels.size()) +
                              " labels");
    }
    if (class_count < 2) {
        throw ValidationError("dataset needs at least 2 classes");
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || labels[i] >= class_count) {
            throw ValidationError("label out of range at row " + std::to_string(i));
        }
    }
}

Dataset corrupt_labels(const Dataset& ds, const NoiseConfig& cfg) {
    if (cfg.lambda < 0.0 || cfg.lambda > 1.0) {
        throw ConfigError("noise lambda must lie in [0, 1]");
    }
    Dataset out = ds;
    const std::int64_t n = ds.size();
    const std::int64_t subset = round_count(cfg.lambda * static_cast<double>(n));
    if (subset < 2) return out; // permuting < 2 positions is the identity

    Rng rng(cfg.seed);
    std::vector<std::int64_t> positions = rng.sample_indices(n, subset);
    // Permute the labels sitting at the selected positions; multiset preserved.
    std::vector<int> selected(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i) {
        selected[i] = ds.labels[static_cast<std::size_t>(positions[i])];
    }
    rng.shuffle(selected);
    for (std::size_t i = 0; i < positions.size(); ++i) {
        out.labels[static_cast<std::size_t>(positions[i])] = selected[i];
    }
    return out;
}

std::vector<std::int64_t> imbalance_selected_classes(std::int64_t class_count,
                                                     const ImbalanceConfig& cfg) {
    if (cfg.delta < 0 || cfg.delta > class_count) {
        throw ConfigError("imbalance delta must lie in [0, C]");
    }
    Rng rng(cfg.seed);
    return rng.sample_indices(class_count, cfg.delta);
}

Dataset apply_imbalance(const Dataset& ds, const ImbalanceConfig& cfg) {
    if (cfg.keep_fraction <= 0.0 || cfg.keep_fraction > 1.0) {
        throw ConfigError("keep_fraction must lie in (0, 1]");
    }
    const std::vector<std::int64_t> chosen =
        imbalance_selected_classes(ds.class_count, cfg);
    if (cfg.delta == 0) return ds;

    // Which rows to keep draws from its own stream so the class selection
    // above can be reproduced independently.
    Rng rng(derive_seed(cfg.seed, SeedTag::Imbalance, 1));
    std::vector<bool> shrink(static_cast<std::size_t>(ds.class_count), false);
    for (std::int64_t c : chosen) shrink[static_cast<std::size_t>(c)] = true;

    // Per shrunk class, keep a uniform subset of round(keep_fraction * count).
    std::vector<std::vector<std::int64_t>> members(static_cast<std::size_t>(ds.class_count));
    for (std::int64_t i = 0; i < ds.size(); ++i) {
        members[static_cast<std::size_t>(ds.labels[static_cast<std::size_t>(i)])].push_back(i);
    }
    std::vector<bool> keep(static_cast<std::size_t>(ds.size()), true);
    for (std::int64_t c = 0; c < ds.class_count; ++c) {
        if (!shrink[static_cast<std::size_t>(c)]) continue;
        const auto& rows = members[static_cast<std::size_t>(c)];
        const auto count = static_cast<std::int64_t>(rows.size());
        const std::int64_t kept =
            round_count(cfg.keep_fraction * static_cast<double>(count));
        for (std::int64_t r : rows) keep[static_cast<std::size_t>(r)] = false;
        for (std::int64_t pick : rng.sample_indices(count, kept)) {
            keep[static_cast<std::size_t>(rows[static_cast<std::size_t>(pick)])] = true;
        }
    }

    Dataset out;
    out.class_count = ds.class_count;
    std::int64_t retained = 0;
    for (bool k : keep) retained += k ? 1 : 0;
    out.features = Matrix(retained, ds.dim());
    out.labels.reserve(static_cast<std::size_t>(retained));
    std::int64_t r = 0;
    for (std::int64_t i = 0; i < ds.size(); ++i) {
        if (!keep[static_cast<std::size_t>(i)]) continue;
        std::copy(ds.features.row(i).begin(), ds.features.row(i).end(),
                  out.features.row(r).begin());
        out.labels.push_back(ds.labels[static_cast<std::size_t>(i)]);
        ++r;
    }
    return out;
}

Dataset generate_blobs(std::int64_t n_per_class, std::int64_t class_count,
                       std::int64_t dim, double spread, std::uint64_t seed) {
    if (class_count < 2 || dim < 2) {
        throw ConfigError("blob generator needs C >= 2 and D >= 2");
    }
    if (n_per_class < 0 || spread < 0.0) {
        throw ConfigError("blob generator needs n_per_class >= 0 and spread >= 0");
    }
    const double pi = 3.14159265358979323846;
    // Adjacent centers at distance exactly 1, so `spread` reads as a fraction
    // of the class separation for any class count.
    const double radius = 1.0 / (2.0 * std::sin(pi / static_cast<double>(class_count)));

    Dataset out;
    out.class_count = class_count;
    out.features = Matrix(n_per_class * class_count, dim);
    out.labels.resize(static_cast<std::size_t>(n_per_class * class_count));

    Rng rng(seed);
    std::int64_t row = 0;
    for (std::int64_t c = 0; c < class_count; ++c) {
        const double angle = 2.0 * pi * static_cast<double>(c) / static_cast<double>(class_count);
        const double cx = radius * std::cos(angle);
        const double cy = radius * std::sin(angle);
        for (std::int64_t i = 0; i < n_per_class; ++i) {
            auto dst = out.features.row(row);
            dst[0] = cx + spread * rng.normal();
            dst[1] = cy + spread * rng.normal();
            for (std::int64_t d = 2; d < dim; ++d) {
                dst[static_cast<std::size_t>(d)] = spread * rng.normal();
            }
            out.labels[static_cast<std::size_t>(row)] = static_cast<int>(c);
            ++row;
        }
    }
    return out;
}

Dataset load_idx_pair(const std::string& images_path, const std::string& labels_path,
                      std::optional<std::int64_t> limit) {
    std::ifstream images(images_path, std::ios::binary);
    if (!images) throw IoError("cannot open " + images_path);
    std::ifstream labels(labels_path, std::ios::binary);
    if (!labels) throw IoError("cannot open " + labels_path);

    const std::uint32_t img_magic = read_u32_be(images, images_path);
    if (img_magic != kIdxImagesMagic) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "0x%08X", img_magic);
        throw FormatError("bad image magic " + std::string(buf) + " in " + images_path);
    }
    const std::uint32_t img_count = read_u32_be(images, images_path);
    const std::uint32_t rows = read_u32_be(images, images_path);
    const std::uint32_t cols = read_u32_be(images, images_path);

    const std::uint32_t lbl_magic = read_u32_be(labels, labels_path);
    if (lbl_magic != kIdxLabelsMagic) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "0x%08X", lbl_magic);
        throw FormatError("bad label magic " + std::string(buf) + " in " + labels_path);
    }
    const std::uint32_t lbl_count = read_u32_be(labels, labels_path);

    if (img_count != lbl_count) {
        throw FormatError("image count " + std::to_string(img_count) +
                          " does not match label count " + std::to_string(lbl_count));
    }

    std::int64_t n = static_cast<std::int64_t>(img_count);
    if (limit && *limit >= 0 && *limit < n) n = *limit;
    const std::int64_t d = static_cast<std::int64_t>(rows) * static_cast<std::int64_t>(cols);

    Dataset out;
    out.features = Matrix(n, d);
    out.labels.resize(static_cast<std::size_t>(n));

    std::vector<unsigned char> pixel_row(static_cast<std::size_t>(d));
    for (std::int64_t i = 0; i < n; ++i) {
        images.read(reinterpret_cast<char*>(pixel_row.data()),
                    static_cast<std::streamsize>(pixel_row.size()));
        if (!images) throw IoError("truncated image data in " + images_path);
        auto dst = out.features.row(i);
        for (std::int64_t j = 0; j < d; ++j) {
            dst[static_cast<std::size_t>(j)] =
                static_cast<double>(pixel_row[static_cast<std::size_t>(j)]) / 255.0;
        }
        unsigned char lbl = 0;
        labels.read(reinterpret_cast<char*>(&lbl), 1);
        if (!labels) throw IoError("truncated label data in " + labels_path);
        out.labels[static_cast<std::size_t>(i)] = static_cast<int>(lbl);
    }

    int max_label = 0;
    for (int l : out.labels) max_label = std::max(max_label, l);
    out.class_count = std::max<std::int64_t>(max_label + 1, 2);
    return out;
}

} // namespace alearn
