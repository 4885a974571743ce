#include "qcnn/mnist.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "qcnn/errors.hpp"
#include "qcnn/metrics.hpp"
#include "qcnn/rng.hpp"

namespace qcnn {

namespace {

std::uint32_t read_be32(std::span<const std::uint8_t> bytes, std::size_t offset) {
    if (offset + 4 > bytes.size()) {
        throw data_error("idx parse error at byte " + std::to_string(offset) +
                         ": truncated header");
    }
    return (std::uint32_t(bytes[offset]) << 24) | (std::uint32_t(bytes[offset + 1]) << 16) |
           (std::uint32_t(bytes[offset + 2]) << 8) | std::uint32_t(bytes[offset + 3]);
}

void write_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

std::string hex32(std::uint32_t v) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "0x%08x", v);
    return buf;
}

} // namespace

bool is_gzip(std::span<const std::uint8_t> bytes) {
    return bytes.size() >= 2 && bytes[0] == 0x1f && bytes[1] == 0x8b;
}

std::vector<std::uint8_t> gunzip(std::span<const std::uint8_t> bytes) {
    z_stream zs{};
    if (inflateInit2(&zs, 15 + 16) != Z_OK) {
        throw data_error("gunzip: inflateInit2 failed");
    }
    std::vector<std::uint8_t> out;
    out.reserve(bytes.size() * 4);
    std::uint8_t chunk[1 << 15];
    zs.next_in = const_cast<Bytef*>(bytes.data());
    zs.avail_in = static_cast<uInt>(bytes.size());
    int rc = Z_OK;
    do {
        zs.next_out = chunk;
        zs.avail_out = sizeof(chunk);
        rc = inflate(&zs, Z_NO_FLUSH);
        if (rc != Z_OK && rc != Z_STREAM_END) {
            inflateEnd(&zs);
            throw data_error("gunzip: corrupt stream (zlib rc " + std::to_string(rc) + ")");
        }
        out.insert(out.end(), chunk, chunk + (sizeof(chunk) - zs.avail_out));
    } while (rc != Z_STREAM_END);
    inflateEnd(&zs);
    return out;
}

std::vector<std::uint8_t> gzip_compress(std::span<const std::uint8_t> bytes) {
    z_stream zs{};
    if (deflateInit2(&zs, Z_DEFAULT_COMPRESSION, Z_DEFLATED, 15 + 16, 8,
                     Z_DEFAULT_STRATEGY) != Z_OK) {
        throw data_error("gzip: deflateInit2 failed");
    }
    std::vector<std::uint8_t> out;
    std::uint8_t chunk[1 << 15];
    zs.next_in = const_cast<Bytef*>(bytes.data());
    zs.avail_in = static_cast<uInt>(bytes.size());
    int rc = Z_OK;
    do {
        zs.next_out = chunk;
        zs.avail_out = sizeof(chunk);
        rc = deflate(&zs, Z_FINISH);
        if (rc == Z_STREAM_ERROR) {
            deflateEnd(&zs);
            throw data_error("gzip: deflate failed");
        }
        out.insert(out.end(), chunk, chunk + (sizeof(chunk) - zs.avail_out));
    } while (rc != Z_STREAM_END);
    deflateEnd(&zs);
    return out;
}

IdxImages parse_idx_images(std::span<const std::uint8_t> raw) {
    std::vector<std::uint8_t> inflated;
    std::span<const std::uint8_t> bytes = raw;
    if (is_gzip(raw)) {
        inflated = gunzip(raw);
        bytes = inflated;
    }
    const std::uint32_t magic = read_be32(bytes, 0);
    if (magic != kIdxImageMagic) {
        throw data_error("idx parse error at byte 0: expected image magic " +
                         hex32(kIdxImageMagic) + ", got " + hex32(magic));
    }
    IdxImages out;
    out.count = read_be32(bytes, 4);
    out.rows = read_be32(bytes, 8);
    out.cols = read_be32(bytes, 12);
    if (out.rows == 0 || out.cols == 0) {
        throw data_error("idx parse error at byte 8: zero image dimensions");
    }
    const std::size_t want = std::size_t{16} + std::size_t{out.count} * out.rows * out.cols;
    if (bytes.size() != want) {
        throw data_error("idx parse error at byte " + std::to_string(bytes.size()) +
                         ": payload length " + std::to_string(bytes.size() - 16) +
                         " does not match count*rows*cols = " + std::to_string(want - 16));
    }
    out.pixels.assign(bytes.begin() + 16, bytes.end());
    return out;
}

IdxLabels parse_idx_labels(std::span<const std::uint8_t> raw) {
    std::vector<std::uint8_t> inflated;
    std::span<const std::uint8_t> bytes = raw;
    if (is_gzip(raw)) {
        inflated = gunzip(raw);
        bytes = inflated;
    }
    const std::uint32_t magic = read_be32(bytes, 0);
    if (magic != kIdxLabelMagic) {
        throw data_error("idx parse error at byte 0: expected label magic " +
                         hex32(kIdxLabelMagic) + ", got " + hex32(magic));
    }
    IdxLabels out;
    out.count = read_be32(bytes, 4);
    const std::size_t want = std::size_t{8} + out.count;
    if (bytes.size() != want) {
        throw data_error("idx parse error at byte " + std::to_string(bytes.size()) +
                         ": payload length " + std::to_string(bytes.size() - 8) +
                         " does not match count = " + std::to_string(out.count));
    }
    out.labels.assign(bytes.begin() + 8, bytes.end());
    return out;
}

std::vector<std::uint8_t> serialize_idx_images(const IdxImages& images) {
    if (images.pixels.size() != std::size_t{images.count} * images.rows * images.cols) {
        throw data_error("serialize_idx_images: pixel buffer does not match dimensions");
    }
    std::vector<std::uint8_t> out;
    out.reserve(16 + images.pixels.size());
    write_be32(out, kIdxImageMagic);
    write_be32(out, images.count);
    write_be32(out, images.rows);
    write_be32(out, images.cols);
    out.insert(out.end(), images.pixels.begin(), images.pixels.end());
    return out;
}

std::vector<std::uint8_t> serialize_idx_labels(const IdxLabels& labels) {
    if (labels.labels.size() != labels.count) {
        throw data_error("serialize_idx_labels: label buffer does not match count");
    }
    std::vector<std::uint8_t> out;
    out.reserve(8 + labels.labels.size());
    write_be32(out, kIdxLabelMagic);
    write_be32(out, labels.count);
    out.insert(out.end(), labels.labels.begin(), labels.labels.end());
    return out;
}

RawMnist load_raw_split(const std::filesystem::path& images_file,
                        const std::filesystem::path& labels_file) {
    RawMnist raw;
    raw.images = parse_idx_images(read_binary_file(images_file));
    raw.labels = parse_idx_labels(read_binary_file(labels_file));
    if (raw.images.count != raw.labels.count) {
        throw data_error("mnist: image count " + std::to_string(raw.images.count) +
                         " does not match label count " + std::to_string(raw.labels.count));
    }
    return raw;
}

std::array<double, 8> block_average_features(std::span<const std::uint8_t> image) {
    if (image.size() != 784) {
        throw data_error("block_average_features: expected 28x28 image");
    }
    // 4 block rows of 7 pixels, 2 block cols of 14 pixels
    std::array<double, 8> out{};
    for (int br = 0; br < 4; ++br) {
        for (int bc = 0; bc < 2; ++bc) {
            double acc = 0.0;
            for (int r = 0; r < 7; ++r) {
                for (int c = 0; c < 14; ++c) {
                    acc += image[static_cast<std::size_t>(br * 7 + r) * 28 + (bc * 14 + c)];
                }
            }
            out[static_cast<std::size_t>(br * 2 + bc)] = acc / (7.0 * 14.0);
        }
    }
    return out;
}

namespace {

struct Picked {
    std::vector<int> indices; // into the raw split
};

Picked pick_balanced(const RawMnist& raw, int digit0, int digit1, int want, Rng& rng,
                     const char* split_name) {
    std::vector<int> cand0, cand1;
    for (std::uint32_t i = 0; i < raw.labels.count; ++i) {
        if (raw.labels.labels[i] == digit0) cand0.push_back(static_cast<int>(i));
        if (raw.labels.labels[i] == digit1) cand1.push_back(static_cast<int>(i));
    }
    const int want0 = (want + 1) / 2; // label-0 digit takes the extra when odd
    const int want1 = want / 2;
    if (static_cast<int>(cand0.size()) < want0 || static_cast<int>(cand1.size()) < want1) {
        throw data_error(std::string("preprocess: ") + split_name + " split has only " +
                         std::to_string(cand0.size()) + " images of digit " +
                         std::to_string(digit0) + " and " + std::to_string(cand1.size()) +
                         " of digit " + std::to_string(digit1) + ", need " +
                         std::to_string(want0) + "+" + std::to_string(want1));
    }
    rng.shuffle(cand0);
    rng.shuffle(cand1);
    Picked p;
    p.indices.assign(cand0.begin(), cand0.begin() + want0);
    p.indices.insert(p.indices.end(), cand1.begin(), cand1.begin() + want1);
    rng.shuffle(p.indices);
    return p;
}

Sample make_sample(const RawMnist& raw, int index, int digit0, bool from_test) {
    Sample s;
    const std::uint8_t* px = raw.images.pixels.data() + static_cast<std::size_t>(index) * 784;
    s.image.resize(784);
    for (int i = 0; i < 784; ++i) s.image[static_cast<std::size_t>(i)] = px[i] / 255.0;
    const auto feats = block_average_features(std::span<const std::uint8_t>(px, 784));
    s.features.assign(feats.begin(), feats.end()); // raw scale; rescaled later
    s.source_digit = raw.labels.labels[static_cast<std::size_t>(index)];
    s.label = s.source_digit == digit0 ? 0 : 1;
    s.source_index = index;
    s.from_test_file = from_test;
    return s;
}

} // namespace

Dataset preprocess(const RawMnist& train_raw, const RawMnist& test_raw,
                   const PreprocessOptions& opts) {
    constexpr double pi = std::numbers::pi;
    if (opts.train_size < 1 || opts.test_size < 1) {
        throw config_error("preprocess: train_size and test_size must be >= 1");
    }
    if (opts.digit_label0 == opts.digit_label1 || opts.digit_label0 < 0 || opts.digit_label0 > 9 ||
        opts.digit_label1 < 0 || opts.digit_label1 > 9) {
        throw config_error("preprocess: digits must be two distinct values in 0..9");
    }
    if (train_raw.images.rows != 28 || train_raw.images.cols != 28 ||
        test_raw.images.rows != 28 || test_raw.images.cols != 28) {
        throw data_error("preprocess: expected 28x28 images");
    }

    Rng rng(opts.seed);
    const Picked train_pick =
        pick_balanced(train_raw, opts.digit_label0, opts.digit_label1, opts.train_size, rng, "train");
    const Picked test_pick =
        pick_balanced(test_raw, opts.digit_label0, opts.digit_label1, opts.test_size, rng, "test");

    Dataset ds;
    ds.train.reserve(train_pick.indices.size());
    for (int idx : train_pick.indices) {
        ds.train.push_back(make_sample(train_raw, idx, opts.digit_label0, false));
    }
    ds.test.reserve(test_pick.indices.size());
    for (int idx : test_pick.indices) {
        ds.test.push_back(make_sample(test_raw, idx, opts.digit_label0, true));
    }

    // Per-feature affine rescale to [0, pi]; statistics from the train split only.
    std::array<double, 8> lo{}, hi{};
    lo.fill(std::numeric_limits<double>::infinity());
    hi.fill(-std::numeric_limits<double>::infinity());
    for (const Sample& s : ds.train) {
        for (int k = 0; k < 8; ++k) {
            lo[static_cast<std::size_t>(k)] = std::min(lo[static_cast<std::size_t>(k)], s.features[static_cast<std::size_t>(k)]);
            hi[static_cast<std::size_t>(k)] = std::max(hi[static_cast<std::size_t>(k)], s.features[static_cast<std::size_t>(k)]);
        }
    }
    std::array<bool, 8> degenerate{};
    for (int k = 0; k < 8; ++k) {
        if (hi[static_cast<std::size_t>(k)] <= lo[static_cast<std::size_t>(k)]) {
            degenerate[static_cast<std::size_t>(k)] = true;
            ds.provenance.warnings.push_back("feature " + std::to_string(k) +
                                             " is constant on the train split; mapped to 0");
        }
    }
    const auto rescale = [&](Sample& s) {
        for (int k = 0; k < 8; ++k) {
            const std::size_t ks = static_cast<std::size_t>(k);
            if (degenerate[ks]) {
                s.features[ks] = 0.0;
                continue;
            }
            double v = (s.features[ks] - lo[ks]) / (hi[ks] - lo[ks]) * pi;
            s.features[ks] = std::clamp(v, 0.0, pi);
        }
    };
    for (Sample& s : ds.train) rescale(s);
    for (Sample& s : ds.test) rescale(s);

    ds.provenance.subset_seed = opts.seed;
    ds.provenance.train_size = opts.train_size;
    ds.provenance.test_size = opts.test_size;
    ds.provenance.digit_label0 = opts.digit_label0;
    ds.provenance.digit_label1 = opts.digit_label1;
    return ds;
}

} // namespace qcnn
