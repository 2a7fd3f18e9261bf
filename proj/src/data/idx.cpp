#include "goldlab/idx.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>

#include "goldlab/errors.hpp"

namespace goldlab::data {

namespace {

constexpr std::uint32_t kImageMagic = 2051;  // 0x00000803
constexpr std::uint32_t kLabelMagic = 2049;  // 0x00000801

std::uint32_t read_u32_be(std::ifstream& in, std::size_t& offset, const char* what) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) throw FormatError(std::string("idx: truncated while reading ") + what, offset);
    offset += 4;
    return (static_cast<std::uint32_t>(b[0]) << 24) | (static_cast<std::uint32_t>(b[1]) << 16) |
           (static_cast<std::uint32_t>(b[2]) << 8) | static_cast<std::uint32_t>(b[3]);
}

void write_u32_be(std::ofstream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v >> 24), static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

}  // namespace

std::vector<LabeledPoint> load_idx(const std::string& images_path,
                                   const std::string& labels_path) {
    std::ifstream images(images_path, std::ios::binary);
    if (!images) throw FormatError("idx: cannot open " + images_path, 0);
    std::size_t img_off = 0;
    const std::uint32_t img_magic = read_u32_be(images, img_off, "image magic");
    if (img_magic != kImageMagic)
        throw FormatError("idx: bad image magic " + std::to_string(img_magic) + " (want 2051)",
                          img_off - 4);
    const std::uint32_t count = read_u32_be(images, img_off, "image count");
    const std::uint32_t rows = read_u32_be(images, img_off, "image rows");
    const std::uint32_t cols = read_u32_be(images, img_off, "image cols");

    std::ifstream labels(labels_path, std::ios::binary);
    if (!labels) throw FormatError("idx: cannot open " + labels_path, 0);
    std::size_t lab_off = 0;
    const std::uint32_t lab_magic = read_u32_be(labels, lab_off, "label magic");
    if (lab_magic != kLabelMagic)
        throw FormatError("idx: bad label magic " + std::to_string(lab_magic) + " (want 2049)",
                          lab_off - 4);
    const std::uint32_t lab_count = read_u32_be(labels, lab_off, "label count");
    if (lab_count != count)
        throw FormatError("idx: image count " + std::to_string(count) + " != label count " +
                              std::to_string(lab_count),
                          lab_off - 4);

    const std::size_t pixels = static_cast<std::size_t>(rows) * cols;
    std::vector<LabeledPoint> out(count);
    std::vector<unsigned char> buf(pixels);
    for (std::uint32_t i = 0; i < count; ++i) {
        images.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(pixels));
        if (!images) throw FormatError("idx: truncated image payload", img_off);
        img_off += pixels;
        auto& p = out[i];
        p.x.resize(pixels);
        for (std::size_t j = 0; j < pixels; ++j) p.x[j] = buf[j] / 255.0;
        const int label = labels.get();
        if (label == EOF) throw FormatError("idx: truncated label payload", lab_off);
        ++lab_off;
        p.label = label;
    }
    return out;
}

void write_idx(const std::string& images_path, const std::string& labels_path,
               const std::vector<LabeledPoint>& points, std::size_t rows, std::size_t cols) {
    const std::size_t pixels = rows * cols;
    std::ofstream images(images_path, std::ios::binary);
    if (!images) throw FormatError("idx: cannot open " + images_path + " for writing", 0);
    write_u32_be(images, kImageMagic);
    write_u32_be(images, static_cast<std::uint32_t>(points.size()));
    write_u32_be(images, static_cast<std::uint32_t>(rows));
    write_u32_be(images, static_cast<std::uint32_t>(cols));
    std::ofstream labels(labels_path, std::ios::binary);
    if (!labels) throw FormatError("idx: cannot open " + labels_path + " for writing", 0);
    write_u32_be(labels, kLabelMagic);
    write_u32_be(labels, static_cast<std::uint32_t>(points.size()));
    for (const auto& p : points) {
        if (p.x.size() != pixels)
            throw DimensionError("write_idx: sample has " + std::to_string(p.x.size()) +
                                 " pixels, expected " + std::to_string(pixels));
        for (double v : p.x) {
            const int byte = static_cast<int>(std::lround(v * 255.0));
            images.put(static_cast<char>(std::min(255, std::max(0, byte))));
        }
        labels.put(static_cast<char>(p.label));
    }
}

}  // namespace goldlab::data
