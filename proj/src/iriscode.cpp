#include "iris/iriscode.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace iris {

std::size_t BitGrid::popcount() const {
    std::size_t total = 0;
    std::size_t i = 0;
    const std::size_t n = bytes_.size();
    for (; i + 8 <= n; i += 8) {
        std::uint64_t w;
        std::memcpy(&w, bytes_.data() + i, 8);
        total += static_cast<std::size_t>(std::popcount(w));
    }
    for (; i < n; ++i)
        total += static_cast<std::size_t>(std::popcount(static_cast<unsigned>(bytes_[i])));
    return total;
}

BitGrid BitGrid::rotated_cols(int k) const {
    BitGrid out(rows_, cols_);
    if (cols_ == 0)
        return out;
    k = ((k % cols_) + cols_) % cols_;
    for (int r = 0; r < rows_; ++r)
        for (int c = 0; c < cols_; ++c)
            if (get(r, c))
                out.set(r, (c + k) % cols_, true);
    return out;
}

BitGrid BitGrid::complemented() const {
    BitGrid out(rows_, cols_);
    for (std::size_t i = 0; i < bytes_.size(); ++i)
        out.bytes_[i] = static_cast<std::uint8_t>(~bytes_[i]);
    // clear padding bits in the last byte
    std::size_t used = bit_count() & 7;
    if (used != 0)
        out.bytes_.back() &= static_cast<std::uint8_t>(0xFF << (8 - used));
    return out;
}

namespace {

constexpr char kMagic[8] = {'I', 'R', 'I', 'S', 'C', 'D', '0', '1'};

void write_u16(std::ostream& out, std::uint16_t v) {
    char b[2] = {static_cast<char>(v & 0xFF), static_cast<char>(v >> 8)};
    out.write(b, 2);
}

std::uint16_t read_u16(std::istream& in) {
    unsigned char b[2];
    in.read(reinterpret_cast<char*>(b), 2);
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

} // namespace

void save_code(const IrisCode& code, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write " + path);
    out.write(kMagic, 8);
    write_u16(out, static_cast<std::uint16_t>(code.rows()));
    write_u16(out, static_cast<std::uint16_t>(code.cols()));
    out.write(reinterpret_cast<const char*>(code.bits.bytes().data()),
              static_cast<std::streamsize>(code.bits.bytes().size()));
    out.write(reinterpret_cast<const char*>(code.mask.bytes().data()),
              static_cast<std::streamsize>(code.mask.bytes().size()));
    write_u16(out, static_cast<std::uint16_t>(code.source_id.size()));
    out.write(code.source_id.data(), static_cast<std::streamsize>(code.source_id.size()));
    if (!out)
        throw IoError("write failed for " + path);
}

IrisCode load_code(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw FileNotFound("cannot open " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kMagic, 8) != 0)
        throw MalformedImage(path + ": not an IC01 iris code file");
    int rows = read_u16(in);
    int cols = read_u16(in);
    if (rows <= 0 || cols <= 0)
        throw MalformedImage(path + ": bad code dimensions");

    IrisCode code;
    code.bits = BitGrid(rows, cols);
    code.mask = BitGrid(rows, cols);
    auto read_block = [&](BitGrid& grid) {
        in.read(reinterpret_cast<char*>(grid.bytes().data()),
                static_cast<std::streamsize>(grid.bytes().size()));
        if (static_cast<std::size_t>(in.gcount()) != grid.bytes().size())
            throw MalformedImage(path + ": truncated bit block");
    };
    read_block(code.bits);
    read_block(code.mask);
    std::uint16_t len = read_u16(in);
    if (!in)
        throw MalformedImage(path + ": truncated label length");
    code.source_id.resize(len);
    in.read(code.source_id.data(), len);
    if (static_cast<std::size_t>(in.gcount()) != len)
        throw MalformedImage(path + ": truncated label");
    return code;
}

EyeImage code_to_image(const IrisCode& code) {
    EyeImage img;
    img.width = code.cols();
    img.height = code.rows();
    img.kind = ImageKind::RectilinearFull;
    img.pixels.resize(static_cast<std::size_t>(img.width) * img.height);
    for (int r = 0; r < code.rows(); ++r)
        for (int c = 0; c < code.cols(); ++c)
            img.at(c, r) = code.bits.get(r, c) ? 255 : 0;
    return img;
}

IrisCode image_to_code(const EyeImage& image) {
    IrisCode code;
    code.bits = BitGrid(image.height, image.width);
    code.mask = BitGrid(image.height, image.width);
    for (int r = 0; r < image.height; ++r)
        for (int c = 0; c < image.width; ++c) {
            code.bits.set(r, c, image.at(c, r) >= 128);
            code.mask.set(r, c, true);
        }
    return code;
}

} // namespace iris
