#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "iris/errors.hpp"
#include "iris/image.hpp"

namespace iris {

/// Row-major bit matrix, packed MSB-first within bytes. Padding bits in the
/// last byte (non-default sizes only) are kept zero and excluded from counts.
class BitGrid {
public:
    BitGrid() = default;
    BitGrid(int rows, int cols)
        : rows_(rows), cols_(cols),
          bytes_((static_cast<std::size_t>(rows) * cols + 7) / 8, 0) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::size_t bit_count() const { return static_cast<std::size_t>(rows_) * cols_; }
    const std::vector<std::uint8_t>& bytes() const { return bytes_; }
    std::vector<std::uint8_t>& bytes() { return bytes_; }

    bool get(int row, int col) const {
        std::size_t i = static_cast<std::size_t>(row) * cols_ + col;
        return (bytes_[i >> 3] >> (7 - (i & 7))) & 1;
    }
    void set(int row, int col, bool v) {
        std::size_t i = static_cast<std::size_t>(row) * cols_ + col;
        std::uint8_t m = static_cast<std::uint8_t>(1u << (7 - (i & 7)));
        if (v)
            bytes_[i >> 3] |= m;
        else
            bytes_[i >> 3] &= static_cast<std::uint8_t>(~m);
    }

    std::size_t popcount() const;

    /// Per-row circular shift: output column (c + k) mod cols takes the input
    /// at column c.
    BitGrid rotated_cols(int k) const;

    BitGrid complemented() const; // padding stays zero

    bool operator==(const BitGrid& other) const = default;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<std::uint8_t> bytes_;
};

struct IrisCode {
    BitGrid bits;
    BitGrid mask;
    std::string source_id;

    int rows() const { return bits.rows(); }
    int cols() const { return bits.cols(); }
    bool accepted() const { return mask.popcount() * 2 >= bits.bit_count(); }
};

inline constexpr int kCodeRows = 32;
inline constexpr int kCodeCols = 360;
inline constexpr std::size_t kCodeBits = 11520;

// "IC01" container: magic "IRISCD01", u16 rows, u16 cols (LE), code bits,
// mask bits (both row-major, MSB-first), u16 label length + UTF-8 label.
void save_code(const IrisCode& code, const std::string& path);
IrisCode load_code(const std::string& path);

/// cols x rows binary image, bit 1 -> 255.
EyeImage code_to_image(const IrisCode& code);
IrisCode image_to_code(const EyeImage& image);

} // namespace iris
