#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "iris/errors.hpp"

namespace iris {

enum class ImageKind { RectilinearFull, RectilinearRoi };

/// 8-bit grayscale rectilinear eye image.
struct EyeImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels; // row-major
    ImageKind kind = ImageKind::RectilinearFull;

    std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
};

/// Pupil-centered polar unwrapping of an eye image.
/// Row 0 samples the pupil boundary radius; radius grows with the row index.
/// Columns sample angles theta_a = 2*pi*a/angular_resolution.
struct PolarImage {
    int angular_resolution = 0; // columns
    int radial_resolution = 0;  // rows
    std::vector<std::uint8_t> pixels; // row-major, radial_resolution x angular_resolution
    std::vector<std::uint8_t> valid;  // 1 where the sample came from inside the source image
    double pupil_center_x = 0.0;
    double pupil_center_y = 0.0;
    double pupil_radius = 0.0;

    std::uint8_t at(int row, int col) const {
        return pixels[static_cast<std::size_t>(row) * angular_resolution + col];
    }
    bool valid_at(int row, int col) const {
        return valid[static_cast<std::size_t>(row) * angular_resolution + col] != 0;
    }
};

struct PupilDescriptor {
    double center_x = 0.0;
    double center_y = 0.0;
    double radius = 0.0;
    double boundary_confidence = 0.0; // in [0,1]
};

inline constexpr int kAngularResolution = 360;
inline constexpr int kDefaultRadialResolution = 128;

// Binary PGM (P5, maxval 255) container.
EyeImage load_image(const std::string& path);
void save_image(const EyeImage& image, const std::string& path);

void save_polar(const PolarImage& polar, const std::string& path);

/// Square crop of side 2*margin_factor*pupil.radius centered on the pupil.
/// Out-of-bounds regions are zero-filled.
EyeImage crop_roi(const EyeImage& image, const PupilDescriptor& pupil, double margin_factor);

/// Unwraps the annulus outside the pupil boundary onto an angle x radius grid
/// by bilinear interpolation; the outermost row reaches the nearest image edge.
PolarImage unwrap_polar(const EyeImage& image, const PupilDescriptor& pupil,
                        int radial_resolution);

} // namespace iris
