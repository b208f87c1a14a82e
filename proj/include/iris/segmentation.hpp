#pragma once

#include <array>
#include <string>
#include <vector>

#include "iris/image.hpp"

namespace iris {

inline constexpr int kBandRows = 32;
inline constexpr int kMinBandRadius = 8;

/// Outer iris/sclera boundary located in a polar image, one radial row index
/// per angle column.
struct LimbicBoundary {
    std::vector<int> radius_per_column; // size kAngularResolution
    bool smoothed = false;
    double mean_radius = 0.0;
};

/// Iris band between the pupil boundary (row 0) and the limbic boundary,
/// radially resampled to exactly kBandRows x kAngularResolution.
struct SegmentedPolar {
    std::vector<std::uint8_t> band;       // kBandRows x kAngularResolution
    std::vector<std::uint8_t> valid_mask; // 1 where every source sample was in-bounds

    std::uint8_t at(int row, int col) const {
        return band[static_cast<std::size_t>(row) * kAngularResolution + col];
    }
    bool valid_at(int row, int col) const {
        return valid_mask[static_cast<std::size_t>(row) * kAngularResolution + col] != 0;
    }
    double valid_fraction() const;
};

struct SegmentationConfig {
    // optional polar pre-blur before boundary detection, disabled by default
    double pre_blur_sigma = 0.0;
};

/// Locates the pupil as the largest dark, roughly circular connected
/// component, with a least-squares circle fit to its boundary pixels.
PupilDescriptor detect_pupil(const EyeImage& image);

/// Per-column gradient-peak boundary with fuzzy two-cluster outlier rejection
/// and circular smoothing.
LimbicBoundary find_limbic_boundary(const PolarImage& polar,
                                    const SegmentationConfig& config = {});

/// Resamples rows [0, radius_per_column) of each column to kBandRows rows.
SegmentedPolar extract_band(const PolarImage& polar, const LimbicBoundary& boundary);

/// Writes the band as PGM plus a 0/255 validity sidecar at <path>.mask.pgm.
void save_segmented(const SegmentedPolar& band, const std::string& path);

} // namespace iris
