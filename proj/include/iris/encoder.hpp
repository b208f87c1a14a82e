#pragma once

#include "iris/iriscode.hpp"
#include "iris/segmentation.hpp"

namespace iris {

struct LogGaborParams {
    double center_wavelength = 18.0; // pixels along the angular axis
    double sigma_over_f0 = 0.55;
};

/// Phase-encodes the band row by row with a 1-D Log-Gabor filter along the
/// angular axis (frequency domain, analytic signal); bit = sign of the real
/// part of the response. Constant rows encode as zero bits with cleared mask.
IrisCode encode(const SegmentedPolar& band, const LogGaborParams& params = {});

} // namespace iris
