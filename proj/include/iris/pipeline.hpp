#pragma once

#include <string>

#include "iris/encoder.hpp"
#include "iris/image.hpp"
#include "iris/segmentation.hpp"

namespace iris {

struct PipelineConfig {
    double margin_factor = 4.0;      // ROI half-side in pupil radii
    int radial_resolution = kDefaultRadialResolution;
    LogGaborParams gabor;
    SegmentationConfig segmentation;
    int max_shift = 0;
    bool use_masks = false;
    int threads = 1;
};

/// Full template pipeline: pupil detection, ROI crop, polar unwrapping,
/// limbic segmentation, Log-Gabor encoding. Throws the failing stage's error.
IrisCode encode_eye_image(const EyeImage& image, const PipelineConfig& config,
                          const std::string& source_id = "");

/// Loads a template file: .ic01 iris codes directly, anything else through
/// the image pipeline.
IrisCode load_template(const std::string& path, const PipelineConfig& config,
                       const std::string& source_id = "");

} // namespace iris
