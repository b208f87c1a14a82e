#include "iris/pipeline.hpp"

#include <cmath>

namespace iris {

IrisCode encode_eye_image(const EyeImage& image, const PipelineConfig& config,
                          const std::string& source_id) {
    PupilDescriptor pupil = detect_pupil(image);
    EyeImage roi = crop_roi(image, pupil, config.margin_factor);
    // the crop centers the rounded pupil center on the ROI midpoint; keep the
    // sub-pixel remainder
    PupilDescriptor centered = pupil;
    centered.center_x = roi.width / 2.0 + (pupil.center_x - std::lround(pupil.center_x));
    centered.center_y = roi.height / 2.0 + (pupil.center_y - std::lround(pupil.center_y));
    PolarImage polar = unwrap_polar(roi, centered, config.radial_resolution);
    LimbicBoundary boundary = find_limbic_boundary(polar, config.segmentation);
    SegmentedPolar band = extract_band(polar, boundary);
    IrisCode code = encode(band, config.gabor);
    code.source_id = source_id;
    return code;
}

IrisCode load_template(const std::string& path, const PipelineConfig& config,
                       const std::string& source_id) {
    if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".ic01") == 0) {
        IrisCode code = load_code(path);
        if (!source_id.empty())
            code.source_id = source_id;
        return code;
    }
    return encode_eye_image(load_image(path), config, source_id);
}

} // namespace iris
