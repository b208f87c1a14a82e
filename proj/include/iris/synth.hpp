#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "iris/image.hpp"
#include "iris/sigset.hpp"

namespace iris {

enum class DefectKind { DilatedPupil, Occlusion, GazeShift, NoIris };

struct SensorProfile {
    std::string name;
    double blur_sigma = 0.0;      // pixels
    double noise_sigma = 0.0;     // gray levels
    bool interlace = false;       // duplicate alternate rows
    double contrast_scale = 1.0;  // around mid-gray
};

SensorProfile default_sensor_a(); // crisp, modern-sensor profile
SensorProfile default_sensor_b(); // blurred, noisy, interlaced profile

struct SynthConfig {
    int n_identities = 20;
    int samples_per_identity_per_sensor = 2;
    std::uint64_t seed = 1;
    std::map<DefectKind, double> defect_rates; // probability per sample
    double mislabel_rate = 0.0;                // per enrollment entry
    double imposter_fraction = 1.0;            // sampling of cross-identity pairs
    SensorProfile sensor_a = default_sensor_a();
    SensorProfile sensor_b = default_sensor_b();
    int image_width = 640;
    int image_height = 480;
};

/// Band-limited angular-radial texture, deterministic in (seed, identity).
struct IdentityTexture {
    int rows = 0;
    int cols = 0;
    std::vector<std::uint8_t> values;

    std::uint8_t at(int row, int col) const {
        return values[static_cast<std::size_t>(row) * cols + col];
    }
};

IdentityTexture generate_identity_texture(std::uint64_t seed, int identity_index);

struct RenderInfo {
    double pupil_center_x = 0.0;
    double pupil_center_y = 0.0;
    double pupil_radius = 0.0;
    double iris_radius = 0.0;
};

/// Renders one eye image (pupil disc, textured iris annulus, sclera) and
/// applies the profile degradations and requested defects.
EyeImage render_sample(const IdentityTexture& texture, const SensorProfile& profile,
                       std::uint64_t seed, std::uint64_t sample_key,
                       const std::set<DefectKind>& defects, int width = 640, int height = 480,
                       RenderInfo* info = nullptr);

struct SwapRecord {
    std::string template_id;
    std::string true_identity;
    std::string declared_identity;
};

struct MislabeledComparison {
    std::string probe_template_id;
    std::string enrolled_template_id;
    ComparisonLabel declared_label = ComparisonLabel::Genuine;
    ComparisonLabel true_label = ComparisonLabel::Genuine;
};

struct SynthDataset {
    SigSet sigset;
    std::vector<SwapRecord> swaps;
    std::vector<MislabeledComparison> mislabeled;
};

/// Writes out_dir/enroll/*.pgm (sensor A), out_dir/probe/*.pgm (sensor B),
/// out_dir/sigset.csv, out_dir/ground_truth_swaps.csv. Fully reproducible
/// from config.seed.
SynthDataset generate_dataset(const SynthConfig& config, const std::string& out_dir);

} // namespace iris
