#include "iris/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "iris/rng.hpp"

namespace iris {

namespace {

// key-chain tags, arbitrary distinct constants
enum : std::uint64_t {
    kKeyTexture = 0x7458,
    kKeyGeometry = 0x67656f,
    kKeyNoise = 0x6e6f69,
    kKeyDefect = 0x646566,
    kKeyImposter = 0x696d70,
    kKeyMislabel = 0x6d6973,
};

constexpr int kTextureRows = 48;
constexpr int kTextureCols = 360;
constexpr double kScleraIntensity = 205.0;
constexpr double kPupilIntensity = 12.0;
constexpr double kIrisOverPupil = 2.2; // iris outer radius in pupil radii

void gaussian_blur(std::vector<double>& img, int w, int h, double sigma) {
    if (sigma <= 0.0)
        return;
    int half = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> kernel(2 * half + 1);
    double sum = 0.0;
    for (int i = -half; i <= half; ++i)
        sum += kernel[i + half] = std::exp(-0.5 * i * i / (sigma * sigma));
    for (double& k : kernel)
        k /= sum;

    std::vector<double> tmp(img.size());
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -half; i <= half; ++i)
                acc += kernel[i + half] * img[static_cast<std::size_t>(y) * w +
                                              std::clamp(x + i, 0, w - 1)];
            tmp[static_cast<std::size_t>(y) * w + x] = acc;
        }
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -half; i <= half; ++i)
                acc += kernel[i + half] * tmp[static_cast<std::size_t>(std::clamp(y + i, 0, h - 1)) * w + x];
            img[static_cast<std::size_t>(y) * w + x] = acc;
        }
}

} // namespace

SensorProfile default_sensor_a() { return {"sensor-a", 0.5, 2.0, false, 1.0}; }
SensorProfile default_sensor_b() { return {"sensor-b", 1.5, 6.0, true, 0.9}; }

IdentityTexture generate_identity_texture(std::uint64_t seed, int identity_index) {
    KeyedRng rng{seed, kKeyTexture, static_cast<std::uint64_t>(identity_index)};

    constexpr int n_harmonics = 12;
    struct Harmonic {
        double freq, amp, phase, radial_twist;
    };
    std::vector<Harmonic> harmonics(n_harmonics);
    for (auto& h : harmonics) {
        h.freq = static_cast<double>(6 + rng.uniform_int(35)); // cycles per revolution
        h.amp = rng.uniform_range(4.0, 10.0);
        h.phase = rng.uniform_range(0.0, 2.0 * M_PI);
        h.radial_twist = rng.uniform_range(-2.0 * M_PI, 2.0 * M_PI);
    }

    IdentityTexture tex;
    tex.rows = kTextureRows;
    tex.cols = kTextureCols;
    tex.values.resize(static_cast<std::size_t>(kTextureRows) * kTextureCols);
    for (int r = 0; r < kTextureRows; ++r) {
        double rn = static_cast<double>(r) / (kTextureRows - 1);
        for (int c = 0; c < kTextureCols; ++c) {
            double theta = 2.0 * M_PI * c / kTextureCols;
            double v = 140.0;
            for (const auto& h : harmonics)
                v += h.amp * std::cos(h.freq * theta + h.phase + h.radial_twist * rn);
            tex.values[static_cast<std::size_t>(r) * kTextureCols + c] =
                static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
        }
    }
    return tex;
}

EyeImage render_sample(const IdentityTexture& texture, const SensorProfile& profile,
                       std::uint64_t seed, std::uint64_t sample_key,
                       const std::set<DefectKind>& defects, int width, int height,
                       RenderInfo* info) {
    KeyedRng geom{seed, kKeyGeometry, sample_key};
    double cx = width / 2.0 + geom.uniform_range(-10.0, 10.0);
    double cy = height / 2.0 + geom.uniform_range(-10.0, 10.0);
    double pupil_r = geom.uniform_range(38.0, 50.0);
    if (defects.count(DefectKind::DilatedPupil))
        pupil_r *= 1.8;
    if (defects.count(DefectKind::GazeShift)) {
        cx += 55.0;
        cy += 35.0;
    }
    double iris_r = pupil_r * kIrisOverPupil;
    bool no_iris = defects.count(DefectKind::NoIris) > 0;

    std::vector<double> img(static_cast<std::size_t>(width) * height, kScleraIntensity);
    if (!no_iris) {
        auto tex_at = [&texture](double rn, double theta) {
            double tc = theta / (2.0 * M_PI) * texture.cols;
            double tr = rn * (texture.rows - 1);
            int r0 = std::clamp(static_cast<int>(std::floor(tr)), 0, texture.rows - 1);
            int r1 = std::min(r0 + 1, texture.rows - 1);
            int c0 = static_cast<int>(std::floor(tc)) % texture.cols;
            if (c0 < 0)
                c0 += texture.cols;
            int c1 = (c0 + 1) % texture.cols;
            double fr = tr - std::floor(tr);
            double fc = tc - std::floor(tc);
            return (1 - fr) * ((1 - fc) * texture.at(r0, c0) + fc * texture.at(r0, c1)) +
                   fr * ((1 - fc) * texture.at(r1, c0) + fc * texture.at(r1, c1));
        };
        const double aa = 0.75; // half-width of the edge blend, pixels
        int x0 = std::max(0, static_cast<int>(cx - iris_r - 2));
        int x1 = std::min(width - 1, static_cast<int>(cx + iris_r + 2));
        int y0 = std::max(0, static_cast<int>(cy - iris_r - 2));
        int y1 = std::min(height - 1, static_cast<int>(cy + iris_r + 2));
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                double d = std::hypot(x - cx, y - cy);
                if (d >= iris_r + aa)
                    continue;
                double theta = std::atan2(y - cy, x - cx);
                if (theta < 0)
                    theta += 2.0 * M_PI;
                double rn = std::clamp((d - pupil_r) / (iris_r - pupil_r), 0.0, 1.0);
                double iris_v = tex_at(rn, theta);
                double v;
                if (d < pupil_r - aa) {
                    v = kPupilIntensity;
                } else if (d < pupil_r + aa) {
                    double t = (d - (pupil_r - aa)) / (2.0 * aa);
                    v = (1 - t) * kPupilIntensity + t * iris_v;
                } else if (d < iris_r - aa) {
                    v = iris_v;
                } else {
                    double t = (d - (iris_r - aa)) / (2.0 * aa);
                    v = (1 - t) * iris_v + t * kScleraIntensity;
                }
                img[static_cast<std::size_t>(y) * width + x] = v;
            }
        }
        if (defects.count(DefectKind::Occlusion)) {
            // eyelid analog: a gray band across the upper part of the pupil
            int band_top = std::max(0, static_cast<int>(cy - pupil_r - 2));
            int band_bot = std::min(height - 1, static_cast<int>(cy - 0.4 * pupil_r));
            for (int y = band_top; y <= band_bot; ++y)
                for (int x = 0; x < width; ++x)
                    img[static_cast<std::size_t>(y) * width + x] = 185.0;
        }
    }

    gaussian_blur(img, width, height, profile.blur_sigma);

    KeyedRng noise{seed, kKeyNoise, sample_key};
    if (profile.noise_sigma > 0.0)
        for (double& v : img)
            v += profile.noise_sigma * noise.gaussian();

    if (profile.interlace)
        for (int y = 1; y < height; y += 2)
            for (int x = 0; x < width; ++x)
                img[static_cast<std::size_t>(y) * width + x] =
                    img[static_cast<std::size_t>(y - 1) * width + x];

    if (profile.contrast_scale != 1.0)
        for (double& v : img)
            v = 128.0 + profile.contrast_scale * (v - 128.0);

    EyeImage out;
    out.width = width;
    out.height = height;
    out.kind = ImageKind::RectilinearFull;
    out.pixels.resize(img.size());
    for (std::size_t i = 0; i < img.size(); ++i)
        out.pixels[i] = static_cast<std::uint8_t>(std::lround(std::clamp(img[i], 0.0, 255.0)));
    if (info)
        *info = {cx, cy, pupil_r, iris_r};
    return out;
}

SynthDataset generate_dataset(const SynthConfig& config, const std::string& out_dir) {
    namespace fs = std::filesystem;
    if (config.n_identities < 1 || config.samples_per_identity_per_sensor < 1)
        throw Error("identity and sample counts must be >= 1");
    for (auto [kind, rate] : config.defect_rates)
        if (rate < 0.0 || rate > 1.0)
            throw Error("defect rates must be in [0,1]");
    if (config.mislabel_rate < 0.0 || config.mislabel_rate > 1.0)
        throw Error("mislabel_rate must be in [0,1]");

    fs::create_directories(fs::path(out_dir) / "enroll");
    fs::create_directories(fs::path(out_dir) / "probe");

    auto identity_name = [](int i) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "id%03d", i);
        return std::string(buf);
    };

    SynthDataset dataset;
    std::vector<std::string> true_identity; // per enrollment entry

    for (int i = 0; i < config.n_identities; ++i) {
        IdentityTexture tex = generate_identity_texture(config.seed, i);
        for (int sensor = 0; sensor < 2; ++sensor) {
            const SensorProfile& profile = sensor == 0 ? config.sensor_a : config.sensor_b;
            for (int s = 0; s < config.samples_per_identity_per_sensor; ++s) {
                std::uint64_t sample_key =
                    (static_cast<std::uint64_t>(sensor) << 40) |
                    (static_cast<std::uint64_t>(i) << 20) | static_cast<std::uint64_t>(s);
                std::set<DefectKind> defects;
                KeyedRng coin{config.seed, kKeyDefect, sample_key};
                for (auto [kind, rate] : config.defect_rates)
                    if (coin.uniform() < rate)
                        defects.insert(kind);
                EyeImage img = render_sample(tex, profile, config.seed, sample_key, defects,
                                             config.image_width, config.image_height);
                char name[64];
                std::snprintf(name, sizeof name, "%c_id%03d_s%d.pgm", sensor == 0 ? 'e' : 'p',
                              i, s);
                std::string rel = std::string(sensor == 0 ? "enroll/" : "probe/") + name;
                save_image(img, (fs::path(out_dir) / rel).string());

                char tid[32];
                std::snprintf(tid, sizeof tid, "%c_id%03d_s%d", sensor == 0 ? 'E' : 'P', i, s);
                SigSetEntry entry{tid, identity_name(i), rel};
                if (sensor == 0) {
                    dataset.sigset.enrollment_entries.push_back(entry);
                    true_identity.push_back(entry.identity_id);
                } else {
                    dataset.sigset.probe_entries.push_back(entry);
                }
            }
        }
    }

    // identity-swap injection over enrollment entries
    auto& enroll = dataset.sigset.enrollment_entries;
    if (config.mislabel_rate > 0.0) {
        std::vector<char> swapped(enroll.size(), 0);
        for (std::size_t e = 0; e < enroll.size(); ++e) {
            if (swapped[e])
                continue;
            KeyedRng coin{config.seed, kKeyMislabel, static_cast<std::uint64_t>(e)};
            if (coin.uniform() >= config.mislabel_rate)
                continue;
            // partner with a different identity, not yet swapped
            std::vector<std::size_t> candidates;
            for (std::size_t p = 0; p < enroll.size(); ++p)
                if (!swapped[p] && enroll[p].identity_id != enroll[e].identity_id)
                    candidates.push_back(p);
            if (candidates.empty())
                continue;
            std::size_t partner = candidates[coin.uniform_int(candidates.size())];
            std::swap(enroll[e].identity_id, enroll[partner].identity_id);
            swapped[e] = swapped[partner] = 1;
            dataset.swaps.push_back({enroll[e].template_id, true_identity[e],
                                     enroll[e].identity_id});
            dataset.swaps.push_back({enroll[partner].template_id, true_identity[partner],
                                     enroll[partner].identity_id});
        }
    }

    // comparisons from declared identities; true labels from true identities
    for (std::size_t pi = 0; pi < dataset.sigset.probe_entries.size(); ++pi) {
        const auto& probe = dataset.sigset.probe_entries[pi];
        for (std::size_t ei = 0; ei < enroll.size(); ++ei) {
            const auto& e = enroll[ei];
            bool declared_genuine = probe.identity_id == e.identity_id;
            bool true_genuine = probe.identity_id == true_identity[ei];
            if (!declared_genuine) {
                if (config.imposter_fraction < 1.0) {
                    KeyedRng pick{config.seed, kKeyImposter, pi, ei};
                    if (pick.uniform() >= config.imposter_fraction)
                        continue;
                }
            }
            ComparisonLabel declared =
                declared_genuine ? ComparisonLabel::Genuine : ComparisonLabel::Imposter;
            dataset.sigset.comparisons.push_back({probe.template_id, e.template_id, declared});
            if (declared_genuine != true_genuine)
                dataset.mislabeled.push_back(
                    {probe.template_id, e.template_id, declared,
                     true_genuine ? ComparisonLabel::Genuine : ComparisonLabel::Imposter});
        }
    }

    save_sigset(dataset.sigset, (fs::path(out_dir) / "sigset.csv").string());

    std::string gt = "[SWAPS]\n";
    for (const auto& s : dataset.swaps)
        gt += s.template_id + "," + s.true_identity + "," + s.declared_identity + "\n";
    gt += "[MISLABELED]\n";
    for (const auto& m : dataset.mislabeled)
        gt += m.probe_template_id + "," + m.enrolled_template_id + "," +
              (m.declared_label == ComparisonLabel::Genuine ? "G" : "I") + "," +
              (m.true_label == ComparisonLabel::Genuine ? "G" : "I") + "\n";
    std::ofstream gt_out((fs::path(out_dir) / "ground_truth_swaps.csv").string(),
                         std::ios::binary);
    if (!gt_out)
        throw IoError("cannot write ground_truth_swaps.csv");
    gt_out << gt;

    return dataset;
}

} // namespace iris
