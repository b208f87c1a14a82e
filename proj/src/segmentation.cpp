#include "iris/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace iris {

namespace {

constexpr double kNoiseFloor = 2.0;       // gray levels, smoothed gradient peak
constexpr int kColumnSmoothHalf = 5;      // +/- columns for gradient smoothing
constexpr int kBoundarySmoothWidth = 11;  // circular moving average
constexpr double kMinCircularity = 0.6;
constexpr double kMinAreaFraction = 0.0005;

struct Histogram {
    std::array<std::uint64_t, 256> bins{};
    std::uint64_t total = 0;
};

Histogram histogram_of(const std::vector<std::uint8_t>& pixels) {
    Histogram h;
    for (std::uint8_t p : pixels)
        ++h.bins[p];
    h.total = pixels.size();
    return h;
}

// Otsu threshold restricted to intensities [lo, hi]; dark class is <= t.
// Returns -1 when the range holds fewer than two distinct intensities.
int otsu_threshold(const Histogram& h, int lo, int hi) {
    std::uint64_t n = 0;
    double sum = 0.0;
    for (int i = lo; i <= hi; ++i) {
        n += h.bins[i];
        sum += static_cast<double>(i) * h.bins[i];
    }
    if (n == 0)
        return -1;

    int best = -1;
    double best_var = -1.0;
    std::uint64_t n0 = 0;
    double sum0 = 0.0;
    for (int t = lo; t < hi; ++t) {
        n0 += h.bins[t];
        sum0 += static_cast<double>(t) * h.bins[t];
        std::uint64_t n1 = n - n0;
        if (n0 == 0 || n1 == 0)
            continue;
        double mu0 = sum0 / n0;
        double mu1 = (sum - sum0) / n1;
        double var = static_cast<double>(n0) * n1 * (mu0 - mu1) * (mu0 - mu1);
        if (var > best_var) {
            best_var = var;
            best = t;
        }
    }
    return best;
}

double class_mean(const Histogram& h, int lo, int hi) {
    std::uint64_t n = 0;
    double sum = 0.0;
    for (int i = lo; i <= hi; ++i) {
        n += h.bins[i];
        sum += static_cast<double>(i) * h.bins[i];
    }
    return n ? sum / n : 0.0;
}

std::uint64_t class_count(const Histogram& h, int lo, int hi) {
    std::uint64_t n = 0;
    for (int i = lo; i <= hi; ++i)
        n += h.bins[i];
    return n;
}

struct CircleFit {
    double cx = 0.0, cy = 0.0, r = 0.0, rms = 0.0;
    bool ok = false;
};

// Algebraic (Kasa) least-squares circle through the given points.
CircleFit fit_circle(const std::vector<std::pair<int, int>>& pts) {
    CircleFit fit;
    if (pts.size() < 3)
        return fit;
    // normal equations for x^2+y^2 = 2ax + 2by + c
    double sxx = 0, sxy = 0, syy = 0, sx = 0, sy = 0, sxz = 0, syz = 0, sz = 0;
    const double n = static_cast<double>(pts.size());
    for (auto [xi, yi] : pts) {
        double x = xi, y = yi;
        double z = x * x + y * y;
        sxx += x * x; sxy += x * y; syy += y * y;
        sx += x; sy += y;
        sxz += x * z; syz += y * z; sz += z;
    }
    // solve [2sxx 2sxy sx; 2sxy 2syy sy; 2sx 2sy n] * [a b c]' = [sxz syz sz]'
    double m[3][3] = {{2 * sxx, 2 * sxy, sx}, {2 * sxy, 2 * syy, sy}, {2 * sx, 2 * sy, n}};
    double v[3] = {sxz, syz, sz};
    double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                 m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                 m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    if (std::abs(det) < 1e-9)
        return fit;
    auto solve1 = [&](int col) {
        double t[3][3];
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                t[i][j] = (j == col) ? v[i] : m[i][j];
        return (t[0][0] * (t[1][1] * t[2][2] - t[1][2] * t[2][1]) -
                t[0][1] * (t[1][0] * t[2][2] - t[1][2] * t[2][0]) +
                t[0][2] * (t[1][0] * t[2][1] - t[1][1] * t[2][0])) / det;
    };
    double a = solve1(0);
    double b = solve1(1);
    double c = solve1(2);
    double r2 = c + a * a + b * b;
    if (r2 <= 0.0)
        return fit;
    fit.cx = a;
    fit.cy = b;
    fit.r = std::sqrt(r2);
    double acc = 0.0;
    for (auto [xi, yi] : pts) {
        double d = std::hypot(xi - a, yi - b) - fit.r;
        acc += d * d;
    }
    fit.rms = std::sqrt(acc / n);
    fit.ok = true;
    return fit;
}

// Trimmed refit: occluding edges (eyelid analogs) leave straight runs in the
// boundary; dropping high-residual points pulls the fit back to the arc.
CircleFit fit_circle_trimmed(std::vector<std::pair<int, int>> pts) {
    CircleFit fit = fit_circle(pts);
    for (int iter = 0; iter < 3 && fit.ok; ++iter) {
        double cutoff = std::max(1.5, 2.0 * fit.rms);
        std::vector<std::pair<int, int>> kept;
        kept.reserve(pts.size());
        for (auto [x, y] : pts) {
            if (std::abs(std::hypot(x - fit.cx, y - fit.cy) - fit.r) <= cutoff)
                kept.emplace_back(x, y);
        }
        if (kept.size() < 8 || kept.size() == pts.size())
            break;
        pts = std::move(kept);
        fit = fit_circle(pts);
    }
    return fit;
}

} // namespace

double SegmentedPolar::valid_fraction() const {
    std::size_t n = std::count(valid_mask.begin(), valid_mask.end(), std::uint8_t{1});
    return valid_mask.empty() ? 0.0 : static_cast<double>(n) / valid_mask.size();
}

PupilDescriptor detect_pupil(const EyeImage& image) {
    if (image.kind != ImageKind::RectilinearFull)
        throw Error("detect_pupil expects a full rectilinear image");
    const int w = image.width;
    const int h = image.height;

    Histogram hist = histogram_of(image.pixels);
    int t1 = otsu_threshold(hist, 0, 255);
    if (t1 < 0)
        throw NoPupilFound("uniform image, no dark region");

    const auto min_area =
        static_cast<std::uint64_t>(kMinAreaFraction * static_cast<double>(w) * h);

    // A trimodal scene (pupil | iris | sclera) makes a single Otsu pass merge
    // pupil and iris into one dark class; a second pass inside the dark class
    // splits them when the split is well separated.
    int dark_threshold = t1;
    int t2 = otsu_threshold(hist, 0, t1);
    if (t2 >= 0) {
        double lower_mean = class_mean(hist, 0, t2);
        double upper_mean = class_mean(hist, t2 + 1, t1);
        if (upper_mean - lower_mean >= 50.0 && class_count(hist, 0, t2) >= min_area)
            dark_threshold = t2;
    }

    std::vector<std::uint8_t> dark(image.pixels.size());
    for (std::size_t i = 0; i < dark.size(); ++i)
        dark[i] = image.pixels[i] <= dark_threshold ? 1 : 0;

    // largest 4-connected dark component
    std::vector<std::int32_t> label(dark.size(), -1);
    std::vector<std::size_t> stack;
    std::int32_t best_label = -1;
    std::uint64_t best_area = 0;
    std::int32_t next_label = 0;
    for (std::size_t seed = 0; seed < dark.size(); ++seed) {
        if (!dark[seed] || label[seed] >= 0)
            continue;
        std::uint64_t area = 0;
        stack.clear();
        stack.push_back(seed);
        label[seed] = next_label;
        while (!stack.empty()) {
            std::size_t p = stack.back();
            stack.pop_back();
            ++area;
            int x = static_cast<int>(p % w);
            int y = static_cast<int>(p / w);
            const int nx[4] = {x - 1, x + 1, x, x};
            const int ny[4] = {y, y, y - 1, y + 1};
            for (int k = 0; k < 4; ++k) {
                if (nx[k] < 0 || nx[k] >= w || ny[k] < 0 || ny[k] >= h)
                    continue;
                std::size_t q = static_cast<std::size_t>(ny[k]) * w + nx[k];
                if (dark[q] && label[q] < 0) {
                    label[q] = next_label;
                    stack.push_back(q);
                }
            }
        }
        if (area > best_area) {
            best_area = area;
            best_label = next_label;
        }
        ++next_label;
    }
    if (best_label < 0 || best_area < min_area)
        throw NoPupilFound("no dark component of sufficient area");

    // boundary pixels of the winning component
    std::vector<std::pair<int, int>> boundary;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            std::size_t p = static_cast<std::size_t>(y) * w + x;
            if (label[p] != best_label)
                continue;
            bool edge = (x == 0 || x == w - 1 || y == 0 || y == h - 1);
            if (!edge) {
                edge = label[p - 1] != best_label || label[p + 1] != best_label ||
                       label[p - w] != best_label || label[p + w] != best_label;
            }
            if (edge)
                boundary.emplace_back(x, y);
        }
    }
    double circularity = 4.0 * M_PI * static_cast<double>(best_area) /
                         (static_cast<double>(boundary.size()) * boundary.size());
    circularity = std::min(1.0, circularity);
    if (circularity < kMinCircularity)
        throw NoPupilFound("largest dark component is not circular enough");

    CircleFit fit = fit_circle_trimmed(boundary);
    if (!fit.ok || fit.r <= 0.0)
        throw NoPupilFound("circle fit failed");

    PupilDescriptor pupil;
    pupil.center_x = fit.cx;
    pupil.center_y = fit.cy;
    pupil.radius = fit.r;
    pupil.boundary_confidence = 1.0 - std::clamp(fit.rms / fit.r, 0.0, 1.0);
    if (!(pupil.center_x >= 0 && pupil.center_x < w && pupil.center_y >= 0 && pupil.center_y < h))
        throw NoPupilFound("fitted center outside image");
    return pupil;
}

LimbicBoundary find_limbic_boundary(const PolarImage& polar, const SegmentationConfig& config) {
    const int rows = polar.radial_resolution;
    const int cols = polar.angular_resolution;
    if (rows < 64)
        throw Error("find_limbic_boundary needs >= 64 radial rows");

    std::vector<double> intensity(polar.pixels.begin(), polar.pixels.end());
    if (config.pre_blur_sigma > 0.0) {
        // separable Gaussian, circular along the angle
        int half = std::max(1, static_cast<int>(std::ceil(3.0 * config.pre_blur_sigma)));
        std::vector<double> kernel(2 * half + 1);
        double ksum = 0.0;
        for (int i = -half; i <= half; ++i)
            ksum += kernel[i + half] =
                std::exp(-0.5 * i * i / (config.pre_blur_sigma * config.pre_blur_sigma));
        for (double& k : kernel)
            k /= ksum;
        std::vector<double> tmp(intensity.size());
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) {
                double acc = 0.0;
                for (int i = -half; i <= half; ++i)
                    acc += kernel[i + half] * intensity[static_cast<std::size_t>(r) * cols +
                                                        ((c + i) % cols + cols) % cols];
                tmp[static_cast<std::size_t>(r) * cols + c] = acc;
            }
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) {
                double acc = 0.0;
                for (int i = -half; i <= half; ++i)
                    acc += kernel[i + half] *
                           tmp[static_cast<std::size_t>(std::clamp(r + i, 0, rows - 1)) * cols + c];
                intensity[static_cast<std::size_t>(r) * cols + c] = acc;
            }
    }

    // outward radial gradient, then smooth over a circular +/-5 column window
    const int grad_lo = kMinBandRadius;        // keep clear of residual pupil edge
    const int grad_hi = rows - 2;
    std::vector<double> grad(static_cast<std::size_t>(rows) * cols, 0.0);
    for (int r = grad_lo; r <= grad_hi; ++r)
        for (int c = 0; c < cols; ++c)
            grad[static_cast<std::size_t>(r) * cols + c] =
                intensity[static_cast<std::size_t>(r + 1) * cols + c] -
                intensity[static_cast<std::size_t>(r) * cols + c];

    std::vector<int> peak_row(cols, -1);
    std::vector<double> peak_val(cols, 0.0);
    for (int c = 0; c < cols; ++c) {
        double best = -1e30;
        int best_r = -1;
        for (int r = grad_lo; r <= grad_hi; ++r) {
            double acc = 0.0;
            for (int d = -kColumnSmoothHalf; d <= kColumnSmoothHalf; ++d)
                acc += grad[static_cast<std::size_t>(r) * cols + ((c + d) % cols + cols) % cols];
            acc /= 2 * kColumnSmoothHalf + 1;
            if (acc > best) {
                best = acc;
                best_r = r;
            }
        }
        peak_row[c] = best_r;
        peak_val[c] = best;
    }

    std::vector<char> usable(cols, 0);
    int n_usable = 0;
    for (int c = 0; c < cols; ++c) {
        if (peak_row[c] >= 0 && peak_val[c] >= kNoiseFloor) {
            usable[c] = 1;
            ++n_usable;
        }
    }
    if (n_usable < cols / 2)
        throw BoundaryNotFound("fewer than half the columns show a usable gradient peak");

    // fuzzy two-cluster split of candidate radii: main iris-band cluster vs outliers
    std::vector<double> radii;
    radii.reserve(n_usable);
    for (int c = 0; c < cols; ++c)
        if (usable[c])
            radii.push_back(peak_row[c]);
    std::vector<double> sorted = radii;
    std::sort(sorted.begin(), sorted.end());
    double c1 = sorted[sorted.size() / 4];
    double c2 = sorted[(3 * sorted.size()) / 4];
    auto membership1 = [&](double x) {
        double d1 = std::abs(x - c1);
        double d2 = std::abs(x - c2);
        if (d1 < 1e-12) return 1.0;
        if (d2 < 1e-12) return 0.0;
        return 1.0 / (1.0 + (d1 * d1) / (d2 * d2));
    };
    for (int iter = 0; iter < 50; ++iter) {
        double n1 = 0, s1 = 0, n2 = 0, s2 = 0;
        for (double x : radii) {
            double u1 = membership1(x);
            double u2 = 1.0 - u1;
            n1 += u1 * u1; s1 += u1 * u1 * x;
            n2 += u2 * u2; s2 += u2 * u2 * x;
        }
        double nc1 = n1 > 0 ? s1 / n1 : c1;
        double nc2 = n2 > 0 ? s2 / n2 : c2;
        if (std::abs(nc1 - c1) + std::abs(nc2 - c2) < 1e-9) {
            c1 = nc1; c2 = nc2;
            break;
        }
        c1 = nc1; c2 = nc2;
    }

    std::vector<char> inlier(cols, 0);
    if (std::abs(c1 - c2) < 1.0) {
        for (int c = 0; c < cols; ++c)
            inlier[c] = usable[c];
    } else {
        double mass1 = 0.0;
        for (double x : radii)
            mass1 += membership1(x);
        bool main_is_1 = mass1 >= static_cast<double>(radii.size()) - mass1;
        for (int c = 0; c < cols; ++c) {
            if (!usable[c])
                continue;
            double u = membership1(peak_row[c]);
            double u_main = main_is_1 ? u : 1.0 - u;
            inlier[c] = u_main >= 0.5;
        }
    }

    // replace outlier columns by circular linear interpolation between inliers
    std::vector<double> radius(cols, 0.0);
    int n_in = 0;
    for (int c = 0; c < cols; ++c)
        if (inlier[c]) {
            radius[c] = peak_row[c];
            ++n_in;
        }
    if (n_in == 0)
        throw BoundaryNotFound("no inlier columns after clustering");
    if (n_in < cols) {
        for (int c = 0; c < cols; ++c) {
            if (inlier[c])
                continue;
            int left = c, right = c, dl = 0, dr = 0;
            while (!inlier[left]) { left = (left + cols - 1) % cols; ++dl; }
            while (!inlier[right]) { right = (right + 1) % cols; ++dr; }
            double w = static_cast<double>(dl) / (dl + dr);
            radius[c] = (1.0 - w) * radius[left] + w * radius[right];
        }
    }

    // circular moving average, width 11
    const int half = kBoundarySmoothWidth / 2;
    LimbicBoundary boundary;
    boundary.radius_per_column.resize(cols);
    double mean = 0.0;
    for (int c = 0; c < cols; ++c) {
        double acc = 0.0;
        for (int d = -half; d <= half; ++d)
            acc += radius[((c + d) % cols + cols) % cols];
        acc /= kBoundarySmoothWidth;
        mean += acc;
        boundary.radius_per_column[c] =
            std::clamp(static_cast<int>(std::lround(acc)), 1, rows - 1);
    }
    boundary.mean_radius = mean / cols;
    boundary.smoothed = true;
    return boundary;
}

SegmentedPolar extract_band(const PolarImage& polar, const LimbicBoundary& boundary) {
    const int cols = polar.angular_resolution;
    if (static_cast<int>(boundary.radius_per_column.size()) != cols)
        throw Error("boundary does not match polar image width");
    if (boundary.mean_radius < kMinBandRadius)
        throw BandTooThin("mean boundary radius below minimum band height");
    for (int c = 0; c < cols; ++c) {
        int rad = boundary.radius_per_column[c];
        if (rad < kMinBandRadius)
            throw BandTooThin("boundary radius below minimum at column " + std::to_string(c));
        if (rad >= polar.radial_resolution + 1)
            throw Error("boundary radius exceeds polar image height");
    }

    SegmentedPolar seg;
    seg.band.assign(static_cast<std::size_t>(kBandRows) * cols, 0);
    seg.valid_mask.assign(seg.band.size(), 0);
    for (int c = 0; c < cols; ++c) {
        const int rad = boundary.radius_per_column[c];
        for (int r = 0; r < kBandRows; ++r) {
            double src = static_cast<double>(r) * rad / kBandRows;
            int i0 = std::min(static_cast<int>(std::floor(src)), rad - 1);
            int i1 = std::min(i0 + 1, rad - 1);
            double f = src - i0;
            double v = (1.0 - f) * polar.at(i0, c) + f * polar.at(i1, c);
            bool ok = polar.valid_at(i0, c) && (f <= 1e-12 || polar.valid_at(i1, c));
            std::size_t idx = static_cast<std::size_t>(r) * cols + c;
            seg.band[idx] = static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
            seg.valid_mask[idx] = ok ? 1 : 0;
        }
    }
    return seg;
}

void save_segmented(const SegmentedPolar& band, const std::string& path) {
    EyeImage img;
    img.width = kAngularResolution;
    img.height = kBandRows;
    img.pixels = band.band;
    save_image(img, path);
    EyeImage mask;
    mask.width = kAngularResolution;
    mask.height = kBandRows;
    mask.pixels.resize(band.valid_mask.size());
    for (std::size_t i = 0; i < mask.pixels.size(); ++i)
        mask.pixels[i] = band.valid_mask[i] ? 255 : 0;
    save_image(mask, path + ".mask.pgm");
}

} // namespace iris
