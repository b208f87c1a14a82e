#include "iris/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace iris {

namespace {

void check_pupil(const EyeImage& image, const PupilDescriptor& pupil) {
    if (pupil.radius <= 0.0)
        throw InvalidPupil("pupil radius must be positive");
    if (pupil.center_x < 0.0 || pupil.center_x >= image.width ||
        pupil.center_y < 0.0 || pupil.center_y >= image.height)
        throw InvalidPupil("pupil center outside image bounds");
}

} // namespace

EyeImage load_image(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw FileNotFound("cannot open " + path);

    std::string magic;
    in >> magic;
    if (magic != "P5")
        throw MalformedImage(path + ": not a P5 PGM");

    // header tokens may be separated by any whitespace; comments start with '#'
    auto next_token = [&in, &path]() -> long {
        while (true) {
            int c = in.peek();
            if (c == EOF)
                throw MalformedImage(path + ": truncated header");
            if (std::isspace(c)) {
                in.get();
            } else if (c == '#') {
                std::string line;
                std::getline(in, line);
            } else {
                break;
            }
        }
        long v = 0;
        if (!(in >> v))
            throw MalformedImage(path + ": bad header value");
        return v;
    };

    long w = next_token();
    long h = next_token();
    long maxval = next_token();
    if (w <= 0 || h <= 0 || w > 1 << 16 || h > 1 << 16)
        throw MalformedImage(path + ": bad dimensions");
    if (maxval != 255)
        throw MalformedImage(path + ": only 8-bit (maxval 255) PGM is supported");
    in.get(); // single whitespace byte before the payload

    EyeImage image;
    image.width = static_cast<int>(w);
    image.height = static_cast<int>(h);
    image.kind = ImageKind::RectilinearFull;
    image.pixels.resize(static_cast<std::size_t>(w) * h);
    in.read(reinterpret_cast<char*>(image.pixels.data()),
            static_cast<std::streamsize>(image.pixels.size()));
    if (static_cast<std::size_t>(in.gcount()) != image.pixels.size())
        throw MalformedImage(path + ": truncated payload");
    return image;
}

void save_image(const EyeImage& image, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write " + path);
    out << "P5\n" << image.width << " " << image.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(image.pixels.data()),
              static_cast<std::streamsize>(image.pixels.size()));
    if (!out)
        throw IoError("write failed for " + path);
}

void save_polar(const PolarImage& polar, const std::string& path) {
    EyeImage tmp;
    tmp.width = polar.angular_resolution;
    tmp.height = polar.radial_resolution;
    tmp.pixels = polar.pixels;
    save_image(tmp, path);
}

EyeImage crop_roi(const EyeImage& image, const PupilDescriptor& pupil, double margin_factor) {
    check_pupil(image, pupil);
    if (margin_factor < 1.0)
        throw InvalidPupil("margin_factor must be >= 1");

    int half = std::max(1, static_cast<int>(std::lround(margin_factor * pupil.radius)));
    int side = 2 * half;
    int cx = static_cast<int>(std::lround(pupil.center_x));
    int cy = static_cast<int>(std::lround(pupil.center_y));
    int x0 = cx - half;
    int y0 = cy - half;

    EyeImage out;
    out.width = side;
    out.height = side;
    out.kind = ImageKind::RectilinearRoi;
    out.pixels.assign(static_cast<std::size_t>(side) * side, 0);
    for (int y = 0; y < side; ++y) {
        int sy = y0 + y;
        if (sy < 0 || sy >= image.height)
            continue;
        int xa = std::max(0, -x0);
        int xb = std::min(side, image.width - x0);
        for (int x = xa; x < xb; ++x)
            out.at(x, y) = image.at(x0 + x, sy);
    }
    return out;
}

PolarImage unwrap_polar(const EyeImage& image, const PupilDescriptor& pupil,
                        int radial_resolution) {
    check_pupil(image, pupil);
    if (radial_resolution < 32)
        throw InvalidPupil("radial_resolution must be >= 32");

    double edge = std::min(std::min(pupil.center_x, image.width - 1 - pupil.center_x),
                           std::min(pupil.center_y, image.height - 1 - pupil.center_y));
    if (edge <= pupil.radius)
        throw InvalidPupil("pupil boundary touches the image edge");
    double radial_step = (edge - pupil.radius) / (radial_resolution - 1);

    PolarImage polar;
    polar.angular_resolution = kAngularResolution;
    polar.radial_resolution = radial_resolution;
    polar.pupil_center_x = pupil.center_x;
    polar.pupil_center_y = pupil.center_y;
    polar.pupil_radius = pupil.radius;
    polar.pixels.assign(static_cast<std::size_t>(radial_resolution) * kAngularResolution, 0);
    polar.valid.assign(polar.pixels.size(), 0);

    for (int a = 0; a < kAngularResolution; ++a) {
        double theta = 2.0 * M_PI * a / kAngularResolution;
        double ct = std::cos(theta);
        double st = std::sin(theta);
        for (int r = 0; r < radial_resolution; ++r) {
            double rad = pupil.radius + r * radial_step;
            double sx = pupil.center_x + rad * ct;
            double sy = pupil.center_y + rad * st;
            if (sx < 0.0 || sy < 0.0 || sx > image.width - 1 || sy > image.height - 1)
                continue; // leave 0, invalid
            int x0 = std::min(static_cast<int>(std::floor(sx)), image.width - 2);
            int y0 = std::min(static_cast<int>(std::floor(sy)), image.height - 2);
            double fx = sx - x0;
            double fy = sy - y0;
            double v = (1 - fx) * (1 - fy) * image.at(x0, y0) +
                       fx * (1 - fy) * image.at(x0 + 1, y0) +
                       (1 - fx) * fy * image.at(x0, y0 + 1) +
                       fx * fy * image.at(x0 + 1, y0 + 1);
            std::size_t idx = static_cast<std::size_t>(r) * kAngularResolution + a;
            polar.pixels[idx] = static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
            polar.valid[idx] = 1;
        }
    }
    return polar;
}

} // namespace iris
