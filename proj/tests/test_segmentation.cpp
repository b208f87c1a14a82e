#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "iris/segmentation.hpp"
#include "test_util.hpp"

using namespace iris;

TEST_CASE("pupil detection on an analytic disc") {
    EyeImage img = testutil::disc_image(640, 480, 320.0, 240.0, 40.0);
    PupilDescriptor pupil = detect_pupil(img);
    CHECK(std::abs(pupil.center_x - 320.0) <= 1.0);
    CHECK(std::abs(pupil.center_y - 240.0) <= 1.0);
    CHECK(std::abs(pupil.radius - 40.0) <= 1.0);
    CHECK(pupil.boundary_confidence > 0.9);
}

TEST_CASE("no pupil in a uniform image") {
    CHECK_THROWS_AS(detect_pupil(testutil::constant_image(640, 480, 255)), NoPupilFound);
}

TEST_CASE("partially occluded disc still localizes the pupil") {
    // gray horizontal band over the top of the disc, ~20% of its area
    EyeImage img = testutil::disc_image(640, 480, 320.0, 240.0, 40.0);
    for (int y = 200; y <= 216; ++y)
        for (int x = 0; x < 640; ++x)
            img.at(x, y) = 128;
    PupilDescriptor pupil = detect_pupil(img);
    CHECK(std::hypot(pupil.center_x - 320.0, pupil.center_y - 240.0) <= 3.0);
}

TEST_CASE("pupil detection accuracy over random disc placements") {
    std::mt19937 gen(3);
    for (int trial = 0; trial < 100; ++trial) {
        double cx = 100.0 + gen() % 440;
        double cy = 100.0 + gen() % 280;
        double r = 25.0 + gen() % 40;
        EyeImage img = testutil::disc_image(640, 480, cx, cy, r);
        PupilDescriptor pupil = detect_pupil(img);
        REQUIRE(std::abs(pupil.center_x - cx) <= 1.0);
        REQUIRE(std::abs(pupil.center_y - cy) <= 1.0);
        REQUIRE(std::abs(pupil.radius - r) <= 1.0);
    }
}

TEST_CASE("limbic boundary on a uniform step field") {
    std::vector<int> steps(kAngularResolution, 50);
    PolarImage polar = testutil::step_polar(128, steps);
    LimbicBoundary boundary = find_limbic_boundary(polar);
    CHECK(boundary.smoothed);
    for (int c = 0; c < kAngularResolution; ++c)
        REQUIRE(std::abs(boundary.radius_per_column[c] - 50) <= 1);
    CHECK(boundary.mean_radius == doctest::Approx(50.0).epsilon(0.03));
}

TEST_CASE("no boundary in a constant polar image") {
    CHECK_THROWS_AS(find_limbic_boundary(testutil::constant_polar(128, 100)),
                    BoundaryNotFound);
}

TEST_CASE("outlier columns are interpolated back to the main boundary") {
    std::vector<int> steps(kAngularResolution, 50);
    for (int c = 100; c < 130; ++c)
        steps[c] = 90; // occlusion analog
    PolarImage polar = testutil::step_polar(128, steps);
    LimbicBoundary boundary = find_limbic_boundary(polar);
    for (int c = 100; c < 130; ++c)
        REQUIRE(std::abs(boundary.radius_per_column[c] - 50) <= 3);
}

TEST_CASE("boundary detection is rotation equivariant") {
    std::vector<int> steps(kAngularResolution);
    for (int c = 0; c < kAngularResolution; ++c)
        steps[c] = 48 + static_cast<int>(4.0 * std::sin(2.0 * M_PI * c / 360.0));
    PolarImage polar = testutil::step_polar(128, steps);
    const int k = 77;
    std::vector<int> rotated_steps(kAngularResolution);
    for (int c = 0; c < kAngularResolution; ++c)
        rotated_steps[(c + k) % kAngularResolution] = steps[c];
    PolarImage rotated = testutil::step_polar(128, rotated_steps);

    LimbicBoundary a = find_limbic_boundary(polar);
    LimbicBoundary b = find_limbic_boundary(rotated);
    for (int c = 0; c < kAngularResolution; ++c)
        REQUIRE(b.radius_per_column[(c + k) % kAngularResolution] == a.radius_per_column[c]);
}

TEST_CASE("boundary is invariant to a positive affine intensity map") {
    std::vector<int> steps(kAngularResolution, 60);
    PolarImage polar = testutil::step_polar(128, steps, 40, 180);
    PolarImage scaled = polar;
    for (auto& p : scaled.pixels)
        p = static_cast<std::uint8_t>(std::min(255, p + 40)); // a=1, b=40, no saturation
    LimbicBoundary a = find_limbic_boundary(polar);
    LimbicBoundary b = find_limbic_boundary(scaled);
    CHECK(a.radius_per_column == b.radius_per_column);
}

TEST_CASE("band extraction at boundary 32 is near-identity") {
    std::mt19937 gen(5);
    PolarImage polar = testutil::constant_polar(128, 0);
    for (auto& p : polar.pixels)
        p = static_cast<std::uint8_t>(gen());
    LimbicBoundary boundary;
    boundary.radius_per_column.assign(kAngularResolution, 32);
    boundary.smoothed = true;
    boundary.mean_radius = 32.0;
    SegmentedPolar band = extract_band(polar, boundary);
    for (int r = 0; r < kBandRows; ++r)
        for (int c = 0; c < kAngularResolution; ++c) {
            REQUIRE(band.at(r, c) == polar.at(r, c));
            REQUIRE(band.valid_at(r, c));
        }
}

TEST_CASE("band rows source proportionally from the polar image") {
    PolarImage polar = testutil::constant_polar(128, 0);
    for (int r = 0; r < 128; ++r)
        for (int c = 0; c < kAngularResolution; ++c)
            polar.pixels[static_cast<std::size_t>(r) * kAngularResolution + c] =
                static_cast<std::uint8_t>(r);
    LimbicBoundary boundary;
    boundary.radius_per_column.assign(kAngularResolution, 64);
    boundary.smoothed = true;
    boundary.mean_radius = 64.0;
    SegmentedPolar band = extract_band(polar, boundary);
    for (int r = 0; r < kBandRows; ++r)
        REQUIRE(band.at(r, 0) == doctest::Approx(2.0 * r).epsilon(0.05));
}

TEST_CASE("zero-filled wedge maps to invalid mask samples") {
    PolarImage polar = testutil::constant_polar(128, 100);
    for (int r = 0; r < 128; ++r)
        for (int c = 40; c < 60; ++c) {
            std::size_t idx = static_cast<std::size_t>(r) * kAngularResolution + c;
            polar.pixels[idx] = 0;
            polar.valid[idx] = 0;
        }
    LimbicBoundary boundary;
    boundary.radius_per_column.assign(kAngularResolution, 64);
    boundary.smoothed = true;
    boundary.mean_radius = 64.0;
    SegmentedPolar band = extract_band(polar, boundary);
    for (int r = 0; r < kBandRows; ++r)
        for (int c = 0; c < kAngularResolution; ++c)
            REQUIRE(band.valid_at(r, c) == (c < 40 || c >= 60));
}

TEST_CASE("thin boundary is rejected") {
    PolarImage polar = testutil::constant_polar(128, 100);
    LimbicBoundary boundary;
    boundary.radius_per_column.assign(kAngularResolution, 64);
    boundary.radius_per_column[10] = 4;
    boundary.smoothed = true;
    boundary.mean_radius = 63.8;
    CHECK_THROWS_AS(extract_band(polar, boundary), BandTooThin);
}

TEST_CASE("segmented band serializes with a mask sidecar") {
    auto dir = testutil::scratch_dir("seg_io");
    PolarImage polar = testutil::constant_polar(128, 100);
    LimbicBoundary boundary;
    boundary.radius_per_column.assign(kAngularResolution, 64);
    boundary.smoothed = true;
    boundary.mean_radius = 64.0;
    SegmentedPolar band = extract_band(polar, boundary);
    save_segmented(band, dir + "/band.pgm");
    EyeImage back = load_image(dir + "/band.pgm");
    CHECK(back.width == kAngularResolution);
    CHECK(back.height == kBandRows);
    EyeImage mask = load_image(dir + "/band.pgm.mask.pgm");
    CHECK(mask.pixels[0] == 255);
}
