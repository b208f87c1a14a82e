#include "iris/encoder.hpp"

#include <cmath>
#include <complex>
#include <vector>

namespace iris {

namespace {

// Spatial-domain circular kernel of the analytic Log-Gabor filter:
// h[m] = (1/N) * sum_{k=1..N/2} G(k/N) * exp(i*2*pi*k*m/N), G(0) = 0.
// Filtering by ordered circular convolution keeps column rotation of the
// input bit-exactly covariant in the output.
std::vector<std::complex<double>> make_kernel(const LogGaborParams& params, int n) {
    if (params.center_wavelength < 3.0)
        throw Error("center_wavelength must be >= 3");
    if (!(params.sigma_over_f0 > 0.0 && params.sigma_over_f0 < 1.0))
        throw Error("sigma_over_f0 must be in (0,1)");

    const double f0 = 1.0 / params.center_wavelength;
    const double denom = 2.0 * std::log(params.sigma_over_f0) * std::log(params.sigma_over_f0);
    std::vector<std::complex<double>> kernel(n);
    for (int m = 0; m < n; ++m) {
        std::complex<double> acc = 0.0;
        for (int k = 1; k <= n / 2; ++k) {
            double f = static_cast<double>(k) / n;
            double lg = std::log(f / f0);
            double gain = std::exp(-(lg * lg) / denom);
            double phase = 2.0 * M_PI * k * m / n;
            acc += gain * std::complex<double>(std::cos(phase), std::sin(phase));
        }
        kernel[m] = acc / static_cast<double>(n);
    }
    return kernel;
}

} // namespace

IrisCode encode(const SegmentedPolar& band, const LogGaborParams& params) {
    const int rows = kBandRows;
    const int cols = kAngularResolution;
    if (band.band.size() != static_cast<std::size_t>(rows) * cols ||
        band.valid_mask.size() != band.band.size())
        throw Error("band must be exactly 32x360 with a matching mask");

    const auto kernel = make_kernel(params, cols);

    IrisCode code;
    code.bits = BitGrid(rows, cols);
    code.mask = BitGrid(rows, cols);

    for (int r = 0; r < rows; ++r) {
        const std::uint8_t* row = band.band.data() + static_cast<std::size_t>(r) * cols;
        std::uint8_t lo = row[0], hi = row[0];
        for (int c = 1; c < cols; ++c) {
            lo = std::min(lo, row[c]);
            hi = std::max(hi, row[c]);
        }
        if (lo == hi)
            continue; // degenerate row: zero response, bits 0, mask cleared

        for (int c = 0; c < cols; ++c) {
            double re = 0.0;
            for (int m = 0; m < cols; ++m)
                re += kernel[m].real() * row[(c - m + cols) % cols];
            code.bits.set(r, c, re >= 0.0);
            code.mask.set(r, c, band.valid_mask[static_cast<std::size_t>(r) * cols + c] != 0);
        }
    }
    return code;
}

} // namespace iris
