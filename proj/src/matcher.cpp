#include "iris/matcher.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <cstring>
#include <numeric>
#include <thread>

namespace iris {

namespace {

void check_dims(const IrisCode& a, const IrisCode& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionMismatch("iris code dimensions differ");
    if (a.bits.bit_count() == 0)
        throw DimensionMismatch("empty iris codes");
}

std::size_t xor_popcount(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
    std::size_t total = 0;
    std::size_t i = 0;
    const std::size_t n = a.size();
    for (; i + 8 <= n; i += 8) {
        std::uint64_t wa, wb;
        std::memcpy(&wa, a.data() + i, 8);
        std::memcpy(&wb, b.data() + i, 8);
        total += static_cast<std::size_t>(std::popcount(wa ^ wb));
    }
    for (; i < n; ++i)
        total += static_cast<std::size_t>(std::popcount(static_cast<unsigned>(a[i] ^ b[i])));
    return total;
}

std::size_t masked_counts(const IrisCode& a, const IrisCode& b,
                          std::size_t& agree_out) {
    const auto& ab = a.bits.bytes();
    const auto& bb = b.bits.bytes();
    const auto& am = a.mask.bytes();
    const auto& bm = b.mask.bytes();
    std::size_t common = 0, agree = 0;
    std::size_t i = 0;
    const std::size_t n = ab.size();
    for (; i + 8 <= n; i += 8) {
        std::uint64_t wa, wb, wm, wn;
        std::memcpy(&wa, ab.data() + i, 8);
        std::memcpy(&wb, bb.data() + i, 8);
        std::memcpy(&wm, am.data() + i, 8);
        std::memcpy(&wn, bm.data() + i, 8);
        std::uint64_t both = wm & wn;
        common += static_cast<std::size_t>(std::popcount(both));
        agree += static_cast<std::size_t>(std::popcount(~(wa ^ wb) & both));
    }
    for (; i < n; ++i) {
        unsigned both = am[i] & bm[i];
        common += static_cast<std::size_t>(std::popcount(both));
        agree += static_cast<std::size_t>(std::popcount(~(ab[i] ^ bb[i]) & both & 0xFFu));
    }
    agree_out = agree;
    return common;
}

} // namespace

SimilarityScore hamming_similarity(const IrisCode& a, const IrisCode& b, bool use_masks) {
    check_dims(a, b);
    SimilarityScore score;
    if (!use_masks) {
        // padding bits are zero in both codes, so they always "agree";
        // subtracting the total keeps them out of the disagreement count
        std::size_t total = a.bits.bit_count();
        std::size_t disagree = xor_popcount(a.bits.bytes(), b.bits.bytes());
        score.value = static_cast<double>(total - disagree) / static_cast<double>(total);
        score.compared_bits = total;
    } else {
        std::size_t agree = 0;
        std::size_t common = masked_counts(a, b, agree);
        if (common == 0)
            throw EmptyOverlap("no common valid bits between codes");
        score.value = static_cast<double>(agree) / static_cast<double>(common);
        score.compared_bits = common;
    }
    return score;
}

SimilarityScore hamming_similarity_shifted(const IrisCode& a, const IrisCode& b,
                                           int max_shift, bool use_masks) {
    check_dims(a, b);
    if (max_shift < 0)
        throw Error("max_shift must be >= 0");
    if (max_shift == 0)
        return hamming_similarity(a, b, use_masks);

    SimilarityScore best;
    bool have = false;
    for (int mag = 0; mag <= max_shift; ++mag) {
        for (int sign = 0; sign < (mag == 0 ? 1 : 2); ++sign) {
            int shift = (sign == 0) ? -mag : mag;
            IrisCode rotated;
            rotated.bits = b.bits.rotated_cols(shift);
            rotated.mask = b.mask.rotated_cols(shift);
            SimilarityScore s;
            try {
                s = hamming_similarity(a, rotated, use_masks);
            } catch (const EmptyOverlap&) {
                continue;
            }
            s.shift_used = shift;
            if (!have || s.value > best.value) {
                best = s;
                have = true;
            }
        }
    }
    if (!have)
        throw EmptyOverlap("no common valid bits at any shift");
    return best;
}

double identity_membership(const IrisCode& probe, const DigitalIdentity& identity,
                           int max_shift, bool use_masks) {
    if (identity.codes.empty())
        throw Error("digital identity has no enrolled codes");
    std::vector<double> scores;
    scores.reserve(identity.codes.size());
    for (const auto& code : identity.codes)
        scores.push_back(hamming_similarity_shifted(probe, code, max_shift, use_masks).value);

    switch (identity.aggregation) {
    case Aggregation::Max:
        return *std::max_element(scores.begin(), scores.end());
    case Aggregation::Mean: {
        double sum = 0.0;
        for (double s : scores) // fixed order
            sum += s;
        return sum / static_cast<double>(scores.size());
    }
    case Aggregation::Owa: {
        std::sort(scores.begin(), scores.end(), std::greater<>());
        static constexpr double base_weights[3] = {0.5, 0.3, 0.2};
        std::size_t n = scores.size();
        std::vector<double> weights(n, 0.0);
        for (std::size_t i = 0; i < n && i < 3; ++i)
            weights[i] = base_weights[i];
        double wsum = 0.0;
        for (double w : weights)
            wsum += w;
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            acc += weights[i] / wsum * scores[i];
        return acc;
    }
    }
    throw Error("unknown aggregation");
}

std::vector<std::vector<double>> cross_match(const std::vector<IrisCode>& probes,
                                             const std::vector<DigitalIdentity>& gallery,
                                             int max_shift, bool use_masks, int threads) {
    if (probes.empty() || gallery.empty())
        throw Error("cross_match needs non-empty probes and gallery");

    std::vector<std::vector<double>> matrix(probes.size(),
                                            std::vector<double>(gallery.size(), 0.0));
    const std::size_t cells = probes.size() * gallery.size();
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t cell = begin; cell < end; ++cell) {
            std::size_t p = cell / gallery.size();
            std::size_t g = cell % gallery.size();
            matrix[p][g] = identity_membership(probes[p], gallery[g], max_shift, use_masks);
        }
    };
    int n_threads = std::max(1, threads);
    if (n_threads == 1 || cells < 2) {
        work(0, cells);
    } else {
        std::vector<std::thread> pool;
        std::size_t chunk = (cells + n_threads - 1) / n_threads;
        for (int t = 0; t < n_threads; ++t) {
            std::size_t begin = static_cast<std::size_t>(t) * chunk;
            std::size_t end = std::min(cells, begin + chunk);
            if (begin >= end)
                break;
            pool.emplace_back(work, begin, end);
        }
        for (auto& th : pool)
            th.join();
    }
    return matrix;
}

std::string score_matrix_csv(const std::vector<IrisCode>& probes,
                             const std::vector<DigitalIdentity>& gallery,
                             const std::vector<std::vector<double>>& matrix) {
    std::string out = "probe";
    for (const auto& id : gallery) {
        out += ',';
        out += id.identity_id;
    }
    out += '\n';
    char buf[32];
    for (std::size_t p = 0; p < matrix.size(); ++p) {
        out += probes[p].source_id;
        for (double v : matrix[p]) {
            std::snprintf(buf, sizeof buf, ",%.6f", v);
            out += buf;
        }
        out += '\n';
    }
    return out;
}

} // namespace iris
