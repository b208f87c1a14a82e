#pragma once

#include <string>
#include <vector>

#include "iris/iriscode.hpp"

namespace iris {

struct SimilarityScore {
    double value = 0.0;          // fraction of agreeing bits, in [0,1]
    std::size_t compared_bits = 0;
    int shift_used = 0;          // signed column offset, 0 when shifting disabled
};

enum class Aggregation { Max, Mean, Owa };

/// Enrollment codes of one eye, matched as a group.
struct DigitalIdentity {
    std::string identity_id;
    std::vector<IrisCode> codes;
    Aggregation aggregation = Aggregation::Max;
};

/// Fraction of agreeing bits between two codes. Unmasked mode divides the
/// agreement count by the full code length; masked mode restricts to
/// positions valid in both codes.
SimilarityScore hamming_similarity(const IrisCode& a, const IrisCode& b, bool use_masks = false);

/// Best similarity over column rotations of b in [-max_shift, +max_shift].
/// Ties break toward the smallest |shift|, negative before positive.
SimilarityScore hamming_similarity_shifted(const IrisCode& a, const IrisCode& b,
                                           int max_shift, bool use_masks = false);

/// Fuzzy membership of a probe in a digital identity: MAX / MEAN / OWA over
/// the per-code shifted similarities.
double identity_membership(const IrisCode& probe, const DigitalIdentity& identity,
                           int max_shift, bool use_masks = false);

/// probes x identities membership matrix; bit-identical at any thread count.
std::vector<std::vector<double>> cross_match(const std::vector<IrisCode>& probes,
                                             const std::vector<DigitalIdentity>& gallery,
                                             int max_shift, bool use_masks = false,
                                             int threads = 1);

/// CSV with a header of identity ids and one row per probe, 6 decimal digits.
std::string score_matrix_csv(const std::vector<IrisCode>& probes,
                             const std::vector<DigitalIdentity>& gallery,
                             const std::vector<std::vector<double>>& matrix);

} // namespace iris
