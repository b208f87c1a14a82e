#pragma once

#include <array>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "iris/pipeline.hpp"
#include "iris/sigset.hpp"

namespace iris {

inline constexpr int kHistogramBins = 200; // width 0.005 over [0,1]

struct ScoredPair {
    std::string probe_template_id;
    std::string enrolled_template_id;
    ComparisonLabel declared_label = ComparisonLabel::Genuine;
    double score = 0.0;
};

/// Labeled similarity scores for one experiment, with provenance.
struct ScoreSet {
    std::vector<ScoredPair> pairs;

    std::vector<double> genuine_scores() const;
    std::vector<double> imposter_scores() const;
};

struct DistributionStats {
    double mean = 0.0;
    double std_dev = 0.0; // population (1/N)
    std::size_t count = 0;
    double min = 0.0;
    double max = 0.0;
    std::array<std::uint64_t, kHistogramBins> histogram{};
};

struct OperatingPoint {
    double far_target = 0.0;
    double frr = 0.0;
    double threshold = 0.0;
    bool resolvable = true; // false: target below 1/|imposters| resolution
};

struct RocPoint {
    double far = 0.0;
    double tar = 0.0;
};

struct MislabelSuspect {
    std::string probe_template_id;
    std::string enrolled_template_id;
    ComparisonLabel declared_label = ComparisonLabel::Genuine;
    double score = 0.0;
};

struct EvalReport {
    DistributionStats imposter_stats;
    DistributionStats genuine_stats;
    double decidability = 0.0;
    double eer_value = 0.0;
    double eer_threshold = 0.0;
    std::vector<OperatingPoint> operating_points;
    std::vector<RocPoint> roc;
    double min_genuine = 0.0;
    double max_imposter = 0.0;
    std::vector<MislabelSuspect> suspected_mislabels;
    std::vector<std::tuple<double, double, double>> far_frr; // (threshold, far, frr)
    std::size_t failed_comparisons = 0; // pipeline failures excluded from scoring
    std::vector<std::string> failure_notes;
};

struct CollectResult {
    ScoreSet scores;
    std::size_t failed_comparisons = 0;
    std::vector<std::string> failure_notes;
};

/// Runs the pipeline over every template referenced by the sigset and scores
/// each declared comparison. Entries that fail segmentation are excluded and
/// counted. Template paths are resolved relative to base_dir.
CollectResult collect_scores(const SigSet& sigset, const PipelineConfig& config,
                             const std::string& base_dir = ".");

DistributionStats stats(const std::vector<double>& scores);

/// Same histogram/extrema, but mean = median and std_dev = 1.4826 * MAD so a
/// small outlier fraction cannot inflate the spread estimate.
DistributionStats robust_stats(const std::vector<double>& scores);

/// d' = |mu1 - mu2| / sqrt((sigma1^2 + sigma2^2) / 2), imposter first.
double decidability(const DistributionStats& imposter, const DistributionStats& genuine);

/// Accept iff score >= threshold. FAR(t) = fraction of imposter scores >= t,
/// FRR(t) = fraction of genuine scores < t.
std::vector<std::pair<double, double>> far_frr_curves(const ScoreSet& scores,
                                                      const std::vector<double>& thresholds);

/// FAR/FRR crossing, linearly interpolated between bracketing thresholds.
/// Perfectly separated sets report EER 0 at the midpoint of the empty gap.
std::pair<double, double> eer(const ScoreSet& scores); // (value, threshold)

/// Smallest grid threshold (step 1e-4) with FAR <= target; targets below the
/// imposter-count resolution come back flagged unresolvable.
std::vector<OperatingPoint> operating_points(const ScoreSet& scores,
                                             const std::vector<double>& far_targets);

/// (FAR, TAR) swept over the merged score values, sorted by FAR, deduplicated.
std::vector<RocPoint> roc(const ScoreSet& scores);

double roc_auc(const std::vector<RocPoint>& curve); // trapezoidal

/// Outlier heuristic: a declared-imposter pair is suspect above
/// mu1 + k*sigma1 (and past the inter-mean midpoint), a declared-genuine pair
/// below mu2 - k*sigma2 (and before the midpoint).
std::vector<MislabelSuspect> detect_mislabels(const ScoreSet& scores,
                                              const DistributionStats& imposter,
                                              const DistributionStats& genuine,
                                              double k = 6.0);

EvalReport evaluate(const ScoreSet& scores, const std::vector<double>& far_targets,
                    double mislabel_k = 6.0);

} // namespace iris
