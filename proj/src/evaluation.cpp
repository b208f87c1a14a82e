#include "iris/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <thread>

#include "iris/matcher.hpp"

namespace iris {

namespace {

// count of elements < t in an ascending-sorted vector
std::size_t count_below(const std::vector<double>& sorted, double t) {
    return static_cast<std::size_t>(
        std::lower_bound(sorted.begin(), sorted.end(), t) - sorted.begin());
}

double far_at(const std::vector<double>& imposter_sorted, double t) {
    std::size_t below = count_below(imposter_sorted, t);
    return static_cast<double>(imposter_sorted.size() - below) / imposter_sorted.size();
}

double frr_at(const std::vector<double>& genuine_sorted, double t) {
    return static_cast<double>(count_below(genuine_sorted, t)) / genuine_sorted.size();
}

std::vector<double> sorted_scores(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v;
}

} // namespace

std::vector<double> ScoreSet::genuine_scores() const {
    std::vector<double> out;
    for (const auto& p : pairs)
        if (p.declared_label == ComparisonLabel::Genuine)
            out.push_back(p.score);
    return out;
}

std::vector<double> ScoreSet::imposter_scores() const {
    std::vector<double> out;
    for (const auto& p : pairs)
        if (p.declared_label == ComparisonLabel::Imposter)
            out.push_back(p.score);
    return out;
}

CollectResult collect_scores(const SigSet& sigset, const PipelineConfig& config,
                             const std::string& base_dir) {
    auto resolve = [&base_dir](const std::string& path) {
        std::filesystem::path p(path);
        if (p.is_absolute())
            return path;
        return (std::filesystem::path(base_dir) / p).string();
    };

    struct Slot {
        const SigSetEntry* entry = nullptr;
        IrisCode code;
        bool ok = false;
        bool missing_file = false;
        std::string error;
    };
    std::map<std::string, Slot> probes, enrolled;
    for (const auto& e : sigset.probe_entries)
        probes[e.template_id].entry = &e;
    for (const auto& e : sigset.enrollment_entries)
        enrolled[e.template_id].entry = &e;

    std::vector<Slot*> slots;
    for (auto& [id, slot] : probes)
        slots.push_back(&slot);
    for (auto& [id, slot] : enrolled)
        slots.push_back(&slot);

    auto encode_range = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            Slot& slot = *slots[i];
            try {
                slot.code = load_template(resolve(slot.entry->path), config,
                                          slot.entry->template_id);
                slot.ok = true;
            } catch (const FileNotFound& e) {
                slot.missing_file = true;
                slot.error = e.what();
            } catch (const Error& e) {
                slot.error = e.what();
            }
        }
    };
    int n_threads = std::max(1, config.threads);
    if (n_threads == 1) {
        encode_range(0, slots.size());
    } else {
        std::vector<std::thread> pool;
        std::size_t chunk = (slots.size() + n_threads - 1) / n_threads;
        for (int t = 0; t < n_threads; ++t) {
            std::size_t begin = static_cast<std::size_t>(t) * chunk;
            std::size_t end = std::min(slots.size(), begin + chunk);
            if (begin < end)
                pool.emplace_back(encode_range, begin, end);
        }
        for (auto& th : pool)
            th.join();
    }

    // a missing file is a sigset defect, not a degraded capture: fail hard
    for (const Slot* slot : slots)
        if (slot->missing_file)
            throw Error("template " + slot->entry->template_id +
                        " references a missing file: " + slot->error);

    CollectResult result;
    std::vector<double> values(sigset.comparisons.size(), -1.0);
    std::vector<std::string> errors(sigset.comparisons.size());
    auto score_range = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const auto& c = sigset.comparisons[i];
            const Slot& p = probes.at(c.probe_template_id);
            const Slot& e = enrolled.at(c.enrolled_template_id);
            if (!p.ok) {
                errors[i] = c.probe_template_id + ": " + p.error;
                continue;
            }
            if (!e.ok) {
                errors[i] = c.enrolled_template_id + ": " + e.error;
                continue;
            }
            try {
                values[i] = hamming_similarity_shifted(p.code, e.code, config.max_shift,
                                                       config.use_masks).value;
            } catch (const Error& ex) {
                errors[i] = c.probe_template_id + " vs " + c.enrolled_template_id + ": " +
                            ex.what();
            }
        }
    };
    if (n_threads == 1) {
        score_range(0, sigset.comparisons.size());
    } else {
        std::vector<std::thread> pool;
        std::size_t chunk = (sigset.comparisons.size() + n_threads - 1) / n_threads;
        for (int t = 0; t < n_threads; ++t) {
            std::size_t begin = static_cast<std::size_t>(t) * chunk;
            std::size_t end = std::min(sigset.comparisons.size(), begin + chunk);
            if (begin < end)
                pool.emplace_back(score_range, begin, end);
        }
        for (auto& th : pool)
            th.join();
    }

    for (std::size_t i = 0; i < sigset.comparisons.size(); ++i) {
        const auto& c = sigset.comparisons[i];
        if (values[i] < 0.0) {
            ++result.failed_comparisons;
            result.failure_notes.push_back(errors[i]);
            continue;
        }
        result.scores.pairs.push_back(
            {c.probe_template_id, c.enrolled_template_id, c.declared_label, values[i]});
    }
    return result;
}

DistributionStats stats(const std::vector<double>& scores) {
    if (scores.empty())
        throw EmptyInput("stats over an empty score list");
    DistributionStats s;
    s.count = scores.size();
    double sum = 0.0;
    s.min = scores[0];
    s.max = scores[0];
    for (double x : scores) {
        sum += x;
        s.min = std::min(s.min, x);
        s.max = std::max(s.max, x);
        int bin = std::min(kHistogramBins - 1, static_cast<int>(x * kHistogramBins));
        ++s.histogram[bin];
    }
    s.mean = sum / scores.size();
    double acc = 0.0;
    for (double x : scores)
        acc += (x - s.mean) * (x - s.mean);
    s.std_dev = std::sqrt(acc / scores.size());
    return s;
}

DistributionStats robust_stats(const std::vector<double>& scores) {
    DistributionStats s = stats(scores);
    std::vector<double> v(scores);
    auto median_of = [](std::vector<double>& x) {
        std::size_t mid = x.size() / 2;
        std::nth_element(x.begin(), x.begin() + mid, x.end());
        double hi = x[mid];
        if (x.size() % 2 == 0) {
            std::nth_element(x.begin(), x.begin() + mid - 1, x.begin() + mid);
            return (x[mid - 1] + hi) / 2.0;
        }
        return hi;
    };
    double med = median_of(v);
    for (double& x : v)
        x = std::abs(x - med);
    double mad = median_of(v);
    s.mean = med;
    s.std_dev = 1.4826 * mad; // consistent with sigma for normal data
    return s;
}

double decidability(const DistributionStats& imposter, const DistributionStats& genuine) {
    double pooled = (imposter.std_dev * imposter.std_dev +
                     genuine.std_dev * genuine.std_dev) / 2.0;
    if (pooled == 0.0) {
        if (imposter.mean == genuine.mean)
            throw ZeroVariance("equal means with zero variance: decidability undefined");
        return std::numeric_limits<double>::infinity();
    }
    return std::abs(imposter.mean - genuine.mean) / std::sqrt(pooled);
}

std::vector<std::pair<double, double>> far_frr_curves(const ScoreSet& scores,
                                                      const std::vector<double>& thresholds) {
    auto imp = sorted_scores(scores.imposter_scores());
    auto gen = sorted_scores(scores.genuine_scores());
    if (imp.empty() || gen.empty())
        throw EmptyInput("far_frr_curves needs both genuine and imposter scores");
    for (std::size_t i = 1; i < thresholds.size(); ++i)
        if (!(thresholds[i] > thresholds[i - 1]))
            throw Error("thresholds must be strictly increasing");

    std::vector<std::pair<double, double>> out;
    out.reserve(thresholds.size());
    for (double t : thresholds)
        out.emplace_back(far_at(imp, t), frr_at(gen, t));
    return out;
}

std::pair<double, double> eer(const ScoreSet& scores) {
    auto imp = sorted_scores(scores.imposter_scores());
    auto gen = sorted_scores(scores.genuine_scores());
    if (imp.empty() || gen.empty())
        throw EmptyInput("eer needs both genuine and imposter scores");

    double max_imp = imp.back();
    double min_gen = gen.front();
    if (max_imp < min_gen)
        return {0.0, (max_imp + min_gen) / 2.0}; // separated: midpoint of the gap

    // candidate thresholds: merged distinct scores plus midpoints and sentinels
    std::vector<double> merged;
    merged.reserve(imp.size() + gen.size() + 2);
    merged.insert(merged.end(), imp.begin(), imp.end());
    merged.insert(merged.end(), gen.begin(), gen.end());
    std::sort(merged.begin(), merged.end());
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());

    std::vector<double> candidates;
    candidates.push_back(0.0);
    for (std::size_t i = 0; i < merged.size(); ++i) {
        if (i > 0)
            candidates.push_back((merged[i - 1] + merged[i]) / 2.0);
        candidates.push_back(merged[i]);
    }
    candidates.push_back(std::nextafter(merged.back(), 2.0));
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    // f(t) = FAR(t) - FRR(t) is non-increasing; find the sign change
    auto f = [&](double t) { return far_at(imp, t) - frr_at(gen, t); };
    std::size_t lo = 0, hi = candidates.size() - 1;
    if (f(candidates[lo]) <= 0.0)
        return {(far_at(imp, candidates[lo]) + frr_at(gen, candidates[lo])) / 2.0,
                candidates[lo]};
    while (hi - lo > 1) {
        std::size_t mid = (lo + hi) / 2;
        if (f(candidates[mid]) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    double t1 = candidates[lo], t2 = candidates[hi];
    double f2 = f(t2);
    if (f2 == 0.0)
        return {far_at(imp, t2), t2};
    double f1 = f(t1);
    double alpha = f1 / (f1 - f2);
    double far1 = far_at(imp, t1), far2 = far_at(imp, t2);
    double value = far1 + alpha * (far2 - far1);
    double threshold = t1 + alpha * (t2 - t1);
    return {value, threshold};
}

std::vector<OperatingPoint> operating_points(const ScoreSet& scores,
                                             const std::vector<double>& far_targets) {
    auto imp = sorted_scores(scores.imposter_scores());
    auto gen = sorted_scores(scores.genuine_scores());
    if (imp.empty() || gen.empty())
        throw EmptyInput("operating_points needs both genuine and imposter scores");

    constexpr double kStep = 1e-4;
    constexpr int kSteps = 10000;
    std::vector<OperatingPoint> out;
    for (double target : far_targets) {
        if (!(target > 0.0 && target <= 1.0))
            throw Error("far targets must be in (0,1]");
        OperatingPoint pt;
        pt.far_target = target;
        if (target < 1.0 / static_cast<double>(imp.size())) {
            pt.resolvable = false;
            out.push_back(pt);
            continue;
        }
        bool found = false;
        for (int k = 0; k <= kSteps; ++k) {
            double t = k * kStep;
            if (far_at(imp, t) <= target) {
                pt.threshold = t;
                pt.frr = frr_at(gen, t);
                found = true;
                break;
            }
        }
        if (!found) { // imposters at 1.0: step just past the maximum
            pt.threshold = std::nextafter(imp.back(), 2.0);
            pt.frr = frr_at(gen, pt.threshold);
        }
        out.push_back(pt);
    }
    return out;
}

std::vector<RocPoint> roc(const ScoreSet& scores) {
    auto imp = sorted_scores(scores.imposter_scores());
    auto gen = sorted_scores(scores.genuine_scores());
    if (imp.empty() || gen.empty())
        throw EmptyInput("roc needs both genuine and imposter scores");

    std::vector<double> merged;
    merged.insert(merged.end(), imp.begin(), imp.end());
    merged.insert(merged.end(), gen.begin(), gen.end());
    std::sort(merged.begin(), merged.end(), std::greater<>());
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());

    std::vector<RocPoint> curve;
    curve.push_back({0.0, 0.0}); // threshold above every score
    for (double t : merged)
        curve.push_back({far_at(imp, t), 1.0 - frr_at(gen, t)});
    curve.push_back({1.0, 1.0}); // threshold 0 accepts everything
    std::stable_sort(curve.begin(), curve.end(), [](const RocPoint& a, const RocPoint& b) {
        return a.far < b.far || (a.far == b.far && a.tar < b.tar);
    });
    curve.erase(std::unique(curve.begin(), curve.end(),
                            [](const RocPoint& a, const RocPoint& b) {
                                return a.far == b.far && a.tar == b.tar;
                            }),
                curve.end());
    return curve;
}

double roc_auc(const std::vector<RocPoint>& curve) {
    double auc = 0.0;
    for (std::size_t i = 1; i < curve.size(); ++i)
        auc += (curve[i].far - curve[i - 1].far) * (curve[i].tar + curve[i - 1].tar) / 2.0;
    return auc;
}

std::vector<MislabelSuspect> detect_mislabels(const ScoreSet& scores,
                                              const DistributionStats& imposter,
                                              const DistributionStats& genuine,
                                              double k) {
    double midpoint = (imposter.mean + genuine.mean) / 2.0;
    std::vector<MislabelSuspect> suspects;
    for (const auto& p : scores.pairs) {
        bool flagged = false;
        if (p.declared_label == ComparisonLabel::Imposter) {
            flagged = p.score > imposter.mean + k * imposter.std_dev && p.score >= midpoint;
        } else {
            flagged = p.score < genuine.mean - k * genuine.std_dev && p.score <= midpoint;
        }
        if (flagged)
            suspects.push_back(
                {p.probe_template_id, p.enrolled_template_id, p.declared_label, p.score});
    }
    return suspects;
}

EvalReport evaluate(const ScoreSet& scores, const std::vector<double>& far_targets,
                    double mislabel_k) {
    auto gen = scores.genuine_scores();
    auto imp = scores.imposter_scores();
    if (gen.empty() || imp.empty())
        throw EmptyInput("evaluation needs both genuine and imposter scores");

    EvalReport report;
    report.genuine_stats = stats(gen);
    report.imposter_stats = stats(imp);
    report.decidability = decidability(report.imposter_stats, report.genuine_stats);
    std::tie(report.eer_value, report.eer_threshold) = eer(scores);
    report.operating_points = operating_points(scores, far_targets);
    report.roc = roc(scores);
    report.min_genuine = report.genuine_stats.min;
    report.max_imposter = report.imposter_stats.max;
    // plain moments are contaminated by the very outliers we hunt; flag
    // against median/MAD estimates instead
    report.suspected_mislabels =
        detect_mislabels(scores, robust_stats(imp), robust_stats(gen), mislabel_k);

    std::vector<double> thresholds;
    thresholds.reserve(1001);
    for (int k = 0; k <= 1000; ++k)
        thresholds.push_back(k / 1000.0);
    auto curve = far_frr_curves(scores, thresholds);
    for (std::size_t i = 0; i < thresholds.size(); ++i)
        report.far_frr.emplace_back(thresholds[i], curve[i].first, curve[i].second);
    return report;
}

} // namespace iris
