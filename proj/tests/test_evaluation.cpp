#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>

#include "iris/evaluation.hpp"
#include "iris/matcher.hpp"
#include "iris/report.hpp"
#include "iris/synth.hpp"
#include "test_util.hpp"

using namespace iris;

namespace {

ScoreSet make_scores(const std::vector<double>& genuine, const std::vector<double>& imposter) {
    ScoreSet s;
    int i = 0;
    for (double g : genuine)
        s.pairs.push_back({"P" + std::to_string(i++), "E", ComparisonLabel::Genuine, g});
    for (double v : imposter)
        s.pairs.push_back({"P" + std::to_string(i++), "E", ComparisonLabel::Imposter, v});
    return s;
}

// quantize to the similarity lattice of a 11520-bit code
double lattice(double x) {
    return std::clamp(std::round(x * 11520.0) / 11520.0, 0.0, 1.0);
}

ScoreSet random_overlapping(std::mt19937& gen, std::size_t n_genuine, std::size_t n_imposter) {
    std::normal_distribution<double> g(0.62, 0.05), im(0.50, 0.04);
    std::vector<double> gs, is;
    for (std::size_t i = 0; i < n_genuine; ++i)
        gs.push_back(lattice(g(gen)));
    for (std::size_t i = 0; i < n_imposter; ++i)
        is.push_back(lattice(im(gen)));
    return make_scores(gs, is);
}

// naive counting oracle
double naive_far(const std::vector<double>& imposter, double t) {
    std::size_t n = 0;
    for (double v : imposter)
        if (v >= t)
            ++n;
    return static_cast<double>(n) / imposter.size();
}

double naive_frr(const std::vector<double>& genuine, double t) {
    std::size_t n = 0;
    for (double v : genuine)
        if (v < t)
            ++n;
    return static_cast<double>(n) / genuine.size();
}

// dense-sweep EER oracle: walk a fine threshold grid, find the FAR/FRR sign
// change, linearly interpolate the crossing
std::pair<double, double> sweep_eer(const ScoreSet& scores, double step = 1e-5) {
    auto gen = scores.genuine_scores();
    auto imp = scores.imposter_scores();
    double prev_t = 0.0;
    double prev_f = naive_far(imp, 0.0) - naive_frr(gen, 0.0);
    double prev_far = naive_far(imp, 0.0);
    for (double t = step;; t += step) {
        double far = naive_far(imp, t);
        double frr = naive_frr(gen, t);
        double f = far - frr;
        if (f <= 0.0) {
            if (f == 0.0 && far == 0.0) {
                // separated at this grid point; the crossing is a gap
                double max_imp = *std::max_element(imp.begin(), imp.end());
                double min_gen = *std::min_element(gen.begin(), gen.end());
                if (max_imp < min_gen)
                    return {0.0, (max_imp + min_gen) / 2.0};
            }
            double alpha = prev_f / (prev_f - f);
            return {prev_far + alpha * (far - prev_far), prev_t + alpha * (t - prev_t)};
        }
        prev_t = t;
        prev_f = f;
        prev_far = far;
        if (t > 1.5)
            return {prev_far, prev_t};
    }
}

// pairwise Mann-Whitney statistic with half-weight ties
double mann_whitney_auc(const std::vector<double>& genuine,
                        const std::vector<double>& imposter) {
    double wins = 0.0;
    for (double g : genuine)
        for (double v : imposter) {
            if (g > v)
                wins += 1.0;
            else if (g == v)
                wins += 0.5;
        }
    return wins / (static_cast<double>(genuine.size()) * imposter.size());
}

} // namespace

TEST_CASE("stats basics") {
    DistributionStats s = stats({0.5, 0.5});
    CHECK(s.mean == 0.5);
    CHECK(s.std_dev == 0.0);
    DistributionStats t = stats({0.0, 1.0});
    CHECK(t.mean == 0.5);
    CHECK(t.std_dev == 0.5); // population std
    CHECK(t.min == 0.0);
    CHECK(t.max == 1.0);
    CHECK(t.histogram[0] == 1);
    CHECK(t.histogram[kHistogramBins - 1] == 1); // last bin closed
    CHECK_THROWS_AS(stats({}), EmptyInput);
}

TEST_CASE("stats match a two-pass oracle on random data") {
    std::mt19937 gen(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> xs(10000);
    for (auto& x : xs)
        x = u(gen);
    DistributionStats s = stats(xs);
    double mean = 0.0;
    for (double x : xs)
        mean += x;
    mean /= xs.size();
    double var = 0.0;
    for (double x : xs)
        var += (x - mean) * (x - mean);
    var /= xs.size();
    CHECK(s.mean == doctest::Approx(mean).epsilon(1e-12));
    CHECK(s.std_dev == doctest::Approx(std::sqrt(var)).epsilon(1e-12));
    std::uint64_t total = 0;
    for (auto b : s.histogram)
        total += b;
    CHECK(total == xs.size());
}

TEST_CASE("robust stats shrug off a contaminating outlier cluster") {
    std::mt19937 gen(30);
    std::normal_distribution<double> core(0.5, 0.01);
    std::vector<double> xs;
    for (int i = 0; i < 950; ++i)
        xs.push_back(core(gen));
    for (int i = 0; i < 50; ++i)
        xs.push_back(0.9); // 5% contamination far from the core
    DistributionStats r = robust_stats(xs);
    CHECK(r.mean == doctest::Approx(0.5).epsilon(0.01));
    CHECK(r.std_dev == doctest::Approx(0.01).epsilon(0.15));
    CHECK(stats(xs).std_dev > 5.0 * r.std_dev); // the plain moments blow up
}

TEST_CASE("decidability reproduces the published small/medium/large values") {
    auto d = [](double mu1, double s1, double mu2, double s2) {
        DistributionStats imposter, genuine;
        imposter.mean = mu1;
        imposter.std_dev = s1;
        genuine.mean = mu2;
        genuine.std_dev = s2;
        return decidability(imposter, genuine);
    };
    CHECK(d(0.49845, 0.0136, 0.66322, 0.0395) == doctest::Approx(5.5779).epsilon(2e-4));
    CHECK(d(0.49874, 0.0127, 0.66038, 0.0385) == doctest::Approx(5.6386).epsilon(2e-4));
    CHECK(d(0.49882, 0.0124, 0.66065, 0.0380) == doctest::Approx(5.7255).epsilon(2e-4));
    CHECK(d(0.5, 0.1, 0.5, 0.2) == 0.0);

    DistributionStats a, b;
    a.mean = b.mean = 0.5;
    CHECK_THROWS_AS(decidability(a, b), ZeroVariance);
}

TEST_CASE("far/frr endpoints") {
    ScoreSet s = make_scores({0.7, 0.8}, {0.2, 0.3});
    auto curve = far_frr_curves(s, {0.0, 0.9});
    CHECK(curve[0].first == 1.0);  // accept all
    CHECK(curve[0].second == 0.0);
    CHECK(curve[1].first == 0.0);  // above every score
    CHECK(curve[1].second == 1.0);
    CHECK_THROWS_AS(far_frr_curves(make_scores({}, {0.5}), {0.5}), EmptyInput);
    CHECK_THROWS_AS(far_frr_curves(s, {0.5, 0.5}), Error);
}

TEST_CASE("far/frr match naive counting and are monotone") {
    std::mt19937 gen(32);
    ScoreSet s = random_overlapping(gen, 500, 800);
    auto genuine = s.genuine_scores();
    auto imposter = s.imposter_scores();
    std::vector<double> thresholds;
    for (int k = 0; k <= 100; ++k)
        thresholds.push_back(k / 100.0);
    auto curve = far_frr_curves(s, thresholds);
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
        REQUIRE(curve[i].first == naive_far(imposter, thresholds[i]));
        REQUIRE(curve[i].second == naive_frr(genuine, thresholds[i]));
        if (i > 0) {
            REQUIRE(curve[i].first <= curve[i - 1].first);
            REQUIRE(curve[i].second >= curve[i - 1].second);
        }
    }
}

TEST_CASE("eer on separated sets reports the gap midpoint") {
    auto [value, threshold] = eer(make_scores({0.9, 0.8, 0.7}, {0.1, 0.2, 0.3}));
    CHECK(value == 0.0);
    CHECK(threshold == 0.5);
}

TEST_CASE("eer on a small crossing set matches the sweep oracle") {
    ScoreSet s = make_scores({0.6, 0.4}, {0.5, 0.3});
    auto [value, threshold] = eer(s);
    auto [ov, ot] = sweep_eer(s);
    (void)ot;
    CHECK(value == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(value == doctest::Approx(ov).epsilon(1e-9));
    // the crossing threshold is the whole plateau (0.4, 0.5]; FAR and FRR
    // must balance there
    CHECK(naive_far({0.5, 0.3}, threshold) == 0.5);
    CHECK(naive_frr({0.6, 0.4}, threshold) == 0.5);
}

TEST_CASE("eer equals the dense sweep on random overlapping sets") {
    std::mt19937 gen(33);
    for (int trial = 0; trial < 20; ++trial) {
        ScoreSet s = random_overlapping(gen, 2000, 3000);
        auto [value, threshold] = eer(s);
        auto [ov, ot] = sweep_eer(s);
        (void)ot;
        REQUIRE(std::abs(value - ov) <= 1e-9);
        // the reported threshold must sit at the crossing: both error rates
        // within one step of the EER value
        REQUIRE(std::abs(naive_far(s.imposter_scores(), threshold) - value) <= 0.02);
        REQUIRE(std::abs(naive_frr(s.genuine_scores(), threshold) - value) <= 0.02);
    }
}

TEST_CASE("operating points basics and unresolvable targets") {
    ScoreSet s = make_scores({0.9, 0.8}, {0.1, 0.2});
    auto pts = operating_points(s, {1.0});
    CHECK(pts[0].threshold == 0.0);
    CHECK(pts[0].frr == 0.0);

    std::mt19937 gen(34);
    ScoreSet big = random_overlapping(gen, 100, 1000);
    auto pts2 = operating_points(big, {1e-6});
    CHECK_FALSE(pts2[0].resolvable); // 1000 imposters cannot resolve 1e-6
}

TEST_CASE("operating points match a brute-force grid scan") {
    std::mt19937 gen(35);
    for (int trial = 0; trial < 5; ++trial) {
        ScoreSet s = random_overlapping(gen, 2000, 5000);
        auto genuine = s.genuine_scores();
        auto imposter = s.imposter_scores();
        std::vector<double> targets = {1e-1, 1e-2, 1e-3};
        auto pts = operating_points(s, targets);
        for (std::size_t i = 0; i < targets.size(); ++i) {
            REQUIRE(pts[i].resolvable);
            // oracle: scan the same grid naively
            bool found = false;
            for (int k = 0; k <= 10000 && !found; ++k) {
                double t = k * 1e-4;
                if (naive_far(imposter, t) <= targets[i]) {
                    REQUIRE(pts[i].threshold == t);
                    REQUIRE(pts[i].frr == naive_frr(genuine, t));
                    found = true;
                }
            }
            REQUIRE(found);
        }
    }
}

TEST_CASE("roc endpoints and the chance line") {
    ScoreSet separated = make_scores({0.8, 0.9}, {0.1, 0.2});
    auto curve = roc(separated);
    bool has_perfect = false;
    for (const auto& p : curve)
        if (p.far == 0.0 && p.tar == 1.0)
            has_perfect = true;
    CHECK(has_perfect);

    // identical multisets: tar == far at every sampled point
    ScoreSet chance = make_scores({0.1, 0.4, 0.7}, {0.1, 0.4, 0.7});
    for (const auto& p : roc(chance))
        REQUIRE(p.tar == doctest::Approx(p.far).epsilon(1e-12));
}

TEST_CASE("roc is monotone and auc equals the Mann-Whitney statistic") {
    std::mt19937 gen(36);
    for (int trial = 0; trial < 10; ++trial) {
        ScoreSet s = random_overlapping(gen, 300, 400);
        auto curve = roc(s);
        for (std::size_t i = 1; i < curve.size(); ++i) {
            REQUIRE(curve[i].far >= curve[i - 1].far);
            REQUIRE(curve[i].tar >= curve[i - 1].tar);
        }
        double auc = roc_auc(curve);
        double mw = mann_whitney_auc(s.genuine_scores(), s.imposter_scores());
        REQUIRE(std::abs(auc - mw) <= 1e-9);
    }
}

TEST_CASE("mislabel detection flags injected swaps and spares clean data") {
    std::mt19937 gen(37);
    for (int seed = 0; seed < 10; ++seed) {
        std::normal_distribution<double> g(0.66, 0.008), im(0.50, 0.008);
        ScoreSet s;
        for (int i = 0; i < 500; ++i)
            s.pairs.push_back({"Pg" + std::to_string(i), "E", ComparisonLabel::Genuine,
                               std::clamp(g(gen), 0.0, 1.0)});
        for (int i = 0; i < 500; ++i)
            s.pairs.push_back({"Pi" + std::to_string(i), "E", ComparisonLabel::Imposter,
                               std::clamp(im(gen), 0.0, 1.0)});
        auto imposter_stats = stats(s.imposter_scores());
        auto genuine_stats = stats(s.genuine_scores());
        CHECK(detect_mislabels(s, imposter_stats, genuine_stats, 6.0).empty());

        // inject one swap in each direction
        ScoreSet injected = s;
        injected.pairs.push_back({"swapG", "E", ComparisonLabel::Imposter, 0.68});
        injected.pairs.push_back({"swapI", "E", ComparisonLabel::Genuine, 0.50});
        auto suspects = detect_mislabels(injected, stats(injected.imposter_scores()),
                                         stats(injected.genuine_scores()), 6.0);
        REQUIRE(suspects.size() == 2);
        std::vector<std::string> ids = {suspects[0].probe_template_id,
                                        suspects[1].probe_template_id};
        std::sort(ids.begin(), ids.end());
        REQUIRE(ids == std::vector<std::string>{"swapG", "swapI"});
    }
}

TEST_CASE("report emission is deterministic and complete") {
    std::mt19937 gen(38);
    ScoreSet s = random_overlapping(gen, 400, 600);
    EvalReport report = evaluate(s, {1e-1, 1e-2, 1e-3, 1e-6});
    CHECK(report.decidability > 0.0);

    auto dir_a = testutil::scratch_dir("report_a");
    auto dir_b = testutil::scratch_dir("report_b");
    emit_report(report, dir_a);
    emit_report(report, dir_b);
    for (const char* name :
         {"summary.txt", "histograms.csv", "far_frr.csv", "roc.csv", "operating_points.csv",
          "distributions_linear.svg", "distributions_log.svg", "far_frr_linear.svg",
          "far_frr_log.svg", "roc.svg"}) {
        std::ifstream a(dir_a + "/" + std::string(name), std::ios::binary);
        std::ifstream b(dir_b + "/" + std::string(name), std::ios::binary);
        REQUIRE(a.good());
        REQUIRE(b.good());
        std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
        std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
        REQUIRE(sa == sb);
        REQUIRE_FALSE(sa.empty());
    }

    // row counts: header + bins / thresholds
    std::ifstream hist(dir_a + "/histograms.csv");
    std::string line;
    int rows = 0;
    while (std::getline(hist, line))
        ++rows;
    CHECK(rows == kHistogramBins + 1);
    std::ifstream ff(dir_a + "/far_frr.csv");
    rows = 0;
    while (std::getline(ff, line))
        ++rows;
    CHECK(rows == 1002);

    // summary prints decidability to 4 decimals
    std::ifstream summary(dir_a + "/summary.txt");
    std::string text((std::istreambuf_iterator<char>(summary)),
                     std::istreambuf_iterator<char>());
    char expect[64];
    std::snprintf(expect, sizeof expect, "decidability=%.4f", report.decidability);
    CHECK(text.find(expect) != std::string::npos);
}

TEST_CASE("collect_scores runs the pipeline over a sigset") {
    auto dir = testutil::scratch_dir("collect");
    // two identities, one clean sample each per role
    for (int id = 0; id < 2; ++id) {
        IdentityTexture tex = generate_identity_texture(7, id);
        EyeImage enroll = render_sample(tex, default_sensor_a(), 7, 100 + id, {});
        EyeImage probe = render_sample(tex, default_sensor_a(), 7, 200 + id, {});
        save_image(enroll, dir + "/e" + std::to_string(id) + ".pgm");
        save_image(probe, dir + "/p" + std::to_string(id) + ".pgm");
    }
    SigSet sigset;
    for (int id = 0; id < 2; ++id) {
        std::string n = std::to_string(id);
        sigset.enrollment_entries.push_back({"E" + n, "id" + n, "e" + n + ".pgm"});
        sigset.probe_entries.push_back({"P" + n, "id" + n, "p" + n + ".pgm"});
    }
    // self-comparison of the same file must score exactly 1.0
    sigset.probe_entries.push_back({"P0self", "id0", "e0.pgm"});
    for (int p = 0; p < 2; ++p)
        for (int e = 0; e < 2; ++e)
            sigset.comparisons.push_back({"P" + std::to_string(p), "E" + std::to_string(e),
                                          p == e ? ComparisonLabel::Genuine
                                                 : ComparisonLabel::Imposter});
    sigset.comparisons.push_back({"P0self", "E0", ComparisonLabel::Genuine});

    PipelineConfig config;
    CollectResult result = collect_scores(sigset, config, dir);
    REQUIRE(result.scores.pairs.size() == 5);
    CHECK(result.failed_comparisons == 0);
    double min_genuine = 1.0, max_imposter = 0.0;
    for (const auto& pair : result.scores.pairs) {
        if (pair.probe_template_id == "P0self")
            CHECK(pair.score == 1.0);
        if (pair.declared_label == ComparisonLabel::Genuine)
            min_genuine = std::min(min_genuine, pair.score);
        else
            max_imposter = std::max(max_imposter, pair.score);
    }
    CHECK(min_genuine > max_imposter);

    // scores must equal a direct recompute of the same comparisons
    auto code_of = [&](const std::string& file) {
        return encode_eye_image(load_image(dir + "/" + file), config);
    };
    IrisCode p0 = code_of("p0.pgm");
    IrisCode e1 = code_of("e1.pgm");
    for (const auto& pair : result.scores.pairs)
        if (pair.probe_template_id == "P0" && pair.enrolled_template_id == "E1")
            CHECK(pair.score == hamming_similarity(p0, e1).value);
}

TEST_CASE("collect_scores names the template that references a missing file") {
    auto dir = testutil::scratch_dir("collect_missing");
    IdentityTexture tex = generate_identity_texture(8, 0);
    save_image(render_sample(tex, default_sensor_a(), 8, 1, {}), dir + "/e0.pgm");
    SigSet sigset;
    sigset.enrollment_entries.push_back({"E0", "id0", "e0.pgm"});
    sigset.probe_entries.push_back({"P_gone", "id0", "nope.pgm"});
    sigset.comparisons.push_back({"P_gone", "E0", ComparisonLabel::Genuine});
    try {
        collect_scores(sigset, PipelineConfig{}, dir);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("P_gone") != std::string::npos);
    }
}

TEST_CASE("scores csv round trip") {
    std::mt19937 gen(39);
    ScoreSet s = random_overlapping(gen, 50, 60);
    auto dir = testutil::scratch_dir("scores_csv");
    save_scores_csv(s, dir + "/scores.csv");
    ScoreSet back = load_scores_csv(dir + "/scores.csv");
    REQUIRE(back.pairs.size() == s.pairs.size());
    for (std::size_t i = 0; i < s.pairs.size(); ++i) {
        REQUIRE(back.pairs[i].probe_template_id == s.pairs[i].probe_template_id);
        REQUIRE(back.pairs[i].declared_label == s.pairs[i].declared_label);
        REQUIRE(back.pairs[i].score == doctest::Approx(s.pairs[i].score).epsilon(1e-9));
    }
}
