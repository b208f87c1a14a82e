#include "iris/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace iris {

namespace {

std::string fmt(const char* format, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, format, v);
    return buf;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write " + path);
    out << content;
    if (!out)
        throw IoError("write failed for " + path);
}

struct Series {
    std::string label;
    std::string color;
    std::vector<std::pair<double, double>> points; // data coordinates
};

// Minimal self-contained SVG line chart. log_y plots log10(max(y, floor)).
std::string svg_chart(const std::string& title, const std::vector<Series>& series,
                      bool log_y, double log_floor = 1e-6) {
    const double width = 720, height = 480;
    const double ml = 70, mr = 20, mt = 40, mb = 50;

    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    auto ty = [&](double y) { return log_y ? std::log10(std::max(y, log_floor)) : y; };
    for (const auto& s : series)
        for (auto [x, y] : s.points) {
            xmin = std::min(xmin, x); xmax = std::max(xmax, x);
            ymin = std::min(ymin, ty(y)); ymax = std::max(ymax, ty(y));
        }
    if (xmax <= xmin) xmax = xmin + 1;
    if (ymax <= ymin) ymax = ymin + 1;

    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (width - ml - mr); };
    auto py = [&](double y) {
        return height - mb - (ty(y) - ymin) / (ymax - ymin) * (height - mt - mb);
    };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt("%.0f", width) +
           "\" height=\"" + fmt("%.0f", height) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + fmt("%.0f", width / 2) +
           "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" +
           title + (log_y ? " (log Y)" : "") + "</text>\n";
    // axes
    svg += "<line x1=\"" + fmt("%.1f", ml) + "\" y1=\"" + fmt("%.1f", height - mb) +
           "\" x2=\"" + fmt("%.1f", width - mr) + "\" y2=\"" + fmt("%.1f", height - mb) +
           "\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + fmt("%.1f", ml) + "\" y1=\"" + fmt("%.1f", mt) + "\" x2=\"" +
           fmt("%.1f", ml) + "\" y2=\"" + fmt("%.1f", height - mb) + "\" stroke=\"black\"/>\n";
    // axis ticks
    for (int i = 0; i <= 5; ++i) {
        double x = xmin + (xmax - xmin) * i / 5.0;
        svg += "<text x=\"" + fmt("%.1f", px(x)) + "\" y=\"" + fmt("%.1f", height - mb + 18) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
               fmt("%.3g", x) + "</text>\n";
        double yv = ymin + (ymax - ymin) * i / 5.0;
        std::string ylabel = log_y ? ("1e" + fmt("%.1f", yv)) : fmt("%.3g", yv);
        double ypix = height - mb - (yv - ymin) / (ymax - ymin) * (height - mt - mb);
        svg += "<text x=\"" + fmt("%.1f", ml - 6) + "\" y=\"" + fmt("%.1f", ypix + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + ylabel +
               "</text>\n";
    }
    // series
    double legend_y = mt + 6;
    for (const auto& s : series) {
        svg += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.5\" points=\"";
        for (auto [x, y] : s.points)
            svg += fmt("%.2f", px(x)) + "," + fmt("%.2f", py(y)) + " ";
        svg += "\"/>\n";
        svg += "<text x=\"" + fmt("%.1f", width - mr - 150) + "\" y=\"" + fmt("%.1f", legend_y) +
               "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" + s.color + "\">" +
               s.label + "</text>\n";
        legend_y += 16;
    }
    svg += "</svg>\n";
    return svg;
}

std::vector<std::pair<double, double>> histogram_points(const DistributionStats& s) {
    std::vector<std::pair<double, double>> pts;
    for (int b = 0; b < kHistogramBins; ++b) {
        double center = (b + 0.5) / kHistogramBins;
        pts.emplace_back(center, static_cast<double>(s.histogram[b]));
    }
    return pts;
}

} // namespace

void emit_report(const EvalReport& report, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    auto path = [&](const char* name) {
        return (std::filesystem::path(out_dir) / name).string();
    };

    // summary
    {
        std::string s;
        s += "imposter: count=" + std::to_string(report.imposter_stats.count) +
             " mean=" + fmt("%.5f", report.imposter_stats.mean) +
             " std=" + fmt("%.5f", report.imposter_stats.std_dev) +
             " min=" + fmt("%.6f", report.imposter_stats.min) +
             " max=" + fmt("%.6f", report.imposter_stats.max) + "\n";
        s += "genuine:  count=" + std::to_string(report.genuine_stats.count) +
             " mean=" + fmt("%.5f", report.genuine_stats.mean) +
             " std=" + fmt("%.5f", report.genuine_stats.std_dev) +
             " min=" + fmt("%.6f", report.genuine_stats.min) +
             " max=" + fmt("%.6f", report.genuine_stats.max) + "\n";
        s += "decidability=" + fmt("%.4f", report.decidability) + "\n";
        s += "eer=" + fmt("%.6f", report.eer_value) + " @ threshold " +
             fmt("%.4f", report.eer_threshold) + "\n";
        s += "min_genuine=" + fmt("%.6f", report.min_genuine) +
             " max_imposter=" + fmt("%.6f", report.max_imposter) + "\n";
        s += "roc_auc=" + fmt("%.9f", roc_auc(report.roc)) + "\n";
        for (const auto& p : report.operating_points) {
            s += "operating_point far_target=" + fmt("%.0e", p.far_target);
            if (p.resolvable)
                s += " frr=" + fmt("%.6f", p.frr) + " threshold=" + fmt("%.4f", p.threshold) + "\n";
            else
                s += " UNRESOLVABLE\n";
        }
        s += "suspected_mislabels=" + std::to_string(report.suspected_mislabels.size()) + "\n";
        for (const auto& m : report.suspected_mislabels)
            s += "  suspect " + m.probe_template_id + " vs " + m.enrolled_template_id +
                 " declared=" + (m.declared_label == ComparisonLabel::Genuine ? "G" : "I") +
                 " score=" + fmt("%.6f", m.score) + "\n";
        s += "failed_comparisons=" + std::to_string(report.failed_comparisons) + "\n";
        for (const auto& note : report.failure_notes)
            s += "  failure " + note + "\n";
        write_file(path("summary.txt"), s);
    }

    // histograms.csv
    {
        std::string s = "bin_lo,bin_hi,imposter_count,genuine_count\n";
        for (int b = 0; b < kHistogramBins; ++b) {
            s += fmt("%.6f", static_cast<double>(b) / kHistogramBins) + "," +
                 fmt("%.6f", static_cast<double>(b + 1) / kHistogramBins) + "," +
                 std::to_string(report.imposter_stats.histogram[b]) + "," +
                 std::to_string(report.genuine_stats.histogram[b]) + "\n";
        }
        write_file(path("histograms.csv"), s);
    }

    // far_frr.csv
    {
        std::string s = "threshold,far,frr\n";
        for (auto [t, far, frr] : report.far_frr)
            s += fmt("%.4f", t) + "," + fmt("%.9f", far) + "," + fmt("%.9f", frr) + "\n";
        write_file(path("far_frr.csv"), s);
    }

    // roc.csv
    {
        std::string s = "far,tar\n";
        for (const auto& p : report.roc)
            s += fmt("%.9f", p.far) + "," + fmt("%.9f", p.tar) + "\n";
        write_file(path("roc.csv"), s);
    }

    // operating_points.csv
    {
        std::string s = "far_target,frr,threshold,resolvable\n";
        for (const auto& p : report.operating_points) {
            if (p.resolvable)
                s += fmt("%.0e", p.far_target) + "," + fmt("%.6f", p.frr) + "," +
                     fmt("%.4f", p.threshold) + ",yes\n";
            else
                s += fmt("%.0e", p.far_target) + ",,,UNRESOLVABLE\n";
        }
        write_file(path("operating_points.csv"), s);
    }

    // SVG plots
    {
        std::vector<Series> dist = {
            {"imposter", "#1f3d99", histogram_points(report.imposter_stats)},
            {"genuine", "#b22222", histogram_points(report.genuine_stats)}};
        write_file(path("distributions_linear.svg"),
                   svg_chart("Score Distributions", dist, false));
        write_file(path("distributions_log.svg"),
                   svg_chart("Score Distributions", dist, true, 0.5));

        std::vector<Series> ff(2);
        ff[0] = {"FAR", "#1f3d99", {}};
        ff[1] = {"FRR", "#b22222", {}};
        for (auto [t, far, frr] : report.far_frr) {
            ff[0].points.emplace_back(t, far);
            ff[1].points.emplace_back(t, frr);
        }
        write_file(path("far_frr_linear.svg"), svg_chart("FAR / FRR", ff, false));
        write_file(path("far_frr_log.svg"), svg_chart("FAR / FRR", ff, true));

        std::vector<Series> rc(1);
        rc[0] = {"ROC", "#1f3d99", {}};
        for (const auto& p : report.roc)
            rc[0].points.emplace_back(p.far, p.tar);
        write_file(path("roc.svg"), svg_chart("ROC (FAR / TAR)", rc, false));
    }
}

void save_scores_csv(const ScoreSet& scores, const std::string& path) {
    std::string s = "probe_template_id,enrolled_template_id,declared_label,score\n";
    for (const auto& p : scores.pairs)
        s += p.probe_template_id + "," + p.enrolled_template_id + "," +
             (p.declared_label == ComparisonLabel::Genuine ? "G" : "I") + "," +
             fmt("%.9f", p.score) + "\n";
    write_file(path, s);
}

ScoreSet load_scores_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw FileNotFound("cannot open " + path);
    ScoreSet scores;
    std::string line;
    bool header = true;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (header) {
            header = false;
            continue;
        }
        std::istringstream ls(line);
        std::string probe, enrolled, label, score;
        if (!std::getline(ls, probe, ',') || !std::getline(ls, enrolled, ',') ||
            !std::getline(ls, label, ',') || !std::getline(ls, score))
            throw MalformedSigSet(path + ":" + std::to_string(line_no) + ": bad score row");
        ScoredPair p;
        p.probe_template_id = probe;
        p.enrolled_template_id = enrolled;
        if (label == "G")
            p.declared_label = ComparisonLabel::Genuine;
        else if (label == "I")
            p.declared_label = ComparisonLabel::Imposter;
        else
            throw MalformedSigSet(path + ":" + std::to_string(line_no) + ": bad label " + label);
        try {
            p.score = std::stod(score);
        } catch (const std::exception&) {
            throw MalformedSigSet(path + ":" + std::to_string(line_no) + ": bad score " + score);
        }
        scores.pairs.push_back(std::move(p));
    }
    return scores;
}

} // namespace iris
