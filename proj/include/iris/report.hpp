#pragma once

#include <string>

#include "iris/evaluation.hpp"

namespace iris {

/// Writes summary.txt, histograms.csv, far_frr.csv, roc.csv,
/// operating_points.csv and SVG plots (linear- and log-Y variants for the
/// distributions and FAR/FRR curves, plus the ROC) into out_dir.
/// Output is byte-deterministic for a given report.
void emit_report(const EvalReport& report, const std::string& out_dir);

void save_scores_csv(const ScoreSet& scores, const std::string& path);
ScoreSet load_scores_csv(const std::string& path);

} // namespace iris
