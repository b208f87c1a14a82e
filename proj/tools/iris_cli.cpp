#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "iris/evaluation.hpp"
#include "iris/matcher.hpp"
#include "iris/pipeline.hpp"
#include "iris/report.hpp"
#include "iris/synth.hpp"

namespace {

std::vector<double> parse_far_targets(const std::string& spec) {
    std::vector<double> targets;
    std::istringstream in(spec);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        if (tok.empty())
            continue;
        targets.push_back(std::stod(tok));
    }
    if (targets.empty())
        throw CLI::ValidationError("--far-targets", "no targets given");
    return targets;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"cross-sensor iris recognition pipeline"};
    app.require_subcommand(1);

    iris::PipelineConfig pipeline;
    double mislabel_k = 6.0;
    std::string far_targets_spec = "1e-3,1e-4,1e-5,1e-6";
    app.add_option("--max-shift", pipeline.max_shift, "column shift tolerance for matching")
        ->capture_default_str();
    app.add_flag("--use-masks", pipeline.use_masks, "restrict matching to mutually valid bits");
    app.add_option("--threads", pipeline.threads, "worker threads")->capture_default_str();
    app.add_option("--margin-factor", pipeline.margin_factor, "ROI half-side in pupil radii")
        ->capture_default_str();
    app.add_option("--wavelength", pipeline.gabor.center_wavelength,
                   "Log-Gabor center wavelength, pixels")
        ->capture_default_str();
    app.add_option("--sigma-over-f0", pipeline.gabor.sigma_over_f0, "Log-Gabor bandwidth ratio")
        ->capture_default_str();
    app.add_option("--mislabel-k", mislabel_k, "sigma multiplier for mislabel flagging")
        ->capture_default_str();
    app.add_option("--far-targets", far_targets_spec, "comma-separated FAR targets")
        ->capture_default_str();

    // encode
    auto* cmd_encode = app.add_subcommand("encode", "encode a PGM eye image to an iris code");
    std::string encode_input, encode_output, encode_label;
    cmd_encode->add_option("--input", encode_input, "input PGM image")->required();
    cmd_encode->add_option("--output", encode_output, "output .ic01 code")->required();
    cmd_encode->add_option("--label", encode_label, "source id stored in the code");

    // match
    auto* cmd_match = app.add_subcommand("match", "match probe codes against enrolled codes");
    std::vector<std::string> match_probes, match_enrolled;
    std::string aggregation_name = "max";
    cmd_match->add_option("--probe", match_probes, "probe template file (repeatable)")
        ->required();
    cmd_match->add_option("--enrolled", match_enrolled, "enrolled template file (repeatable)")
        ->required();
    cmd_match->add_option("--aggregation", aggregation_name, "max|mean|owa")
        ->capture_default_str();

    // evaluate
    auto* cmd_eval = app.add_subcommand("evaluate", "run a full SigSet evaluation");
    std::string eval_sigset, eval_out;
    cmd_eval->add_option("--sigset", eval_sigset, "sigset CSV")->required();
    cmd_eval->add_option("--out-dir", eval_out, "report output directory")->required();

    // synth
    auto* cmd_synth = app.add_subcommand("synth", "generate a synthetic two-sensor dataset");
    iris::SynthConfig synth;
    std::string synth_out;
    double defect_rate = 0.0;
    cmd_synth->add_option("--out-dir", synth_out, "dataset output directory")->required();
    cmd_synth->add_option("--identities", synth.n_identities, "number of identities")
        ->capture_default_str();
    cmd_synth->add_option("--samples", synth.samples_per_identity_per_sensor,
                          "samples per identity per sensor")
        ->capture_default_str();
    cmd_synth->add_option("--seed", synth.seed, "dataset seed")->capture_default_str();
    cmd_synth->add_option("--mislabel-rate", synth.mislabel_rate,
                          "identity-swap probability per enrollment entry")
        ->capture_default_str();
    cmd_synth->add_option("--imposter-fraction", synth.imposter_fraction,
                          "sampled fraction of cross-identity pairs")
        ->capture_default_str();
    cmd_synth->add_option("--defect-rate", defect_rate,
                          "uniform probability for each defect kind")
        ->capture_default_str();

    // report
    auto* cmd_report = app.add_subcommand("report", "re-emit a report from a scores CSV");
    std::string report_scores, report_out;
    cmd_report->add_option("--scores", report_scores, "scores CSV from a prior evaluation")
        ->required();
    cmd_report->add_option("--out-dir", report_out, "report output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0)
            return app.exit(e); // --help
        std::ostringstream usage;
        int code = app.exit(e, usage, usage);
        std::cerr << usage.str();
        return code == 0 ? 0 : 1;
    }

    try {
        if (*cmd_encode) {
            iris::EyeImage image = iris::load_image(encode_input);
            iris::IrisCode code = iris::encode_eye_image(image, pipeline, encode_label);
            iris::save_code(code, encode_output);
        } else if (*cmd_match) {
            iris::Aggregation agg;
            if (aggregation_name == "max")
                agg = iris::Aggregation::Max;
            else if (aggregation_name == "mean")
                agg = iris::Aggregation::Mean;
            else if (aggregation_name == "owa")
                agg = iris::Aggregation::Owa;
            else {
                std::cerr << "unknown aggregation: " << aggregation_name << "\n";
                return 1;
            }
            std::vector<iris::IrisCode> probes;
            for (const auto& p : match_probes)
                probes.push_back(iris::load_template(p, pipeline, p));
            std::vector<iris::DigitalIdentity> gallery;
            for (const auto& e : match_enrolled) {
                iris::DigitalIdentity id;
                id.identity_id = e;
                id.codes.push_back(iris::load_template(e, pipeline, e));
                id.aggregation = agg;
                gallery.push_back(std::move(id));
            }
            auto matrix = iris::cross_match(probes, gallery, pipeline.max_shift,
                                            pipeline.use_masks, pipeline.threads);
            std::cout << iris::score_matrix_csv(probes, gallery, matrix);
        } else if (*cmd_eval) {
            iris::SigSet sigset = iris::parse_sigset(eval_sigset);
            std::string base = std::filesystem::path(eval_sigset).parent_path().string();
            if (base.empty())
                base = ".";
            iris::CollectResult collected = iris::collect_scores(sigset, pipeline, base);
            iris::EvalReport report = iris::evaluate(
                collected.scores, parse_far_targets(far_targets_spec), mislabel_k);
            report.failed_comparisons = collected.failed_comparisons;
            report.failure_notes = collected.failure_notes;
            iris::emit_report(report, eval_out);
            iris::save_scores_csv(collected.scores,
                                  (std::filesystem::path(eval_out) / "scores.csv").string());
        } else if (*cmd_synth) {
            if (defect_rate > 0.0)
                for (auto kind : {iris::DefectKind::DilatedPupil, iris::DefectKind::Occlusion,
                                  iris::DefectKind::GazeShift, iris::DefectKind::NoIris})
                    synth.defect_rates[kind] = defect_rate;
            iris::generate_dataset(synth, synth_out);
        } else if (*cmd_report) {
            iris::ScoreSet scores = iris::load_scores_csv(report_scores);
            iris::EvalReport report =
                iris::evaluate(scores, parse_far_targets(far_targets_spec), mislabel_k);
            iris::emit_report(report, report_out);
        }
    } catch (const iris::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    } catch (const iris::FileNotFound& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    } catch (const iris::Error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
