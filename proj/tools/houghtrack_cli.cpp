// Command-line front end: scene generation, detection, tracking, parameter
// learning, evaluation, and timing.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "houghtrack/houghtrack.hpp"

namespace fs = std::filesystem;
using namespace houghtrack;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitIo = 4;

struct GridFlags {
    double theta_min_deg = 60.0;
    double theta_max_deg = 120.0;
    double theta_step_deg = 0.5;
    double r_min = 0.0;
    double r_max = -1.0;  // <0: use the voter-file image height
    double r_step = 1.0;

    HypothesisGrid build(int height_hint) const {
        HypothesisGrid g;
        g.theta_min = deg_to_rad(theta_min_deg);
        g.theta_max = deg_to_rad(theta_max_deg);
        g.theta_step = deg_to_rad(theta_step_deg);
        g.r_min = r_min;
        g.r_max = r_max >= 0.0 ? r_max : static_cast<double>(height_hint);
        g.r_step = r_step;
        if (!g.valid()) throw config_error("invalid hypothesis grid flags");
        return g;
    }
};

void add_grid_flags(CLI::App* cmd, GridFlags& g) {
    cmd->add_option("--theta-min", g.theta_min_deg, "grid theta minimum, degrees");
    cmd->add_option("--theta-max", g.theta_max_deg, "grid theta maximum, degrees");
    cmd->add_option("--theta-step", g.theta_step_deg, "grid theta step, degrees");
    cmd->add_option("--r-min", g.r_min, "grid r minimum, px");
    cmd->add_option("--r-max", g.r_max, "grid r maximum, px (default: image height)");
    cmd->add_option("--r-step", g.r_step, "grid r step, px");
}

int cmd_generate(const std::string& script_path, uint64_t seed, const std::string& out_dir) {
    const SceneScript script = load_scene_script(script_path);
    const SyntheticSequence seq = generate(script, seed, script.render);
    fs::create_directories(out_dir);
    write_voters(seq.observations, out_dir + "/observations.txt", script.width, script.height);
    write_ground_truth(seq.truth, out_dir + "/ground_truth.txt");
    if (script.render) {
        fs::create_directories(out_dir + "/frames");
        char name[64];
        for (size_t k = 0; k < seq.images.size(); ++k) {
            std::snprintf(name, sizeof(name), "/frames/frame_%06zu.pgm", k + 1);
            write_pgm(seq.images[k], out_dir + name);
        }
    }
    std::cout << "wrote " << seq.observations.size() << " frames to " << out_dir << "\n";
    return kExitOk;
}

int cmd_detect(const std::string& image_dir, const std::string& bd_model_path,
               const std::string& ln_model_path, const WindowSpec& spec,
               const std::string& out_path, double grad_threshold) {
    std::vector<std::string> files;
    if (!fs::is_directory(image_dir)) throw io_error("not a directory: " + image_dir);
    for (const auto& e : fs::directory_iterator(image_dir))
        if (e.path().extension() == ".pgm") files.push_back(e.path().string());
    if (files.empty()) throw io_error("no .pgm frames in " + image_dir);
    std::sort(files.begin(), files.end());

    DetectorModel bd_model, ln_model;
    if (!bd_model_path.empty()) bd_model = load_detector_model(bd_model_path);
    if (!ln_model_path.empty()) ln_model = load_detector_model(ln_model_path);
    const auto bank = make_default_filter_bank();

    std::vector<FrameObservation> obs;
    obs.reserve(files.size());
    int width = 0, height = 0;
    for (size_t k = 0; k < files.size(); ++k) {
        const GrayImage img = read_pgm(files[k]);
        width = img.width;
        height = img.height;
        FrameObservation o;
        o.index = static_cast<int>(k) + 1;
        if (!bd_model_path.empty()) o.bd_voters = scan_windows(img, spec, bd_model, bank);
        if (!ln_model_path.empty()) o.ln_voters = scan_windows(img, spec, ln_model, bank);
        const double thr = grad_threshold >= 0.0 ? grad_threshold : default_gradient_threshold(img);
        o.grad_voters = gradient_voters(img, thr);
        obs.push_back(std::move(o));
    }
    write_voters(obs, out_path, width, height);
    std::cout << "wrote voters for " << obs.size() << " frames to " << out_path << "\n";
    return kExitOk;
}

int cmd_track(const std::string& voters_path, const std::string& params_path,
              const std::string& tracker, const std::string& out_path, const GridFlags& gridf,
              double q, double m, const std::string& overlay_dir, const std::string& gt_path) {
    int width = 160, height = 120;
    const std::vector<FrameObservation> obs = read_voters(voters_path, &width, &height);
    if (obs.empty()) throw io_error("voter file has no frames: " + voters_path);
    const HypothesisGrid grid = gridf.build(height);
    ModelParams params;
    if (!params_path.empty()) params = load_params(params_path);
    const VoteConfig cfg{params.sigma, 9.0};
    const InterframeWindows lam{params.lambda_bd_theta, params.lambda_bd_r,
                                params.lambda_ln_theta, params.lambda_ln_r};

    std::vector<TrackedFrameLines> lines;
    if (tracker == "structured") {
        const std::vector<FrameResult> results = run_sequence(obs, grid, params);
        write_results_jsonl(results, out_path);
        lines.reserve(results.size());
        for (const auto& r : results)
            lines.push_back({r.state.h_bd, r.state.h_ln, 0.0, 0.0});
    } else {
        if (tracker == "baseline1") lines = baseline1(obs, grid, cfg);
        else if (tracker == "baseline2") lines = baseline2(obs, grid, cfg, lam);
        else if (tracker == "baseline3") lines = baseline3(obs, grid, cfg, lam);
        else if (tracker == "kalman") lines = kalman_track(obs, grid, cfg, q, m);
        else throw config_error("unknown tracker `" + tracker + "`");
        write_lines_jsonl(lines, out_path);
    }

    if (!overlay_dir.empty()) {
        std::vector<GroundTruthFrame> gt;
        if (!gt_path.empty()) gt = read_ground_truth(gt_path);
        fs::create_directories(overlay_dir);
        char name[64];
        for (size_t k = 0; k < lines.size(); ++k) {
            std::snprintf(name, sizeof(name), "/overlay_%06zu.svg", k + 1);
            const GroundTruthFrame* t = k < gt.size() ? &gt[k] : nullptr;
            write_overlay_svg(overlay_dir + name, width, height, lines[k], t);
        }
    }
    std::cout << "tracked " << lines.size() << " frames (" << tracker << ") -> " << out_path
              << "\n";
    return kExitOk;
}

int cmd_learn(const std::vector<std::string>& gt_paths, const std::string& out_path,
              double theta_step_deg, double r_step, double lambda_mode_default) {
    ModelParams params;
    std::vector<GroundTruthFrame> all;
    LearnedInterframe inter;
    bool inter_ok = false;
    for (const auto& p : gt_paths) {
        const auto gt = read_ground_truth(p);
        all.insert(all.end(), gt.begin(), gt.end());
        if (gt.size() >= 2) {
            // Deltas are per sequence; multiple files pool conservatively by
            // taking the widest learned window.
            const LearnedInterframe l = learn_interframe_lambdas(gt);
            if (!inter_ok) {
                inter = l;
                inter_ok = true;
            } else {
                inter.bd.lambda_theta = std::max(inter.bd.lambda_theta, l.bd.lambda_theta);
                inter.bd.lambda_r = std::max(inter.bd.lambda_r, l.bd.lambda_r);
                inter.ln.lambda_theta = std::max(inter.ln.lambda_theta, l.ln.lambda_theta);
                inter.ln.lambda_r = std::max(inter.ln.lambda_r, l.ln.lambda_r);
            }
        }
    }
    if (!inter_ok) throw config_error("learning needs at least one sequence with >= 2 frames");
    params.lambda_bd_theta = inter.bd.lambda_theta;
    params.lambda_bd_r = inter.bd.lambda_r;
    params.lambda_ln_theta = inter.ln.lambda_theta;
    params.lambda_ln_r = inter.ln.lambda_r;

    const int violations = count_structure_violations(all, params);
    if (violations > 0)
        std::cerr << "warning: " << violations
                  << " ground-truth frames violate the structure constraint\n";

    const StructureLambdas str = learn_structure_lambdas(all, params);
    params.lambda_str1 = str.str1;
    params.lambda_str2 = str.str2;
    if (!str.str1_learned) std::cerr << "warning: near band empty, lambda_str1 kept at default\n";
    if (!str.str2_learned) std::cerr << "warning: far band empty, lambda_str2 kept at default\n";

    try {
        const DminFit fit = learn_dmin_regression(all);
        params.dmin_a = fit.a;
        params.dmin_b = fit.b;
    } catch (const config_error& e) {
        std::cerr << "warning: D_min regression skipped (" << e.what() << ")\n";
    }

    params.lambda_mode = lambda_mode_default;

    HypothesisGrid grid;
    grid.theta_min = 0.0;
    grid.theta_max = kPi;
    grid.theta_step = deg_to_rad(theta_step_deg);
    grid.r_min = 0.0;
    grid.r_max = 1.0;
    grid.r_step = r_step;
    apply_lambda_floors(params, grid);

    save_params(params, out_path);
    std::cout << params_to_string(params);
    return kExitOk;
}

int cmd_eval(const std::string& results_path, const std::string& gt_path, int width, int height,
             const AcceptThresholds& thr, const std::string& csv_path,
             const std::string& json_path, const std::string& per_frame_path,
             const std::string& polygons_path) {
    const std::vector<TrackedFrameLines> pred = read_results_jsonl(results_path);
    std::vector<GroundTruthFrame> gt = read_ground_truth(gt_path);
    if (!polygons_path.empty()) read_polygons(polygons_path, gt);
    if (pred.size() != gt.size())
        throw config_error("results and ground truth have different frame counts");
    const MetricReport rep = evaluate(pred, gt, width, height, thr);

    std::cout << metric_report_csv_header() << "\n" << metric_report_csv_row(rep) << "\n";
    if (!csv_path.empty()) {
        auto out = houghtrack::detail::open_out(csv_path);
        out << metric_report_csv_header() << "\n" << metric_report_csv_row(rep) << "\n";
    }
    if (!json_path.empty()) {
        auto out = houghtrack::detail::open_out(json_path);
        out << metric_report_to_json(rep).dump(2) << "\n";
    }
    if (!per_frame_path.empty()) {
        const auto frames = evaluate_frames(pred, gt, width, height, thr);
        auto out = houghtrack::detail::open_out(per_frame_path);
        out << "frame,bd_pxl,ld_pxl,bd_ang,ln_ang,bd_pen,ln_pen,good,overlap\n";
        for (size_t k = 0; k < frames.size(); ++k) {
            const auto& f = frames[k];
            out << (k + 1) << "," << f.bd_pxl << "," << f.ln_pxl << "," << f.bd_ang << ","
                << f.ln_ang << "," << f.bd_pen << "," << f.ln_pen << "," << (f.good ? 1 : 0) << ","
                << f.overlap << "\n";
        }
    }
    return kExitOk;
}

int cmd_bench(const std::string& script_path, uint64_t seed, const std::string& json_path) {
    const SceneScript script = load_scene_script(script_path);
    const BenchReport rep = run_bench(script, seed);
    std::printf("frames: %d\n", rep.frames);
    std::printf("inference-only per frame: p50 %.3f ms, p90 %.3f ms, p99 %.3f ms\n",
                rep.infer_p50_ms, rep.infer_p90_ms, rep.infer_p99_ms);
    if (rep.has_detect)
        std::printf("detect+inference per frame: p50 %.3f ms, p90 %.3f ms, p99 %.3f ms\n",
                    rep.detect_p50_ms, rep.detect_p90_ms, rep.detect_p99_ms);
    if (!json_path.empty()) {
        nlohmann::ordered_json j;
        j["frames"] = rep.frames;
        j["inference_only"] = {{"p50_ms", rep.infer_p50_ms},
                               {"p90_ms", rep.infer_p90_ms},
                               {"p99_ms", rep.infer_p99_ms}};
        if (rep.has_detect)
            j["detect_plus_inference"] = {{"p50_ms", rep.detect_p50_ms},
                                          {"p90_ms", rep.detect_p90_ms},
                                          {"p99_ms", rep.detect_p99_ms}};
        auto out = houghtrack::detail::open_out(json_path);
        out << j.dump(2) << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"structured Hough voting line tracker"};
    app.require_subcommand(1);

    // generate
    std::string g_script, g_out;
    uint64_t g_seed = 1;
    auto* gen = app.add_subcommand("generate", "generate a synthetic scene");
    gen->add_option("--script", g_script, "scene script file")->required();
    gen->add_option("--seed", g_seed, "random seed");
    gen->add_option("--out", g_out, "output directory")->required();

    // detect
    std::string d_images, d_bd_model, d_ln_model, d_out;
    WindowSpec d_spec;
    double d_grad_threshold = -1.0;
    auto* det = app.add_subcommand("detect", "run detectors on an image directory");
    det->add_option("--images", d_images, "directory of .pgm frames")->required();
    det->add_option("--bd-model", d_bd_model, "border detector model file");
    det->add_option("--ln-model", d_ln_model, "lane detector model file");
    det->add_option("--out", d_out, "output voter file")->required();
    det->add_option("--win-w", d_spec.win_w, "window width");
    det->add_option("--win-h", d_spec.win_h, "window height");
    det->add_option("--stride-x", d_spec.stride_x, "horizontal stride");
    det->add_option("--stride-y", d_spec.stride_y, "vertical stride");
    det->add_option("--band-lo", d_spec.band_row0, "detection band first image row");
    det->add_option("--band-hi", d_spec.band_row1, "detection band end row (exclusive)");
    det->add_option("--grad-threshold", d_grad_threshold,
                    "Type-2 gradient threshold (default: 10% of max)");

    // track
    std::string t_voters, t_params, t_tracker = "structured", t_out, t_overlay, t_gt;
    GridFlags t_grid;
    double t_q = 0.2, t_m = 0.25;
    auto* trk = app.add_subcommand("track", "track a voter sequence");
    trk->add_option("--voters", t_voters, "voter file")->required();
    trk->add_option("--params", t_params, "model parameter file");
    trk->add_option("--tracker", t_tracker,
                    "structured | baseline1 | baseline2 | baseline3 | kalman");
    trk->add_option("--out", t_out, "output results JSONL")->required();
    add_grid_flags(trk, t_grid);
    trk->add_option("--q", t_q, "kalman process noise");
    trk->add_option("--m", t_m, "kalman measurement noise");
    trk->add_option("--overlay-dir", t_overlay, "write per-frame SVG overlays here");
    trk->add_option("--gt", t_gt, "ground truth for overlay strokes");

    // learn
    std::vector<std::string> l_gt;
    std::string l_out;
    double l_theta_step = 0.5, l_r_step = 1.0, l_mode_default = 100.0;
    auto* lrn = app.add_subcommand("learn", "estimate model parameters from ground truth");
    lrn->add_option("--gt", l_gt, "ground truth file(s)")->required();
    lrn->add_option("--out", l_out, "output parameter file")->required();
    lrn->add_option("--theta-step", l_theta_step, "grid theta step for lambda floors, degrees");
    lrn->add_option("--r-step", l_r_step, "grid r step for lambda floors, px");
    lrn->add_option("--lambda-mode-default", l_mode_default,
                    "lambda_mode when no perturbation events are available");

    // eval
    std::string e_results, e_gt, e_csv, e_json, e_pf, e_poly;
    int e_width = 160, e_height = 120;
    AcceptThresholds e_thr;
    auto* evl = app.add_subcommand("eval", "score results against ground truth");
    evl->add_option("--results", e_results, "results JSONL")->required();
    evl->add_option("--gt", e_gt, "ground truth file")->required();
    evl->add_option("--width", e_width, "image width");
    evl->add_option("--height", e_height, "image height");
    evl->add_option("--thr-bd", e_thr.bd_pen, "border penalized-distortion threshold");
    evl->add_option("--thr-ln", e_thr.ln_pen, "lane penalized-distortion threshold");
    evl->add_option("--csv", e_csv, "write the CSV report here");
    evl->add_option("--json", e_json, "write the JSON report here");
    evl->add_option("--per-frame", e_pf, "write a per-frame breakdown CSV here");
    evl->add_option("--polygons", e_poly, "shoulder polygon annotations");

    // bench
    std::string b_script, b_json;
    uint64_t b_seed = 1;
    auto* ben = app.add_subcommand("bench", "time the tracker on a generated scene");
    ben->add_option("--script", b_script, "scene script file")->required();
    ben->add_option("--seed", b_seed, "random seed");
    ben->add_option("--json", b_json, "write the timing report here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    }

    try {
        if (gen->parsed()) return cmd_generate(g_script, g_seed, g_out);
        if (det->parsed())
            return cmd_detect(d_images, d_bd_model, d_ln_model, d_spec, d_out, d_grad_threshold);
        if (trk->parsed())
            return cmd_track(t_voters, t_params, t_tracker, t_out, t_grid, t_q, t_m, t_overlay,
                             t_gt);
        if (lrn->parsed()) return cmd_learn(l_gt, l_out, l_theta_step, l_r_step, l_mode_default);
        if (evl->parsed())
            return cmd_eval(e_results, e_gt, e_width, e_height, e_thr, e_csv, e_json, e_pf,
                            e_poly);
        if (ben->parsed()) return cmd_bench(b_script, b_seed, b_json);
    } catch (const infeasible_error& e) {
        std::cerr << "infeasible: " << e.what();
        if (e.frame() > 0) std::cerr << " (frame " << e.frame() << ")";
        std::cerr << "\n";
        return kExitInfeasible;
    } catch (const io_error& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
