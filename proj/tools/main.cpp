#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "shadowroad/color_space.hpp"
#include "shadowroad/image_io.hpp"
#include "shadowroad/pipeline.hpp"
#include "shadowroad/synth.hpp"

namespace fs = std::filesystem;
using namespace shadowroad;

namespace {

std::string frame_tag(std::size_t i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04zu", i);
    return buf;
}

void add_config_flags(CLI::App* cmd, PipelineConfig& cfg, std::string& config_path) {
    cmd->add_option("--config", config_path, "flat key=value config file");
    cmd->add_option("--training-region", cfg.training_region,
                    "trapezoid | rect:x,y,w,h | poly:x1,y1,...");
    cmd->add_option("--d-max", cfg.d_max, "road color distance threshold");
    cmd->add_flag("--no-filter{false}", cfg.filtering_enabled, "disable the shadow filter");
    cmd->add_option("--min-shadow-area", cfg.min_shadow_area, "smallest shadow component kept");
    cmd->add_option("--min-ndi-contrast", cfg.min_ndi_contrast,
                    "NDI class separation below which a frame counts as shadow-free");
    cmd->add_option("--se-detect", cfg.se_detect, "structuring element for shadow detection");
    cmd->add_option("--se-post", cfg.se_post, "structuring element for post-processing");
    cmd->add_option("--se-fill", cfg.se_fill, "structuring element for region filling");
    cmd->add_option("--svm-c", cfg.svm_c, "soft margin parameter");
    cmd->add_option("--svm-tol", cfg.svm_tol, "KKT tolerance");
    cmd->add_option("--samples-per-class", cfg.samples_per_class, "SVM training samples per class");
    cmd->add_option("--seed", cfg.seed, "RNG seed for sampling");
    cmd->add_flag("--no-open{false}", cfg.open_first, "skip the opening step");
    cmd->add_flag("--no-fill-holes{false}", cfg.fill_holes, "skip region filling");
    cmd->add_flag("--no-keep-largest{false}", cfg.keep_largest, "keep all components");
    cmd->add_option("--group-size", cfg.group_size, "frames per metrics group");
    cmd->add_flag("--dump-stages", cfg.dump_stages, "write every intermediate mask");
}

PipelineConfig merge_config(const CLI::App* cmd, const PipelineConfig& cli_cfg,
                            const std::string& config_path) {
    if (config_path.empty()) return cli_cfg;
    PipelineConfig cfg = load_config(config_path);
    // command-line flags win over file values
    auto keep_cli = [&](const char* flag) { return cmd->count(flag) > 0; };
    PipelineConfig merged = cfg;
    if (keep_cli("--training-region")) merged.training_region = cli_cfg.training_region;
    if (keep_cli("--d-max")) merged.d_max = cli_cfg.d_max;
    if (keep_cli("--no-filter")) merged.filtering_enabled = cli_cfg.filtering_enabled;
    if (keep_cli("--min-shadow-area")) merged.min_shadow_area = cli_cfg.min_shadow_area;
    if (keep_cli("--min-ndi-contrast")) merged.min_ndi_contrast = cli_cfg.min_ndi_contrast;
    if (keep_cli("--se-detect")) merged.se_detect = cli_cfg.se_detect;
    if (keep_cli("--se-post")) merged.se_post = cli_cfg.se_post;
    if (keep_cli("--se-fill")) merged.se_fill = cli_cfg.se_fill;
    if (keep_cli("--svm-c")) merged.svm_c = cli_cfg.svm_c;
    if (keep_cli("--svm-tol")) merged.svm_tol = cli_cfg.svm_tol;
    if (keep_cli("--samples-per-class")) merged.samples_per_class = cli_cfg.samples_per_class;
    if (keep_cli("--seed")) merged.seed = cli_cfg.seed;
    if (keep_cli("--no-open")) merged.open_first = cli_cfg.open_first;
    if (keep_cli("--no-fill-holes")) merged.fill_holes = cli_cfg.fill_holes;
    if (keep_cli("--no-keep-largest")) merged.keep_largest = cli_cfg.keep_largest;
    if (keep_cli("--group-size")) merged.group_size = cli_cfg.group_size;
    if (keep_cli("--dump-stages")) merged.dump_stages = cli_cfg.dump_stages;
    return merged;
}

std::vector<std::string> sorted_images(const std::string& dir) {
    std::vector<std::string> files;
    if (!fs::is_directory(dir)) throw Error("missing input: " + dir + " is not a directory");
    for (const auto& e : fs::directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        const std::string ext = e.path().extension().string();
        if (ext == ".png" || ext == ".ppm" || ext == ".pgm") files.push_back(e.path().string());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw Error("missing input: no images in " + dir);
    return files;
}

std::vector<StreamFrame> synth_frames(std::size_t count, std::uint64_t seed, bool with_shadow) {
    std::vector<StreamFrame> frames;
    for (std::size_t i = 0; i < count; ++i) {
        const int scene_index = static_cast<int>(i / 10);
        const int noise_seed = static_cast<int>(seed * 1009 + i % 10);
        SceneRender r = generate_scene(make_scene_variant(scene_index, noise_seed, with_shadow));
        frames.push_back({frame_tag(i), std::move(r.image), std::move(r.road_truth)});
    }
    return frames;
}

std::vector<StreamFrame> gather_frames(const std::string& frames_dir, const std::string& manifest,
                                       std::size_t synth_count, std::uint64_t seed) {
    if (synth_count > 0) return synth_frames(synth_count, seed, true);
    if (!manifest.empty()) {
        std::vector<StreamFrame> frames;
        for (const auto& e : load_manifest(manifest)) {
            StreamFrame f;
            f.frame_id = fs::path(e.image_path).stem().string();
            f.image = load_image(e.image_path);
            if (!e.truth_path.empty()) f.truth = load_mask(e.truth_path);
            frames.push_back(std::move(f));
        }
        return frames;
    }
    if (!frames_dir.empty()) {
        std::vector<StreamFrame> frames;
        for (const auto& p : sorted_images(frames_dir))
            frames.push_back({fs::path(p).stem().string(), load_image(p), std::nullopt});
        return frames;
    }
    throw Error("missing input: give --frames, --manifest or --synth");
}

void dump_stages(const FrameResult& fr, const std::string& dir) {
    save_mask(fr.candidates_pre, dir + "/candidates_pre_" + fr.frame_id + ".pgm");
    save_mask(fr.candidates_post, dir + "/candidates_post_" + fr.frame_id + ".pgm");
    save_mask(fr.shadow_mask, dir + "/shadow_" + fr.frame_id + ".pgm");
    save_mask(fr.svm_mask, dir + "/svm_" + fr.frame_id + ".pgm");
    save_image(fr.compensated, dir + "/compensated_" + fr.frame_id + ".png");
}

int cmd_run(const std::vector<StreamFrame>& frames, const PipelineConfig& cfg, const std::string& out) {
    fs::create_directories(out);
    StreamResult res = run_stream(frames, cfg);
    for (const auto& fr : res.frames) {
        if (fr.failed) {
            std::cerr << "frame failed: " << fr.error << "\n";
            continue;
        }
        save_mask(fr.refined, out + "/mask_" + fr.frame_id + ".pgm");
        if (cfg.dump_stages) dump_stages(fr, out);
        for (const auto& note : fr.notes) std::cerr << fr.frame_id << ": " << note << "\n";
    }
    if (!res.csv.empty()) {
        std::ofstream csv(out + "/metrics.csv", std::ios::trunc);
        csv << res.csv;
        std::cout << "wrote " << out << "/metrics.csv\n";
    }
    std::cout << "processed " << res.frames.size() << " frames -> " << out << "\n";
    return 0;
}

int cmd_synth(std::size_t count, std::uint64_t seed, bool with_shadow, const std::string& out) {
    fs::create_directories(out);
    std::ofstream manifest(out + "/manifest.tsv", std::ios::trunc);
    for (std::size_t i = 0; i < count; ++i) {
        const int scene_index = static_cast<int>(i / 10);
        const int noise_seed = static_cast<int>(seed * 1009 + i % 10);
        const SceneRender r = generate_scene(make_scene_variant(scene_index, noise_seed, with_shadow));
        const std::string tag = frame_tag(i);
        save_image(r.image, out + "/frame_" + tag + ".png");
        save_mask(r.road_truth, out + "/truth_" + tag + ".pgm");
        save_mask(r.shadow_truth, out + "/shadow_" + tag + ".pgm");
        manifest << "frame_" << tag << ".png\ttruth_" << tag << ".pgm\n";
    }
    std::cout << "wrote " << count << " frames to " << out << "\n";
    return 0;
}

int cmd_shadow(const std::string& input, const PipelineConfig& cfg, const std::string& out) {
    fs::create_directories(out);
    const RgbImage img = load_image(input);
    const RemoveShadowsResult res = remove_shadows(img, StructuringElement::parse(cfg.se_detect),
                                                   cfg.min_shadow_area, cfg.min_ndi_contrast);
    save_image(res.image, out + "/compensated.png");
    save_mask(res.shadow_mask, out + "/shadow_mask.pgm");
    if (cfg.dump_stages) {
        const NdiMap ndi = compute_ndi(rgb_to_hsv(img));
        save_gray(ndi, -1.0, 1.0, out + "/ndi.pgm");
    }
    for (const auto& note : res.notes) std::cout << note << "\n";
    std::cout << "shadow pixels: " << res.shadow_mask.count() << "\n";
    return 0;
}

int cmd_eval(const std::string& pred_dir, const std::string& truth_dir, const std::string& out_csv,
             std::size_t group_size) {
    const auto preds = sorted_images(pred_dir);
    const auto truths = sorted_images(truth_dir);
    if (preds.size() != truths.size())
        throw Error("frame count mismatch: " + std::to_string(preds.size()) + " predictions vs " +
                    std::to_string(truths.size()) + " truths");
    std::vector<FrameCounts> counts;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const BinaryMask pred = load_mask(preds[i]);
        const BinaryMask truth = load_mask(truths[i]);
        if (!pred.same_shape(truth)) throw Error("dimension mismatch: frame " + std::to_string(i + 1));
        counts.emplace_back(fs::path(preds[i]).stem().string(), confusion(pred, truth));
    }
    const std::string csv = metrics_csv(counts, group_size);
    if (out_csv.empty()) {
        std::cout << csv;
    } else {
        std::ofstream f(out_csv, std::ios::trunc);
        f << csv;
        std::cout << "wrote " << out_csv << "\n";
    }
    return 0;
}

int cmd_compare(const std::string& scenes_dir, std::size_t synth_count, std::uint64_t seed,
                PipelineConfig cfg, const std::string& out) {
    std::vector<StreamFrame> frames;
    if (!scenes_dir.empty()) {
        const std::string manifest = scenes_dir + "/manifest.tsv";
        if (!fs::exists(manifest)) throw Error("missing input: " + manifest);
        frames = gather_frames("", manifest, 0, seed);
    } else {
        frames = synth_frames(synth_count > 0 ? synth_count : 100, seed, true);
    }
    for (const auto& f : frames)
        if (!f.truth) throw Error("missing input: compare needs ground truth for every frame");

    fs::create_directories(out);
    cfg.filtering_enabled = true;
    const StreamResult with = run_stream(frames, cfg);
    cfg.filtering_enabled = false;
    const StreamResult without = run_stream(frames, cfg);

    auto collect = [&](const StreamResult& res) {
        std::vector<FrameCounts> counts;
        for (const auto& fr : res.frames)
            if (!fr.failed && fr.counts) counts.emplace_back(fr.frame_id, *fr.counts);
        return counts;
    };
    const auto counts_with = collect(with);
    const auto counts_without = collect(without);
    const auto groups_with = group_counts(counts_with, cfg.group_size);
    const auto groups_without = group_counts(counts_without, cfg.group_size);

    std::string csv = "frame_id,tp,tn,fp,fn,acc,err,tpr,fnr,tnr,fpr\n";
    std::vector<double> err_with, err_without;
    auto emit = [&](const std::string& id, const ConfusionCounts& c) {
        const RateReport r = rates(c);
        char buf[256];
        std::snprintf(buf, sizeof buf, "%s,%llu,%llu,%llu,%llu,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n",
                      id.c_str(), static_cast<unsigned long long>(c.tp),
                      static_cast<unsigned long long>(c.tn), static_cast<unsigned long long>(c.fp),
                      static_cast<unsigned long long>(c.fn), r.acc.value_or(-1), r.err.value_or(-1),
                      r.tpr.value_or(-1), r.fnr.value_or(-1), r.tnr.value_or(-1), r.fpr.value_or(-1));
        csv += buf;
        return r;
    };
    for (std::size_t g = 0; g < groups_with.size() && g < groups_without.size(); ++g) {
        char id[40];
        std::snprintf(id, sizeof id, "group_%02zu_with", g + 1);
        err_with.push_back(emit(id, groups_with[g]).err.value_or(0.0));
        std::snprintf(id, sizeof id, "group_%02zu_without", g + 1);
        err_without.push_back(emit(id, groups_without[g]).err.value_or(0.0));
    }

    std::ofstream f(out + "/metrics.csv", std::ios::trunc);
    f << csv;
    save_image(render_err_bar_chart(err_with, err_without), out + "/err_bars.png");

    std::size_t improved = 0;
    for (std::size_t g = 0; g < err_with.size(); ++g)
        if (err_with[g] < err_without[g]) ++improved;
    std::cout << "groups with lower error under filtering: " << improved << "/" << err_with.size()
              << "\n";
    std::cout << "wrote " << out << "/metrics.csv and " << out << "/err_bars.png\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"shadow-robust road region recognition"};
    app.require_subcommand(1);

    PipelineConfig cfg;
    std::string config_path;

    // run
    auto* run = app.add_subcommand("run", "full pipeline over a frame stream");
    std::string run_frames_dir, run_manifest, run_out = "out";
    std::size_t run_synth = 0;
    std::string save_model_dir, road_model_path, svm_model_path;
    run->add_option("--frames", run_frames_dir, "directory of input frames");
    run->add_option("--manifest", run_manifest, "tab-separated frame/truth manifest");
    run->add_option("--synth", run_synth, "generate N synthetic frames instead of reading files");
    run->add_option("--out", run_out, "output directory");
    run->add_option("--save-model-dir", save_model_dir, "save fitted models here");
    run->add_option("--road-model", road_model_path, "preload road color model");
    run->add_option("--svm-model", svm_model_path, "preload svm model");
    add_config_flags(run, cfg, config_path);

    // shadow
    auto* shadow = app.add_subcommand("shadow", "shadow detection and removal on one image");
    std::string shadow_input, shadow_out = "out";
    shadow->add_option("--input", shadow_input, "input image")->required();
    shadow->add_option("--out", shadow_out, "output directory");
    add_config_flags(shadow, cfg, config_path);

    // eval
    auto* eval = app.add_subcommand("eval", "score predicted masks against ground truth");
    std::string eval_pred, eval_truth, eval_out;
    std::size_t eval_group = 10;
    eval->add_option("--pred", eval_pred, "directory of predicted masks")->required();
    eval->add_option("--truth", eval_truth, "directory of truth masks")->required();
    eval->add_option("--out", eval_out, "CSV path (stdout when omitted)");
    eval->add_option("--group-size", eval_group, "frames per group");

    // synth
    auto* synth = app.add_subcommand("synth", "emit a synthetic dataset");
    std::size_t synth_count = 10;
    std::uint64_t synth_seed = 7;
    std::string synth_out;
    bool synth_no_shadow = false;
    synth->add_option("--frames", synth_count, "number of frames");
    synth->add_option("--seed", synth_seed, "base seed");
    synth->add_option("--out", synth_out, "output directory")->required();
    synth->add_flag("--no-shadow", synth_no_shadow, "generate shadow-free scenes");

    // compare
    auto* compare = app.add_subcommand("compare", "run with and without the shadow filter");
    std::string compare_scenes, compare_out = "results";
    std::size_t compare_synth = 0;
    compare->add_option("--scenes", compare_scenes, "synth output directory (with manifest.tsv)");
    compare->add_option("--synth", compare_synth, "generate N synthetic frames instead");
    compare->add_option("--out", compare_out, "output directory");
    add_config_flags(compare, cfg, config_path);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            PipelineConfig merged = merge_config(run, cfg, config_path);
            auto frames = gather_frames(run_frames_dir, run_manifest, run_synth, merged.seed);
            if (!road_model_path.empty() || !svm_model_path.empty()) {
                // preloaded models are applied by running the stream manually
                ModelState state;
                if (!road_model_path.empty()) state.road = load_road_model(road_model_path);
                if (!svm_model_path.empty()) state.svm = load_svm_model(svm_model_path);
                fs::create_directories(run_out);
                std::vector<FrameCounts> counted;
                for (const auto& fr : frames) {
                    const FrameResult r =
                        run_frame(fr.image, fr.frame_id, state, merged, fr.truth ? &*fr.truth : nullptr);
                    save_mask(r.refined, run_out + "/mask_" + r.frame_id + ".pgm");
                    if (merged.dump_stages) dump_stages(r, run_out);
                    if (r.counts) counted.emplace_back(r.frame_id, *r.counts);
                }
                if (!counted.empty()) {
                    std::ofstream csv(run_out + "/metrics.csv", std::ios::trunc);
                    csv << metrics_csv(counted, merged.group_size);
                }
                if (!save_model_dir.empty()) {
                    fs::create_directories(save_model_dir);
                    if (state.road) save_road_model(*state.road, save_model_dir + "/road_model.txt");
                    if (state.svm) save_svm_model(*state.svm, save_model_dir + "/svm_model.txt");
                }
                return 0;
            }
            const int rc = cmd_run(frames, merged, run_out);
            if (!save_model_dir.empty()) {
                ModelState state;
                run_frame(frames[0].image, frames[0].frame_id, state, merged, nullptr);
                fs::create_directories(save_model_dir);
                save_road_model(*state.road, save_model_dir + "/road_model.txt");
                save_svm_model(*state.svm, save_model_dir + "/svm_model.txt");
            }
            return rc;
        }
        if (shadow->parsed()) return cmd_shadow(shadow_input, merge_config(shadow, cfg, config_path), shadow_out);
        if (eval->parsed()) return cmd_eval(eval_pred, eval_truth, eval_out, eval_group);
        if (synth->parsed()) return cmd_synth(synth_count, synth_seed, !synth_no_shadow, synth_out);
        if (compare->parsed())
            return cmd_compare(compare_scenes, compare_synth, cfg.seed, merge_config(compare, cfg, config_path),
                               compare_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
