#include "shadowroad/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

namespace shadowroad {

namespace {

bool parse_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "off" || v == "no") return false;
    throw Error("config: bad boolean '" + v + "'");
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

MorphConfig PipelineConfig::morph() const {
    MorphConfig m;
    m.se = StructuringElement::parse(se_post);
    m.fill_se = StructuringElement::parse(se_fill);
    m.open_first = open_first;
    m.fill_holes = fill_holes;
    m.keep_largest = keep_largest;
    return m;
}

void PipelineConfig::set(const std::string& key, const std::string& value) {
    if (key == "training_region") training_region = value;
    else if (key == "d_max") d_max = std::stod(value);
    else if (key == "filtering_enabled") filtering_enabled = parse_bool(value);
    else if (key == "min_shadow_area") min_shadow_area = std::stoul(value);
    else if (key == "min_ndi_contrast") min_ndi_contrast = std::stod(value);
    else if (key == "se_detect") se_detect = value;
    else if (key == "se_post") se_post = value;
    else if (key == "se_fill") se_fill = value;
    else if (key == "svm_c") svm_c = std::stod(value);
    else if (key == "svm_tol") svm_tol = std::stod(value);
    else if (key == "samples_per_class") samples_per_class = std::stoul(value);
    else if (key == "seed") seed = std::stoull(value);
    else if (key == "open_first") open_first = parse_bool(value);
    else if (key == "fill_holes") fill_holes = parse_bool(value);
    else if (key == "keep_largest") keep_largest = parse_bool(value);
    else if (key == "group_size") group_size = std::stoul(value);
    else if (key == "out_dir") out_dir = value;
    else if (key == "dump_stages") dump_stages = parse_bool(value);
    else throw Error("config: unknown key '" + key + "'");

    if (d_max < 0.0) throw Error("config: d_max must be >= 0");
    if (svm_c <= 0.0) throw Error("config: svm_c must be > 0");
    if (svm_tol <= 0.0) throw Error("config: svm_tol must be > 0");
    if (group_size < 1) throw Error("config: group_size must be >= 1");
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error("unreadable file: " + path);
    PipelineConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error("config parse failure: " + path + ":" + std::to_string(lineno));
        try {
            cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        } catch (const std::exception& e) {
            throw Error("config parse failure: " + path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return cfg;
}

FrameResult run_frame(const RgbImage& img, const std::string& frame_id, ModelState& state,
                      const PipelineConfig& cfg, const BinaryMask* truth) {
    FrameResult res;
    res.frame_id = frame_id;

    const StructuringElement se_detect = StructuringElement::parse(cfg.se_detect);

    // phase 1: road-color candidates on the raw frame
    if (!state.road) {
        const TrainingRegion region =
            TrainingRegion::parse(cfg.training_region, img.width(), img.height());
        state.road = fit_road_model(region.collect_pixels(img));
    }
    res.candidates_pre = extract_candidates(img, *state.road, cfg.d_max);

    // phase 2: shadow detection and compensation
    if (cfg.filtering_enabled) {
        RemoveShadowsResult rs =
            remove_shadows(img, se_detect, cfg.min_shadow_area, cfg.min_ndi_contrast);
        res.compensated = std::move(rs.image);
        res.shadow_mask = std::move(rs.shadow_mask);
        res.notes = std::move(rs.notes);
        res.candidates_post = extract_candidates(res.compensated, *state.road, cfg.d_max);
    } else {
        res.compensated = img;
        res.shadow_mask = BinaryMask(img.width(), img.height());
        res.candidates_post = res.candidates_pre;
    }

    // phase 3: svm segmentation on the compensated frame
    if (!state.svm) {
        const auto samples = build_training_set(res.compensated, res.candidates_post,
                                                cfg.samples_per_class, cfg.seed);
        state.svm = train(samples, cfg.svm_c, cfg.svm_tol);
    }
    res.svm_mask = segment(res.compensated, *state.svm);

    // phase 4: morphological refinement
    res.refined = refine(res.svm_mask, cfg.morph());

    if (truth) {
        res.counts = confusion(res.refined, *truth);
        res.report = rates(*res.counts);
    }
    return res;
}

unsigned worker_count() {
    unsigned n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    if (const char* env = std::getenv("SHADOWROAD_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1 && static_cast<unsigned>(cap) < n) n = static_cast<unsigned>(cap);
    }
    return n;
}

StreamResult run_stream(const std::vector<StreamFrame>& frames, const PipelineConfig& cfg) {
    if (frames.empty()) throw Error("empty stream");

    StreamResult out;
    out.frames.resize(frames.size());
    ModelState state;

    auto process = [&](std::size_t i) {
        try {
            out.frames[i] = run_frame(frames[i].image, frames[i].frame_id, state, cfg,
                                      frames[i].truth ? &*frames[i].truth : nullptr);
        } catch (const std::exception& e) {
            out.frames[i].frame_id = frames[i].frame_id;
            out.frames[i].failed = true;
            out.frames[i].error = frames[i].frame_id + ": " + e.what();
        }
    };

    // first frame fits both models
    process(0);
    if (out.frames[0].failed)
        throw Error("stream aborted: model fit failed on first frame: " + out.frames[0].error);

    const std::size_t rest = frames.size() - 1;
    const unsigned workers = std::min<std::size_t>(worker_count(), rest == 0 ? 1 : rest);
    if (rest > 0) {
        if (workers <= 1) {
            for (std::size_t i = 1; i < frames.size(); ++i) process(i);
        } else {
            std::atomic<std::size_t> next{1};
            std::vector<std::thread> pool;
            pool.reserve(workers);
            for (unsigned t = 0; t < workers; ++t) {
                pool.emplace_back([&] {
                    for (;;) {
                        const std::size_t i = next.fetch_add(1);
                        if (i >= frames.size()) return;
                        process(i);
                    }
                });
            }
            for (auto& th : pool) th.join();
        }
    }

    std::vector<FrameCounts> counted;
    for (const auto& fr : out.frames)
        if (!fr.failed && fr.counts) counted.emplace_back(fr.frame_id, *fr.counts);
    if (!counted.empty()) out.csv = metrics_csv(counted, cfg.group_size);
    return out;
}

std::vector<ManifestEntry> load_manifest(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error("unreadable file: " + path);
    std::string dir;
    const auto slash = path.find_last_of('/');
    if (slash != std::string::npos) dir = path.substr(0, slash + 1);
    auto resolve = [&](const std::string& p) {
        if (p.empty() || p[0] == '/') return p;
        return dir + p;
    };

    std::vector<ManifestEntry> entries;
    std::string line;
    while (std::getline(f, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto tab = line.find('\t');
        ManifestEntry e;
        if (tab == std::string::npos) {
            e.image_path = resolve(line);
        } else {
            e.image_path = resolve(trim(line.substr(0, tab)));
            const std::string t = trim(line.substr(tab + 1));
            if (!t.empty()) e.truth_path = resolve(t);
        }
        entries.push_back(std::move(e));
    }
    if (entries.empty()) throw Error("empty stream: manifest lists no frames");
    return entries;
}

RgbImage render_err_bar_chart(const std::vector<double>& with_err,
                              const std::vector<double>& without_err) {
    if (with_err.size() != without_err.size() || with_err.empty())
        throw Error("bar chart: mismatched series");
    const int groups = static_cast<int>(with_err.size());
    const int margin = 40, bar_w = 14, gap = 18, pair_w = 2 * bar_w + gap;
    const int width = margin * 2 + groups * pair_w;
    const int height = 260;
    const int plot_h = height - 2 * margin;

    RgbImage img(width, height, Rgb{1.0, 1.0, 1.0});
    double peak = 1e-9;
    for (int g = 0; g < groups; ++g) peak = std::max({peak, with_err[g], without_err[g]});

    auto fill = [&](int x0, int y0, int x1, int y1, Rgb c) {
        for (int y = std::max(0, y0); y < std::min(height, y1); ++y)
            for (int x = std::max(0, x0); x < std::min(width, x1); ++x) img.set(x, y, c);
    };

    // axes
    fill(margin - 1, margin - 10, margin, height - margin + 1, Rgb{0, 0, 0});
    fill(margin - 1, height - margin, width - margin + 10, height - margin + 1, Rgb{0, 0, 0});

    const Rgb with_color{0.20, 0.45, 0.80};
    const Rgb without_color{0.85, 0.30, 0.20};
    for (int g = 0; g < groups; ++g) {
        const int x = margin + g * pair_w + gap / 2;
        const int h_with = static_cast<int>(std::round(plot_h * with_err[g] / peak));
        const int h_without = static_cast<int>(std::round(plot_h * without_err[g] / peak));
        fill(x, height - margin - h_with, x + bar_w, height - margin, with_color);
        fill(x + bar_w + 2, height - margin - h_without, x + 2 * bar_w + 2, height - margin, without_color);
    }
    return img;
}

}  // namespace shadowroad
