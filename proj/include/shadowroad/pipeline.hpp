#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "shadowroad/image.hpp"
#include "shadowroad/metrics.hpp"
#include "shadowroad/morphology.hpp"
#include "shadowroad/road_color.hpp"
#include "shadowroad/shadow.hpp"
#include "shadowroad/svm.hpp"

namespace shadowroad {

/// Every tunable of the four-phase pipeline. Config files are flat
/// `key = value` lines with `#` comments; keys match the field names.
struct PipelineConfig {
    std::string training_region = "trapezoid";
    double d_max = 2.796;  // 95% chi-square quantile for 3 dof, sqrt(7.815)
    bool filtering_enabled = true;
    std::size_t min_shadow_area = kDefaultMinShadowArea;
    double min_ndi_contrast = kDefaultMinNdiContrast;
    std::string se_detect = "square:3";
    std::string se_post = "square:3";
    std::string se_fill = "cross:3";
    double svm_c = kDefaultSvmC;
    double svm_tol = kDefaultSvmTol;
    std::size_t samples_per_class = 500;
    std::uint64_t seed = 1;
    bool open_first = true;
    bool fill_holes = true;
    bool keep_largest = true;
    std::size_t group_size = 10;
    std::string out_dir;
    bool dump_stages = false;

    MorphConfig morph() const;
    void set(const std::string& key, const std::string& value);
};

PipelineConfig load_config(const std::string& path);

/// Road color model and SVM fitted on the first frame and reused for
/// the rest of the stream.
struct ModelState {
    std::optional<RoadColorModel> road;
    std::optional<SvmModel> svm;
};

struct FrameResult {
    std::string frame_id;
    BinaryMask candidates_pre;   // phase 1 on the raw frame
    RgbImage compensated;        // phase 2 output (input image when filtering is off)
    BinaryMask shadow_mask;
    BinaryMask candidates_post;  // phase 1 re-run on the compensated frame
    BinaryMask svm_mask;         // phase 3
    BinaryMask refined;          // phase 4
    std::vector<std::string> notes;
    std::optional<ConfusionCounts> counts;
    std::optional<RateReport> report;
    bool failed = false;
    std::string error;
};

/// Runs the four phases on one frame. Fits missing models from this
/// frame (training region for the color model, phase-1 candidates on
/// the compensated frame for the SVM).
FrameResult run_frame(const RgbImage& img, const std::string& frame_id, ModelState& state,
                      const PipelineConfig& cfg, const BinaryMask* truth = nullptr);

struct StreamFrame {
    std::string frame_id;
    RgbImage image;
    std::optional<BinaryMask> truth;
};

struct StreamResult {
    std::vector<FrameResult> frames;
    std::string csv;  // empty when no frame carried ground truth
};

/// Fits both models on the first frame, then processes the remaining
/// frames (in parallel when SHADOWROAD_THREADS allows), preserving
/// frame order. Failing frames are recorded and skipped.
StreamResult run_stream(const std::vector<StreamFrame>& frames, const PipelineConfig& cfg);

/// Frame/truth path pairs, one per line, tab-separated; relative paths
/// resolve against the manifest's directory.
struct ManifestEntry {
    std::string image_path;
    std::string truth_path;  // may be empty
};
std::vector<ManifestEntry> load_manifest(const std::string& path);

/// Worker cap from SHADOWROAD_THREADS (hardware concurrency otherwise).
unsigned worker_count();

/// Grouped error-rate comparison bars (filtering on vs off), one pair
/// of bars per group.
RgbImage render_err_bar_chart(const std::vector<double>& with_err,
                              const std::vector<double>& without_err);

}  // namespace shadowroad
