#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "shadowroad/image.hpp"

namespace shadowroad {

struct ConfusionCounts {
    std::uint64_t tp = 0, tn = 0, fp = 0, fn = 0;
    std::uint64_t n() const { return tp + tn + fp + fn; }
};

/// The six rates; a field is empty when its denominator is zero.
struct RateReport {
    std::optional<double> acc, err, tpr, fnr, tnr, fpr;
};

/// Pixel-wise confusion counts of prediction against ground truth.
ConfusionCounts confusion(const BinaryMask& pred, const BinaryMask& truth);

/// ACC/ERR over all pixels, TPR/FNR over truth-positives, TNR/FPR over
/// truth-negatives. Throws on empty input.
RateReport rates(const ConfusionCounts& c);

using FrameCounts = std::pair<std::string, ConfusionCounts>;

/// Sums counts over consecutive groups of `group_size` frames
/// (micro-averaging); a trailing short group is kept.
std::vector<ConfusionCounts> group_counts(const std::vector<FrameCounts>& frames, std::size_t group_size);
std::vector<RateReport> aggregate(const std::vector<FrameCounts>& frames, std::size_t group_size);

/// One row per frame, one micro-averaged row per group, and a final
/// macro_avg row holding the plain mean of the per-frame rates. Rates
/// print with 6 decimals; undefined rates print as NA.
std::string metrics_csv(const std::vector<FrameCounts>& frames, std::size_t group_size);

}  // namespace shadowroad
