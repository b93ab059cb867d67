#include "shadowroad/metrics.hpp"

#include <cstdio>

namespace shadowroad {

ConfusionCounts confusion(const BinaryMask& pred, const BinaryMask& truth) {
    if (!pred.same_shape(truth))
        throw Error("dimension mismatch: prediction " + std::to_string(pred.width()) + "x" +
                    std::to_string(pred.height()) + " vs truth " + std::to_string(truth.width()) + "x" +
                    std::to_string(truth.height()));
    ConfusionCounts c;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const bool p = pred.get(i), t = truth.get(i);
        if (p && t) ++c.tp;
        else if (!p && !t) ++c.tn;
        else if (p && !t) ++c.fp;
        else ++c.fn;
    }
    return c;
}

RateReport rates(const ConfusionCounts& c) {
    const std::uint64_t n = c.n();
    if (n == 0) throw Error("rates: empty counts");
    RateReport r;
    r.acc = static_cast<double>(c.tp + c.tn) / static_cast<double>(n);
    r.err = static_cast<double>(c.fn + c.fp) / static_cast<double>(n);
    const std::uint64_t pos = c.tp + c.fn;
    if (pos > 0) {
        r.tpr = static_cast<double>(c.tp) / static_cast<double>(pos);
        r.fnr = static_cast<double>(c.fn) / static_cast<double>(pos);
    }
    const std::uint64_t neg = c.tn + c.fp;
    if (neg > 0) {
        r.tnr = static_cast<double>(c.tn) / static_cast<double>(neg);
        r.fpr = static_cast<double>(c.fp) / static_cast<double>(neg);
    }
    return r;
}

std::vector<ConfusionCounts> group_counts(const std::vector<FrameCounts>& frames, std::size_t group_size) {
    if (frames.empty()) throw Error("aggregate: empty frame list");
    if (group_size < 1) throw Error("aggregate: group size must be >= 1");
    std::vector<ConfusionCounts> groups;
    for (std::size_t i = 0; i < frames.size(); i += group_size) {
        ConfusionCounts sum;
        for (std::size_t j = i; j < std::min(i + group_size, frames.size()); ++j) {
            sum.tp += frames[j].second.tp;
            sum.tn += frames[j].second.tn;
            sum.fp += frames[j].second.fp;
            sum.fn += frames[j].second.fn;
        }
        groups.push_back(sum);
    }
    return groups;
}

std::vector<RateReport> aggregate(const std::vector<FrameCounts>& frames, std::size_t group_size) {
    std::vector<RateReport> out;
    for (const auto& g : group_counts(frames, group_size)) out.push_back(rates(g));
    return out;
}

namespace {

void append_rate(std::string& row, const std::optional<double>& v) {
    if (v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, ",%.6f", *v);
        row += buf;
    } else {
        row += ",NA";
    }
}

void append_row(std::string& out, const std::string& id, const ConfusionCounts& c, const RateReport& r) {
    out += id;
    out += "," + std::to_string(c.tp) + "," + std::to_string(c.tn) + "," + std::to_string(c.fp) + "," +
           std::to_string(c.fn);
    append_rate(out, r.acc);
    append_rate(out, r.err);
    append_rate(out, r.tpr);
    append_rate(out, r.fnr);
    append_rate(out, r.tnr);
    append_rate(out, r.fpr);
    out += "\n";
}

}  // namespace

std::string metrics_csv(const std::vector<FrameCounts>& frames, std::size_t group_size) {
    std::string out = "frame_id,tp,tn,fp,fn,acc,err,tpr,fnr,tnr,fpr\n";

    std::vector<RateReport> per_frame;
    per_frame.reserve(frames.size());
    for (const auto& [id, c] : frames) {
        const RateReport r = rates(c);
        per_frame.push_back(r);
        append_row(out, id, c, r);
    }

    const auto groups = group_counts(frames, group_size);
    for (std::size_t g = 0; g < groups.size(); ++g) {
        char id[32];
        std::snprintf(id, sizeof id, "group_%02zu", g + 1);
        append_row(out, id, groups[g], rates(groups[g]));
    }

    // plain mean of the per-frame rates, skipping undefined entries
    ConfusionCounts total;
    for (const auto& [id, c] : frames) {
        total.tp += c.tp;
        total.tn += c.tn;
        total.fp += c.fp;
        total.fn += c.fn;
    }
    RateReport macro;
    auto mean_of = [&](std::optional<double> RateReport::*field) {
        double sum = 0.0;
        std::size_t n = 0;
        for (const auto& r : per_frame)
            if (r.*field) {
                sum += *(r.*field);
                ++n;
            }
        return n > 0 ? std::optional<double>(sum / static_cast<double>(n)) : std::nullopt;
    };
    macro.acc = mean_of(&RateReport::acc);
    macro.err = mean_of(&RateReport::err);
    macro.tpr = mean_of(&RateReport::tpr);
    macro.fnr = mean_of(&RateReport::fnr);
    macro.tnr = mean_of(&RateReport::tnr);
    macro.fpr = mean_of(&RateReport::fpr);
    append_row(out, "macro_avg", total, macro);
    return out;
}

}  // namespace shadowroad
