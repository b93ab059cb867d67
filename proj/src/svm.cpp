#include "shadowroad/svm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "shadowroad/rng.hpp"

namespace shadowroad {

namespace {

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Vec3 recover_w(const std::vector<LabeledSample>& samples, const std::vector<double>& lambdas) {
    Vec3 w{};
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double coeff = lambdas[i] * samples[i].y;
        for (int c = 0; c < 3; ++c) w[c] += coeff * samples[i].x[c];
    }
    return w;
}

// Sequential pairwise dual ascent (SMO). Linear kernel throughout, so
// decision values come from an incrementally maintained w.
class SmoSolver {
public:
    SmoSolver(const std::vector<LabeledSample>& samples, double c, double tol)
        : samples_(samples), c_(c), tol_(tol), lambdas_(samples.size(), 0.0), rng_(0x5eedULL) {}

    std::vector<double> solve(double* b_out, int* passes_out) {
        const std::size_t n = samples_.size();
        bool examine_all = true;
        std::size_t changed = 0;
        int passes = 0;
        for (;;) {
            if (++passes > kMaxTrainPasses) break;
            changed = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (!examine_all && is_bound(lambdas_[i])) continue;
                changed += examine(i);
            }
            if (examine_all) {
                if (changed == 0) break;  // a clean full pass: KKT holds or we stalled
                examine_all = false;
            } else if (changed == 0) {
                examine_all = true;
            }
        }
        *b_out = b_;
        *passes_out = passes;
        return lambdas_;
    }

private:
    bool is_bound(double l) const { return l <= 0.0 || l >= c_; }

    double f(const Vec3& x) const { return dot(w_, x) + b_; }

    bool examine(std::size_t i) {
        const double yi = samples_[i].y;
        const double ei = f(samples_[i].x) - yi;
        const double r = ei * yi;
        const bool violated = (r < -tol_ && lambdas_[i] < c_) || (r > tol_ && lambdas_[i] > 0.0);
        if (!violated) return false;

        const std::size_t n = samples_.size();
        // best |E_i - E_j| over non-bound multipliers first
        std::size_t best_j = n;
        double best_gap = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i || is_bound(lambdas_[j])) continue;
            const double gap = std::fabs(ei - (f(samples_[j].x) - samples_[j].y));
            if (gap > best_gap) {
                best_gap = gap;
                best_j = j;
            }
        }
        if (best_j < n && take_step(i, best_j, ei)) return true;

        const std::size_t start = static_cast<std::size_t>(rng_.next_below(n));
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t j = (start + k) % n;
            if (j == i || is_bound(lambdas_[j])) continue;
            if (take_step(i, j, ei)) return true;
        }
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t j = (start + k) % n;
            if (j == i) continue;
            if (take_step(i, j, ei)) return true;
        }
        return false;
    }

    bool take_step(std::size_t i, std::size_t j, double ei) {
        const double yi = samples_[i].y, yj = samples_[j].y;
        const double li = lambdas_[i], lj = lambdas_[j];
        const double s = yi * yj;
        double lo, hi;
        if (s > 0) {
            lo = std::max(0.0, li + lj - c_);
            hi = std::min(c_, li + lj);
        } else {
            lo = std::max(0.0, lj - li);
            hi = std::min(c_, c_ + lj - li);
        }
        if (lo >= hi) return false;

        const double ej = f(samples_[j].x) - yj;
        const double kii = dot(samples_[i].x, samples_[i].x);
        const double kjj = dot(samples_[j].x, samples_[j].x);
        const double kij = dot(samples_[i].x, samples_[j].x);
        const double eta = kii + kjj - 2.0 * kij;

        double lj_new;
        if (eta > 0.0) {
            lj_new = lj + yj * (ei - ej) / eta;
            lj_new = std::clamp(lj_new, lo, hi);
        } else {
            // flat direction: objective is linear along the constraint, test the ends
            const double f1 = yi * (ei - b_) - li * kii - s * lj * kij;
            const double f2 = yj * (ej - b_) - s * li * kij - lj * kjj;
            const double l1 = li + s * (lj - lo);
            const double h1 = li + s * (lj - hi);
            const double psi_lo = l1 * f1 + lo * f2 + 0.5 * l1 * l1 * kii + 0.5 * lo * lo * kjj + s * lo * l1 * kij;
            const double psi_hi = h1 * f1 + hi * f2 + 0.5 * h1 * h1 * kii + 0.5 * hi * hi * kjj + s * hi * h1 * kij;
            if (psi_lo < psi_hi - 1e-12)
                lj_new = lo;
            else if (psi_lo > psi_hi + 1e-12)
                lj_new = hi;
            else
                return false;
        }
        if (std::fabs(lj_new - lj) < 1e-14 * (lj_new + lj + 1e-14)) return false;

        double li_new = li + s * (lj - lj_new);
        li_new = std::clamp(li_new, 0.0, c_);

        const double di = yi * (li_new - li);
        const double dj = yj * (lj_new - lj);

        const double b1 = b_ - ei - di * kii - dj * kij;
        const double b2 = b_ - ej - di * kij - dj * kjj;
        if (li_new > 0.0 && li_new < c_)
            b_ = b1;
        else if (lj_new > 0.0 && lj_new < c_)
            b_ = b2;
        else
            b_ = 0.5 * (b1 + b2);

        for (int c = 0; c < 3; ++c) w_[c] += di * samples_[i].x[c] + dj * samples_[j].x[c];
        lambdas_[i] = li_new;
        lambdas_[j] = lj_new;
        return true;
    }

    const std::vector<LabeledSample>& samples_;
    double c_, tol_;
    std::vector<double> lambdas_;
    Vec3 w_{};
    double b_ = 0.0;
    Rng rng_;
};

SvmModel assemble(const std::vector<LabeledSample>& samples, std::vector<double> lambdas, double b_fallback,
                  double c) {
    SvmModel m;
    m.c = c;
    m.lambdas = std::move(lambdas);
    m.w = recover_w(samples, m.lambdas);

    double b_sum = 0.0;
    std::size_t b_n = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (m.lambdas[i] > 0.0) {
            m.support_vectors.push_back(samples[i]);
            m.support_lambdas.push_back(m.lambdas[i]);
        }
        if (m.lambdas[i] > 0.0 && m.lambdas[i] < c) {
            b_sum += samples[i].y - dot(m.w, samples[i].x);
            ++b_n;
        }
    }
    m.b = b_n > 0 ? b_sum / static_cast<double>(b_n) : b_fallback;
    return m;
}

}  // namespace

SvmModel train(const std::vector<LabeledSample>& samples, double c, double tol) {
    if (samples.size() < 2) throw Error("degenerate labels: need at least 2 samples");
    bool has_pos = false, has_neg = false;
    for (const auto& s : samples) {
        if (s.y == 1) has_pos = true;
        else if (s.y == -1) has_neg = true;
        else throw Error("degenerate labels: label must be +1 or -1");
    }
    if (!has_pos || !has_neg) throw Error("degenerate labels: both classes required");
    if (c <= 0.0) throw Error("svm: C must be > 0");
    if (tol <= 0.0) throw Error("svm: tol must be > 0");

    SmoSolver solver(samples, c, tol);
    double b_running = 0.0;
    int passes = 0;
    std::vector<double> lambdas = solver.solve(&b_running, &passes);
    SvmModel model = assemble(samples, std::move(lambdas), b_running, c);

    if (passes > kMaxTrainPasses)
        throw SvmTrainError("training did not converge: pass budget exhausted", std::move(model));
    if (kkt_violation(model, samples) > tol)
        throw SvmTrainError("training did not converge: solver stalled with KKT violations",
                            std::move(model));
    if (model.w[0] * model.w[0] + model.w[1] * model.w[1] + model.w[2] * model.w[2] < 1e-18)
        throw SvmTrainError("training did not converge: degenerate zero-margin model",
                            std::move(model));
    return model;
}

double decision(const SvmModel& model, const Vec3& x) { return dot(model.w, x) + model.b; }

double decision_expansion(const SvmModel& model, const Vec3& x) {
    double acc = model.b;
    for (std::size_t i = 0; i < model.support_vectors.size(); ++i)
        acc += model.support_vectors[i].y * model.support_lambdas[i] * dot(x, model.support_vectors[i].x);
    return acc;
}

double kkt_violation(const SvmModel& model, const std::vector<LabeledSample>& samples) {
    const double c = model.c;
    const double bound_eps = 1e-9 * std::max(1.0, c);
    double worst = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double margin = samples[i].y * decision(model, samples[i].x);
        const double l = model.lambdas[i];
        double v = 0.0;
        if (l <= bound_eps)
            v = std::max(0.0, 1.0 - margin);
        else if (l >= c - bound_eps)
            v = std::max(0.0, margin - 1.0);
        else
            v = std::fabs(margin - 1.0);
        worst = std::max(worst, v);
    }
    return worst;
}

double dual_objective(const std::vector<LabeledSample>& samples, const std::vector<double>& lambdas) {
    double obj = 0.0;
    Vec3 acc{};
    for (std::size_t i = 0; i < samples.size(); ++i) {
        obj += lambdas[i];
        const double coeff = lambdas[i] * samples[i].y;
        for (int c = 0; c < 3; ++c) acc[c] += coeff * samples[i].x[c];
    }
    return obj - 0.5 * dot(acc, acc);
}

std::vector<LabeledSample> build_training_set(const RgbImage& img, const BinaryMask& candidates,
                                              std::size_t n_per_class, std::uint64_t seed) {
    if (img.width() != candidates.width() || img.height() != candidates.height())
        throw Error("dimension mismatch: image vs candidate mask");
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < candidates.size(); ++i)
        (candidates.get(i) ? pos : neg).push_back(i);
    if (pos.empty() || neg.empty()) throw Error("degenerate labels: candidate mask has a single class");

    Rng rng(seed);
    auto draw = [&](std::vector<std::size_t>& indices, int label, std::vector<LabeledSample>& out) {
        const std::size_t k = std::min(n_per_class, indices.size());
        // partial Fisher-Yates: the first k entries become the sample
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng.next_below(indices.size() - i));
            std::swap(indices[i], indices[j]);
            const std::size_t p = indices[i];
            out.push_back({{img.channel(p, 0), img.channel(p, 1), img.channel(p, 2)}, label});
        }
    };
    std::vector<LabeledSample> samples;
    samples.reserve(2 * n_per_class);
    draw(pos, 1, samples);
    draw(neg, -1, samples);
    return samples;
}

BinaryMask segment(const RgbImage& img, const SvmModel& model) {
    BinaryMask mask(img.width(), img.height());
    const std::size_t n = img.pixel_count();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3 p{img.channel(i, 0), img.channel(i, 1), img.channel(i, 2)};
        mask.put(i, decision(model, p) >= 0.0);
    }
    return mask;
}

void save_svm_model(const SvmModel& model, const std::string& path) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw Error("cannot write file: " + path);
    char buf[256];
    f << "# shadowroad svm model\n";
    std::snprintf(buf, sizeof buf, "w = %.17g %.17g %.17g\n", model.w[0], model.w[1], model.w[2]);
    f << buf;
    std::snprintf(buf, sizeof buf, "b = %.17g\n", model.b);
    f << buf;
    std::snprintf(buf, sizeof buf, "c = %.17g\n", model.c);
    f << buf;
    for (std::size_t i = 0; i < model.support_vectors.size(); ++i) {
        const auto& sv = model.support_vectors[i];
        std::snprintf(buf, sizeof buf, "sv = %.17g %d %.17g %.17g %.17g\n", model.support_lambdas[i],
                      sv.y, sv.x[0], sv.x[1], sv.x[2]);
        f << buf;
    }
}

SvmModel load_svm_model(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error("unreadable file: " + path);
    SvmModel m;
    bool have_w = false, have_b = false;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(0, eq);
        key.erase(key.find_last_not_of(" \t") + 1);
        std::istringstream vals(line.substr(eq + 1));
        if (key == "w") {
            if (!(vals >> m.w[0] >> m.w[1] >> m.w[2])) throw Error("unsupported format: " + path);
            have_w = true;
        } else if (key == "b") {
            if (!(vals >> m.b)) throw Error("unsupported format: " + path);
            have_b = true;
        } else if (key == "c") {
            vals >> m.c;
        } else if (key == "sv") {
            double lambda;
            LabeledSample sv;
            if (!(vals >> lambda >> sv.y >> sv.x[0] >> sv.x[1] >> sv.x[2]))
                throw Error("unsupported format: " + path);
            m.support_lambdas.push_back(lambda);
            m.support_vectors.push_back(sv);
            m.lambdas.push_back(lambda);
        }
    }
    if (!have_w || !have_b) throw Error("unsupported format: " + path);
    return m;
}

}  // namespace shadowroad
