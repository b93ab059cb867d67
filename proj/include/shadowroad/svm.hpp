#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "shadowroad/image.hpp"
#include "shadowroad/road_color.hpp"

namespace shadowroad {

struct LabeledSample {
    Vec3 x{};
    int y = 1;  // +1 road, -1 non-road
};

/// Linear max-margin classifier state: primal (w, b) plus the dual
/// multipliers and the samples carrying lambda > 0.
struct SvmModel {
    Vec3 w{};
    double b = 0.0;
    double c = 0.0;
    std::vector<double> lambdas;            // one per training sample
    std::vector<LabeledSample> support_vectors;
    std::vector<double> support_lambdas;
};

/// Thrown when the dual solver stalls or exceeds its pass budget; the
/// best iterate reached so far rides along.
struct SvmTrainError : Error {
    SvmTrainError(const std::string& msg, SvmModel best_so_far)
        : Error(msg), best(std::move(best_so_far)) {}
    SvmModel best;
};

constexpr double kDefaultSvmC = 10.0;
constexpr double kDefaultSvmTol = 1e-3;
constexpr int kMaxTrainPasses = 10000;

/// Solves the box-constrained dual (maximize sum(lambda) - 1/2 sum
/// lambda_i lambda_j y_i y_j x_i.x_j subject to sum(lambda y) = 0,
/// 0 <= lambda <= C) by sequential pairwise optimization to KKT
/// tolerance `tol`, then recovers w from the multipliers and b as the
/// mean of y - w.x over free support vectors.
SvmModel train(const std::vector<LabeledSample>& samples, double c = kDefaultSvmC,
               double tol = kDefaultSvmTol);

/// w.x + b; the sign is the class, ties classify as road.
double decision(const SvmModel& model, const Vec3& x);

/// Equivalent support-vector expansion sum(y lambda x.x_i) + b.
double decision_expansion(const SvmModel& model, const Vec3& x);

/// Largest KKT residual over the training set (0 at an exact solution).
double kkt_violation(const SvmModel& model, const std::vector<LabeledSample>& samples);

/// Dual objective value for a multiplier vector.
double dual_objective(const std::vector<LabeledSample>& samples, const std::vector<double>& lambdas);

/// Deterministically samples n_per_class pixels labeled +1 from the
/// candidate mask and n_per_class labeled -1 from its complement.
/// Classes short on pixels contribute everything they have.
std::vector<LabeledSample> build_training_set(const RgbImage& img, const BinaryMask& candidates,
                                              std::size_t n_per_class, std::uint64_t seed);

/// mask = decision(model, pixel) >= 0
BinaryMask segment(const RgbImage& img, const SvmModel& model);

void save_svm_model(const SvmModel& model, const std::string& path);
SvmModel load_svm_model(const std::string& path);

}  // namespace shadowroad
