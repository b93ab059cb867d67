#pragma once

#include <array>
#include <string>
#include <vector>

#include "shadowroad/image.hpp"

namespace shadowroad {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<double, 9>;  // row-major

/// Gaussian road-color model: mean and covariance of training pixels,
/// with the inverse cached for distance evaluation. Covariance is the
/// 1/N estimate plus a small ridge so flat training regions stay
/// invertible.
struct RoadColorModel {
    Vec3 mean{};
    Mat3 covariance{};
    Mat3 covariance_inverse{};
};

constexpr double kCovarianceRidge = 1e-6;

/// Fits mean + regularized covariance. Throws "insufficient training
/// data" below 16 pixels.
RoadColorModel fit_road_model(const std::vector<Vec3>& pixels);

/// sqrt((m - x)^T Sigma^-1 (m - x))
double mahalanobis(const RoadColorModel& model, const Vec3& x);

/// Pixel is a road candidate iff its distance to the model is <= d_max.
BinaryMask extract_candidates(const RgbImage& img, const RoadColorModel& model, double d_max);

void save_road_model(const RoadColorModel& model, const std::string& path);
RoadColorModel load_road_model(const std::string& path);

/// Polygonal frame region marking assumed-road pixels.
class TrainingRegion {
public:
    explicit TrainingRegion(std::vector<std::pair<double, double>> polygon);

    static TrainingRegion rect(double x, double y, double w, double h);
    /// Bottom-center trapezoid: bottom edge spans the middle 50% of the
    /// width, top edge the middle 25%, over the bottom 20% of the height.
    static TrainingRegion default_trapezoid(int width, int height);
    /// Parses "trapezoid" (needs frame size), "rect:x,y,w,h" or
    /// "poly:x1,y1,x2,y2,...".
    static TrainingRegion parse(const std::string& spec, int frame_width, int frame_height);

    /// Pixel-center rasterization. Validates the region lies inside the
    /// frame and contains at least 16 pixels.
    std::vector<Vec3> collect_pixels(const RgbImage& img) const;
    BinaryMask to_mask(int width, int height) const;

    const std::vector<std::pair<double, double>>& polygon() const { return polygon_; }

private:
    bool contains(double px, double py) const;
    std::vector<std::pair<double, double>> polygon_;
};

}  // namespace shadowroad
