#include "shadowroad/road_color.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace shadowroad {

namespace {

// Cholesky factor of an SPD 3x3: A = L L^T, L lower-triangular.
Mat3 cholesky(const Mat3& a) {
    Mat3 l{};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = a[3 * i + j];
            for (int k = 0; k < j; ++k) s -= l[3 * i + k] * l[3 * j + k];
            if (i == j) {
                if (s <= 0.0) throw Error("covariance not positive definite");
                l[3 * i + j] = std::sqrt(s);
            } else {
                l[3 * i + j] = s / l[3 * j + j];
            }
        }
    }
    return l;
}

Mat3 spd_inverse(const Mat3& a) {
    const Mat3 l = cholesky(a);
    Mat3 inv{};
    // solve L L^T x = e_c for each basis column
    for (int c = 0; c < 3; ++c) {
        double y[3];
        for (int i = 0; i < 3; ++i) {
            double s = (i == c) ? 1.0 : 0.0;
            for (int k = 0; k < i; ++k) s -= l[3 * i + k] * y[k];
            y[i] = s / l[3 * i + i];
        }
        double x[3];
        for (int i = 2; i >= 0; --i) {
            double s = y[i];
            for (int k = i + 1; k < 3; ++k) s -= l[3 * k + i] * x[k];
            x[i] = s / l[3 * i + i];
        }
        for (int i = 0; i < 3; ++i) inv[3 * i + c] = x[i];
    }
    return inv;
}

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

RoadColorModel fit_road_model(const std::vector<Vec3>& pixels) {
    if (pixels.size() < 16)
        throw Error("insufficient training data: " + std::to_string(pixels.size()) + " pixels (need >= 16)");

    const double n = static_cast<double>(pixels.size());
    RoadColorModel m;
    for (const auto& p : pixels)
        for (int c = 0; c < 3; ++c) m.mean[c] += p[c];
    for (int c = 0; c < 3; ++c) m.mean[c] /= n;

    for (const auto& p : pixels) {
        double d[3] = {p[0] - m.mean[0], p[1] - m.mean[1], p[2] - m.mean[2]};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) m.covariance[3 * i + j] += d[i] * d[j];
    }
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m.covariance[3 * i + j] /= n;
    for (int i = 0; i < 3; ++i) m.covariance[3 * i + i] += kCovarianceRidge;

    m.covariance_inverse = spd_inverse(m.covariance);
    return m;
}

double mahalanobis(const RoadColorModel& model, const Vec3& x) {
    const double d[3] = {model.mean[0] - x[0], model.mean[1] - x[1], model.mean[2] - x[2]};
    double q = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) q += d[i] * model.covariance_inverse[3 * i + j] * d[j];
    return std::sqrt(std::max(q, 0.0));
}

BinaryMask extract_candidates(const RgbImage& img, const RoadColorModel& model, double d_max) {
    if (d_max < 0.0) throw Error("d_max must be >= 0");
    BinaryMask mask(img.width(), img.height());
    const std::size_t n = img.pixel_count();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3 p{img.channel(i, 0), img.channel(i, 1), img.channel(i, 2)};
        mask.put(i, mahalanobis(model, p) <= d_max);
    }
    return mask;
}

void save_road_model(const RoadColorModel& model, const std::string& path) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw Error("cannot write file: " + path);
    f << "# shadowroad road color model\n";
    f << "mean =";
    for (double v : model.mean) f << " " << fmt17(v);
    f << "\ncovariance =";
    for (double v : model.covariance) f << " " << fmt17(v);
    f << "\n";
}

RoadColorModel load_road_model(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error("unreadable file: " + path);
    RoadColorModel m;
    bool have_mean = false, have_cov = false;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(0, eq);
        key.erase(key.find_last_not_of(" \t") + 1);
        std::istringstream vals(line.substr(eq + 1));
        if (key == "mean") {
            for (auto& v : m.mean)
                if (!(vals >> v)) throw Error("unsupported format: " + path);
            have_mean = true;
        } else if (key == "covariance") {
            for (auto& v : m.covariance)
                if (!(vals >> v)) throw Error("unsupported format: " + path);
            have_cov = true;
        }
    }
    if (!have_mean || !have_cov) throw Error("unsupported format: " + path);
    m.covariance_inverse = spd_inverse(m.covariance);
    return m;
}

TrainingRegion::TrainingRegion(std::vector<std::pair<double, double>> polygon)
    : polygon_(std::move(polygon)) {
    if (polygon_.size() < 3) throw Error("training region: polygon needs >= 3 vertices");
}

TrainingRegion TrainingRegion::rect(double x, double y, double w, double h) {
    if (w <= 0 || h <= 0) throw Error("training region: empty rectangle");
    return TrainingRegion({{x, y}, {x + w, y}, {x + w, y + h}, {x, y + h}});
}

TrainingRegion TrainingRegion::default_trapezoid(int width, int height) {
    const double w = width, h = height;
    return TrainingRegion({{0.375 * w, 0.8 * h}, {0.625 * w, 0.8 * h}, {0.75 * w, h}, {0.25 * w, h}});
}

TrainingRegion TrainingRegion::parse(const std::string& spec, int frame_width, int frame_height) {
    if (spec == "trapezoid") return default_trapezoid(frame_width, frame_height);
    auto parse_numbers = [&](const std::string& s) {
        std::vector<double> out;
        std::string tmp = s;
        for (auto& c : tmp)
            if (c == ',') c = ' ';
        std::istringstream in(tmp);
        double v;
        while (in >> v) out.push_back(v);
        return out;
    };
    if (spec.rfind("rect:", 0) == 0) {
        const auto v = parse_numbers(spec.substr(5));
        if (v.size() != 4) throw Error("training region: bad spec '" + spec + "'");
        return rect(v[0], v[1], v[2], v[3]);
    }
    if (spec.rfind("poly:", 0) == 0) {
        const auto v = parse_numbers(spec.substr(5));
        if (v.size() < 6 || v.size() % 2 != 0) throw Error("training region: bad spec '" + spec + "'");
        std::vector<std::pair<double, double>> poly;
        for (std::size_t i = 0; i < v.size(); i += 2) poly.emplace_back(v[i], v[i + 1]);
        return TrainingRegion(std::move(poly));
    }
    throw Error("training region: bad spec '" + spec + "'");
}

bool TrainingRegion::contains(double px, double py) const {
    bool inside = false;
    const std::size_t n = polygon_.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const auto [xi, yi] = polygon_[i];
        const auto [xj, yj] = polygon_[j];
        if ((yi > py) != (yj > py)) {
            const double xc = xi + (py - yi) * (xj - xi) / (yj - yi);
            if (px < xc) inside = !inside;
        }
    }
    return inside;
}

BinaryMask TrainingRegion::to_mask(int width, int height) const {
    for (const auto& [x, y] : polygon_)
        if (x < 0 || x > width || y < 0 || y > height)
            throw Error("training region: polygon outside the frame");
    BinaryMask mask(width, height);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            mask.set(x, y, contains(x + 0.5, y + 0.5));
    return mask;
}

std::vector<Vec3> TrainingRegion::collect_pixels(const RgbImage& img) const {
    const BinaryMask mask = to_mask(img.width(), img.height());
    std::vector<Vec3> out;
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (mask.get(i)) out.push_back({img.channel(i, 0), img.channel(i, 1), img.channel(i, 2)});
    if (out.size() < 16)
        throw Error("insufficient training data: region covers " + std::to_string(out.size()) + " pixels");
    return out;
}

}  // namespace shadowroad
