#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace shadowroad {

/// Error type thrown by every module. Messages carry a stable prefix
/// ("unsupported format:", "dimension mismatch:", ...) so callers can
/// report them verbatim.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct Rgb {
    double r = 0.0, g = 0.0, b = 0.0;
};

struct Hsv {
    double h = 0.0;  // degrees, [0, 360)
    double s = 0.0;  // [0, 1]
    double v = 0.0;  // [0, 1]
};

/// Dense row-major RGB image, channels as reals in [0, 1].
/// 8-bit files map a channel c to c/255 at the I/O boundary.
class RgbImage {
public:
    RgbImage() = default;
    RgbImage(int width, int height, Rgb fill = {})
        : width_(width), height_(height) {
        if (width < 1 || height < 1)
            throw Error("invalid image size: " + std::to_string(width) + "x" + std::to_string(height));
        data_.resize(static_cast<std::size_t>(width) * height * 3);
        for (int i = 0; i < width * height; ++i) {
            data_[3 * i + 0] = fill.r;
            data_[3 * i + 1] = fill.g;
            data_[3 * i + 2] = fill.b;
        }
    }

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width_) * height_; }

    Rgb at(int x, int y) const {
        const double* p = &data_[3 * idx(x, y)];
        return {p[0], p[1], p[2]};
    }
    void set(int x, int y, Rgb c) {
        double* p = &data_[3 * idx(x, y)];
        p[0] = c.r;
        p[1] = c.g;
        p[2] = c.b;
    }
    double channel(std::size_t pixel, int c) const { return data_[3 * pixel + c]; }
    void set_channel(std::size_t pixel, int c, double v) { data_[3 * pixel + c] = v; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

private:
    std::size_t idx(int x, int y) const { return static_cast<std::size_t>(y) * width_ + x; }
    int width_ = 0, height_ = 0;
    std::vector<double> data_;
};

/// Row-major H/S/V triples using the mean-intensity model of this
/// project (V is the channel mean, not max). H in degrees [0, 360).
class HsvImage {
public:
    HsvImage() = default;
    HsvImage(int width, int height) : width_(width), height_(height) {
        if (width < 1 || height < 1)
            throw Error("invalid image size: " + std::to_string(width) + "x" + std::to_string(height));
        data_.resize(static_cast<std::size_t>(width) * height * 3, 0.0);
    }

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width_) * height_; }

    Hsv at(int x, int y) const {
        const double* p = &data_[3 * idx(x, y)];
        return {p[0], p[1], p[2]};
    }
    void set(int x, int y, Hsv c) {
        double* p = &data_[3 * idx(x, y)];
        p[0] = c.h;
        p[1] = c.s;
        p[2] = c.v;
    }
    Hsv at_index(std::size_t pixel) const {
        const double* p = &data_[3 * pixel];
        return {p[0], p[1], p[2]};
    }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

private:
    std::size_t idx(int x, int y) const { return static_cast<std::size_t>(y) * width_ + x; }
    int width_ = 0, height_ = 0;
    std::vector<double> data_;
};

/// Row-major scalar map (NDI values, distances, ...).
class GrayMap {
public:
    GrayMap() = default;
    GrayMap(int width, int height, double fill = 0.0) : width_(width), height_(height) {
        if (width < 1 || height < 1)
            throw Error("invalid image size: " + std::to_string(width) + "x" + std::to_string(height));
        data_.assign(static_cast<std::size_t>(width) * height, fill);
    }

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return data_.size(); }

    double at(int x, int y) const { return data_[idx(x, y)]; }
    void set(int x, int y, double v) { data_[idx(x, y)] = v; }
    double operator[](std::size_t i) const { return data_[i]; }
    double& operator[](std::size_t i) { return data_[i]; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

private:
    std::size_t idx(int x, int y) const { return static_cast<std::size_t>(y) * width_ + x; }
    int width_ = 0, height_ = 0;
    std::vector<double> data_;
};

/// NDI maps are plain gray maps whose values live in [-1, 1].
using NdiMap = GrayMap;

/// Row-major boolean mask, 1 = foreground.
class BinaryMask {
public:
    BinaryMask() = default;
    BinaryMask(int width, int height, bool fill = false) : width_(width), height_(height) {
        if (width < 1 || height < 1)
            throw Error("invalid image size: " + std::to_string(width) + "x" + std::to_string(height));
        data_.assign(static_cast<std::size_t>(width) * height, fill ? 1 : 0);
    }

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return data_.size(); }

    bool at(int x, int y) const { return data_[idx(x, y)] != 0; }
    void set(int x, int y, bool v) { data_[idx(x, y)] = v ? 1 : 0; }
    bool get(std::size_t i) const { return data_[i] != 0; }
    void put(std::size_t i, bool v) { data_[i] = v ? 1 : 0; }

    bool in_bounds(int x, int y) const { return x >= 0 && x < width_ && y >= 0 && y < height_; }

    std::size_t count() const {
        std::size_t n = 0;
        for (auto v : data_) n += v;
        return n;
    }
    bool empty_mask() const { return count() == 0; }

    bool same_shape(const BinaryMask& o) const { return width_ == o.width_ && height_ == o.height_; }

    friend bool operator==(const BinaryMask& a, const BinaryMask& b) {
        return a.width_ == b.width_ && a.height_ == b.height_ && a.data_ == b.data_;
    }

    const std::vector<std::uint8_t>& data() const { return data_; }
    std::vector<std::uint8_t>& data() { return data_; }

private:
    std::size_t idx(int x, int y) const { return static_cast<std::size_t>(y) * width_ + x; }
    int width_ = 0, height_ = 0;
    std::vector<std::uint8_t> data_;
};

/// Offset set defining the neighborhood of a morphological operation.
/// Offsets are (dy, dx) pairs; the origin is always a member.
class StructuringElement {
public:
    StructuringElement() : offsets_{{0, 0}} {}
    explicit StructuringElement(std::vector<std::pair<int, int>> offsets);

    /// N x N full square, N odd >= 1.
    static StructuringElement square(int n);
    /// Plus-shaped element of width N (arms of length N/2), N odd >= 1.
    static StructuringElement cross(int n);
    /// Parses "square:N" / "cross:N".
    static StructuringElement parse(const std::string& spec);

    const std::vector<std::pair<int, int>>& offsets() const { return offsets_; }

    /// Offsets mirrored through the origin.
    StructuringElement reflected() const;

    std::string spec() const { return spec_; }

private:
    std::vector<std::pair<int, int>> offsets_;
    std::string spec_;
};

}  // namespace shadowroad
