#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace rnsift {

/// Rectangular grid of luminance values, row-major. Values double as node
/// source voltages when an image drives the resistor network.
class Image {
public:
    Image() = default;
    Image(int width, int height, double fill = 0.0)
        : width_(width), height_(height),
          pixels_(static_cast<std::size_t>(check_dims(width, height)), fill) {}
    Image(int width, int height, std::vector<double> pixels)
        : width_(width), height_(height), pixels_(std::move(pixels)) {
        if (pixels_.size() != static_cast<std::size_t>(check_dims(width, height)))
            throw std::domain_error("Image: pixel count does not match dimensions");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return pixels_.size(); }

    double& at(int x, int y) { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }
    double at(int x, int y) const { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }

    std::span<const double> pixels() const { return pixels_; }
    std::span<double> pixels() { return pixels_; }
    const std::vector<double>& data() const { return pixels_; }
    std::vector<double>& data() { return pixels_; }

    double min() const;
    double max() const;
    /// max - min; the contrast threshold of keypoint detection is a fraction of this.
    double dynamic_range() const { return max() - min(); }

    /// Keep every step-th pixel starting at (0,0). Pure decimation, no averaging:
    /// mirrors the circuit wiring where coarser octaves tap every 2nd/4th source.
    Image decimate(int step) const;

    bool all_finite_nonnegative() const;

private:
    static long check_dims(int w, int h) {
        if (w <= 0 || h <= 0) throw std::domain_error("Image: dimensions must be positive");
        return static_cast<long>(w) * h;
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<double> pixels_;
};

} // namespace rnsift
