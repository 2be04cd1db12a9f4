#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "rnsift/image.hpp"
#include "rnsift/network.hpp"

namespace rnsift {

enum class FilterBackend { ideal_gaussian, resistor_network };

const char* to_string(FilterBackend b);

struct PyramidConfig {
    int octaves = 3;
    int scales_per_octave = 6; ///< S; k = 2^(1/S)
    FilterBackend backend = FilterBackend::ideal_gaussian;
    /// network backend: one smoothing weight per scale, reused by every octave
    std::vector<double> lambdas = {4.0, 20.0, 40.0, 80.0, 100.0, 120.0};
    /// ideal backend: explicit widths; empty = base_sigma * k^j
    std::vector<double> sigmas;
    double base_sigma = 1.6;
    Stencil2D stencil = Stencil2D::diagonal_augmented;
    Boundary boundary = Boundary::mirror;
    double solve_tolerance = 1e-9;
    int min_top_dimension = 8;

    double k() const { return std::pow(2.0, 1.0 / scales_per_octave); }
    /// The per-scale widths the ideal backend will use.
    std::vector<double> resolved_sigmas() const;
    void validate() const;
};

struct GaussianPyramid {
    PyramidConfig config;
    std::vector<std::vector<Image>> octaves; ///< [octave][scale], ascending width
};

struct DoGPyramid {
    std::vector<std::vector<Image>> octaves; ///< [octave][level], level j = scale j+1 - scale j
};

struct Keypoint {
    int octave = 0;
    int scale = 0; ///< DoG level index, interior only
    int x = 0, y = 0; ///< octave-local pixel coordinates
    bool is_maximum = true;
    double value = 0.0; ///< signed DoG extremum value
    double theta = 0.0; ///< orientation, radians in [0, 2pi)
};

struct Descriptor {
    std::array<double, 128> values{}; ///< 16 cells x 8 bins, unit norm
    std::size_t keypoint = 0;         ///< index of the parent oriented keypoint
};

enum class DropReason { none, border, zero_gradient };

struct OrientationConfig {
    int bins = 36;
    int radius = 8;            ///< disc radius, pixels
    double sigma_weight = 4.0; ///< Gaussian magnitude weighting
    double peak_ratio = 0.8;   ///< extra orientations for local maxima >= ratio * peak
};

struct DescriptorConfig {
    int window = 16;    ///< window samples per side (4x4 cells of 4x4)
    double clamp = 0.2; ///< component clamp before renormalization
};

/// Separable Gaussian convolution, the ideal-backend smoother.
Image gaussian_blur(const Image& image, double sigma, Boundary boundary = Boundary::mirror);

/// Smooth the (decimated) source per octave and scale. Octave o taps every
/// 2^o-th source pixel. Throws std::domain_error when the top octave would
/// fall under the 8x8 floor.
GaussianPyramid build_pyramid(const Image& image, const PyramidConfig& config);

/// Elementwise differences of adjacent scales, S-1 levels per octave.
DoGPyramid build_dog(const GaussianPyramid& pyramid);

/// Strict 26-neighbor extrema with |value| >= contrast_threshold. Border
/// pixels and the outermost DoG levels are excluded.
std::vector<Keypoint> detect_keypoints(const DoGPyramid& dog, double contrast_threshold);

/// Gradient-histogram orientations for one keypoint over the matching
/// Gaussian image. May return several keypoints (multiple dominant bins) or
/// none (dropped; reason reported).
std::vector<Keypoint> assign_orientation(const Keypoint& kp, const Image& filtered,
                                         const OrientationConfig& config,
                                         DropReason* reason = nullptr);

/// 128-component descriptor over the theta-rotated 16x16 neighborhood.
std::optional<Descriptor> make_descriptor(const Keypoint& kp, const Image& filtered,
                                          const DescriptorConfig& config,
                                          DropReason* reason = nullptr);

struct StageTimings {
    double pyramid_s = 0.0;
    double dog_s = 0.0;
    double detection_s = 0.0;
    double orientation_s = 0.0;
    double descriptor_s = 0.0;
    double total_s = 0.0;
};

struct DropCounts {
    int orientation_border = 0;
    int orientation_zero_gradient = 0;
    int descriptor_border = 0;
    int descriptor_zero_gradient = 0;
};

struct SiftConfig {
    PyramidConfig pyramid;
    /// Negative = auto: 0.5% of the input image's dynamic range.
    double contrast_threshold = -1.0;
    OrientationConfig orientation;
    DescriptorConfig descriptor;
    /// Gaussian image read by orientation/descriptor for a keypoint at DoG
    /// level j: scale j + offset of the same octave.
    int gradient_source_offset = 1;
};

struct SiftResult {
    std::vector<Keypoint> keypoints;     ///< oriented keypoints with descriptors
    std::vector<Descriptor> descriptors; ///< descriptors[i] belongs to keypoints[i]
    int raw_keypoint_count = 0;          ///< extrema before orientation/descriptor stages
    DropCounts drops;
    StageTimings timings;
    double contrast_threshold_used = 0.0;
};

/// The full pipeline: pyramid, DoG, detection, orientation, descriptors.
SiftResult run_sift(const Image& image, const SiftConfig& config);

} // namespace rnsift
