#include "rnsift/sift.hpp"

#include <algorithm>
#include <chrono>
#include <future>
#include <numbers>
#include <stdexcept>

#include "rnsift/kernels.hpp"
#include "rnsift/solver.hpp"

namespace rnsift {

const char* to_string(FilterBackend b) {
    return b == FilterBackend::ideal_gaussian ? "ideal" : "network";
}

std::vector<double> PyramidConfig::resolved_sigmas() const {
    if (!sigmas.empty()) return sigmas;
    std::vector<double> s(static_cast<std::size_t>(scales_per_octave));
    const double kk = k();
    double w = base_sigma;
    for (auto& v : s) {
        v = w;
        w *= kk;
    }
    return s;
}

void PyramidConfig::validate() const {
    if (octaves < 1) throw std::domain_error("PyramidConfig: need at least one octave");
    if (scales_per_octave < 3)
        throw std::domain_error("PyramidConfig: DoG extrema need at least 3 scales per octave");
    if (backend == FilterBackend::resistor_network) {
        if (static_cast<int>(lambdas.size()) != scales_per_octave)
            throw std::domain_error("PyramidConfig: one lambda per scale required");
        for (std::size_t i = 0; i < lambdas.size(); ++i) {
            if (lambdas[i] < 0.0)
                throw std::domain_error("PyramidConfig: lambdas must be nonnegative");
            if (i > 0 && lambdas[i] <= lambdas[i - 1])
                throw std::domain_error("PyramidConfig: lambdas must ascend (widths ascend)");
        }
    } else {
        const auto s = resolved_sigmas();
        if (static_cast<int>(s.size()) != scales_per_octave)
            throw std::domain_error("PyramidConfig: one sigma per scale required");
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (!(s[i] > 0.0)) throw std::domain_error("PyramidConfig: sigmas must be positive");
            if (i > 0 && s[i] <= s[i - 1])
                throw std::domain_error("PyramidConfig: sigmas must ascend");
        }
    }
    if (min_top_dimension < 1)
        throw std::domain_error("PyramidConfig: min_top_dimension must be positive");
}

namespace {

int fold(int i, int n, Boundary b) {
    if (b == Boundary::truncate) return i; // callers renormalize
    while (i < 0 || i >= n) {
        if (b == Boundary::periodic) {
            i = ((i % n) + n) % n;
        } else {
            if (i < 0) i = -i;
            if (i >= n) i = 2 * n - 2 - i;
        }
    }
    return i;
}

} // namespace

Image gaussian_blur(const Image& src, double sigma, Boundary boundary) {
    if (!(sigma > 0.0)) throw std::domain_error("gaussian_blur: sigma must be positive");
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    const std::vector<double> k = gaussian_kernel_1d(sigma, radius);
    const int w = src.width(), h = src.height();
    Image tmp(w, h), out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0, wsum = 0.0;
            for (int t = -radius; t <= radius; ++t) {
                const int xx = fold(x + t, w, boundary);
                if (xx < 0 || xx >= w) continue;
                const double kw = k[static_cast<std::size_t>(t + radius)];
                acc += kw * src.at(xx, y);
                wsum += kw;
            }
            tmp.at(x, y) = acc / wsum;
        }
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0, wsum = 0.0;
            for (int t = -radius; t <= radius; ++t) {
                const int yy = fold(y + t, h, boundary);
                if (yy < 0 || yy >= h) continue;
                const double kw = k[static_cast<std::size_t>(t + radius)];
                acc += kw * tmp.at(x, yy);
                wsum += kw;
            }
            out.at(x, y) = acc / wsum;
        }
    }
    return out;
}

namespace {

Image filter_level(const Image& base, const PyramidConfig& cfg, int scale) {
    if (cfg.backend == FilterBackend::ideal_gaussian)
        return gaussian_blur(base, cfg.resolved_sigmas()[static_cast<std::size_t>(scale)],
                             cfg.boundary);
    const double lam = cfg.lambdas[static_cast<std::size_t>(scale)];
    Smoother2DSpec spec{base.height(), base.width(), lam, cfg.stencil, cfg.boundary};
    SolveConfig sc;
    sc.method = SolveMethod::iterative_cg;
    sc.tolerance = cfg.solve_tolerance;
    return filter_image(base, spec, sc);
}

struct Gradient {
    double magnitude, angle; // angle in [0, 2pi)
};

Gradient gradient_at(const Image& img, int x, int y) {
    const double dx = 0.5 * (img.at(x + 1, y) - img.at(x - 1, y));
    const double dy = 0.5 * (img.at(x, y + 1) - img.at(x, y - 1));
    double a = std::atan2(dy, dx);
    if (a < 0.0) a += 2.0 * std::numbers::pi;
    return {std::sqrt(dx * dx + dy * dy), a};
}

double now_minus(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

GaussianPyramid build_pyramid(const Image& image, const PyramidConfig& config) {
    config.validate();
    if (!image.all_finite_nonnegative())
        throw std::domain_error("build_pyramid: pixels must be finite and nonnegative");
    const int top_factor = 1 << (config.octaves - 1);
    if ((image.width() + top_factor - 1) / top_factor < config.min_top_dimension ||
        (image.height() + top_factor - 1) / top_factor < config.min_top_dimension)
        throw std::domain_error("build_pyramid: image too small, top octave falls under the 8x8 floor");

    GaussianPyramid pyr;
    pyr.config = config;
    pyr.octaves.resize(static_cast<std::size_t>(config.octaves));
    std::vector<Image> bases;
    bases.reserve(static_cast<std::size_t>(config.octaves));
    for (int o = 0; o < config.octaves; ++o) {
        bases.push_back(image.decimate(1 << o));
        pyr.octaves[static_cast<std::size_t>(o)].resize(
            static_cast<std::size_t>(config.scales_per_octave));
    }

    // the level solves are independent; run them concurrently
    std::vector<std::future<void>> jobs;
    jobs.reserve(static_cast<std::size_t>(config.octaves * config.scales_per_octave));
    for (int o = 0; o < config.octaves; ++o)
        for (int s = 0; s < config.scales_per_octave; ++s)
            jobs.push_back(std::async(std::launch::async, [&, o, s] {
                pyr.octaves[static_cast<std::size_t>(o)][static_cast<std::size_t>(s)] =
                    filter_level(bases[static_cast<std::size_t>(o)], config, s);
            }));
    for (auto& j : jobs) j.get();
    return pyr;
}

DoGPyramid build_dog(const GaussianPyramid& pyramid) {
    DoGPyramid dog;
    dog.octaves.resize(pyramid.octaves.size());
    for (std::size_t o = 0; o < pyramid.octaves.size(); ++o) {
        const auto& scales = pyramid.octaves[o];
        if (scales.size() < 2) throw std::domain_error("build_dog: need at least two scales");
        for (std::size_t s = 0; s + 1 < scales.size(); ++s) {
            const Image& a = scales[s];
            const Image& b = scales[s + 1];
            Image d(a.width(), a.height());
            for (std::size_t i = 0; i < d.size(); ++i)
                d.data()[i] = b.data()[i] - a.data()[i];
            dog.octaves[o].push_back(std::move(d));
        }
    }
    return dog;
}

std::vector<Keypoint> detect_keypoints(const DoGPyramid& dog, double contrast_threshold) {
    std::vector<Keypoint> kps;
    for (std::size_t o = 0; o < dog.octaves.size(); ++o) {
        const auto& levels = dog.octaves[o];
        if (levels.size() < 3) throw std::domain_error("detect_keypoints: need >= 3 DoG levels");
        for (std::size_t s = 1; s + 1 < levels.size(); ++s) {
            const Image& lo = levels[s - 1];
            const Image& mid = levels[s];
            const Image& hi = levels[s + 1];
            const int w = mid.width(), h = mid.height();
            for (int y = 1; y < h - 1; ++y) {
                for (int x = 1; x < w - 1; ++x) {
                    const double v = mid.at(x, y);
                    if (std::abs(v) < contrast_threshold) continue;
                    bool is_max = true, is_min = true;
                    for (int dy = -1; dy <= 1 && (is_max || is_min); ++dy) {
                        for (int dx = -1; dx <= 1; ++dx) {
                            const double a = lo.at(x + dx, y + dy);
                            const double b = hi.at(x + dx, y + dy);
                            if (v <= a || v <= b) is_max = false;
                            if (v >= a || v >= b) is_min = false;
                            if (dx != 0 || dy != 0) {
                                const double m = mid.at(x + dx, y + dy);
                                if (v <= m) is_max = false;
                                if (v >= m) is_min = false;
                            }
                            if (!is_max && !is_min) break;
                        }
                    }
                    if (is_max || is_min)
                        kps.push_back({static_cast<int>(o), static_cast<int>(s), x, y, is_max, v, 0.0});
                }
            }
        }
    }
    return kps;
}

std::vector<Keypoint> assign_orientation(const Keypoint& kp, const Image& filtered,
                                         const OrientationConfig& cfg, DropReason* reason) {
    if (reason) *reason = DropReason::none;
    const int r = cfg.radius;
    if (kp.x < r + 1 || kp.y < r + 1 || kp.x >= filtered.width() - r - 1 ||
        kp.y >= filtered.height() - r - 1) {
        if (reason) *reason = DropReason::border;
        return {};
    }
    std::vector<double> hist(static_cast<std::size_t>(cfg.bins), 0.0);
    const double bin_width = 2.0 * std::numbers::pi / cfg.bins;
    for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
            if (dx * dx + dy * dy > r * r) continue;
            const Gradient g = gradient_at(filtered, kp.x + dx, kp.y + dy);
            if (g.magnitude == 0.0) continue;
            const double w =
                g.magnitude * std::exp(-0.5 * (dx * dx + dy * dy) /
                                       (cfg.sigma_weight * cfg.sigma_weight));
            int b = static_cast<int>(g.angle / bin_width);
            if (b >= cfg.bins) b = cfg.bins - 1;
            hist[static_cast<std::size_t>(b)] += w;
        }
    }
    const double peak = *std::max_element(hist.begin(), hist.end());
    if (peak <= 0.0) {
        if (reason) *reason = DropReason::zero_gradient;
        return {};
    }
    const int peak_bin =
        static_cast<int>(std::max_element(hist.begin(), hist.end()) - hist.begin());
    std::vector<Keypoint> out;
    auto emit = [&](int b) {
        Keypoint k = kp;
        k.theta = (b + 0.5) * bin_width;
        out.push_back(k);
    };
    emit(peak_bin);
    for (int b = 0; b < cfg.bins; ++b) {
        if (b == peak_bin) continue;
        const double v = hist[static_cast<std::size_t>(b)];
        const double prev = hist[static_cast<std::size_t>((b + cfg.bins - 1) % cfg.bins)];
        const double next = hist[static_cast<std::size_t>((b + 1) % cfg.bins)];
        if (v >= cfg.peak_ratio * peak && v > prev && v > next) emit(b);
    }
    return out;
}

std::optional<Descriptor> make_descriptor(const Keypoint& kp, const Image& filtered,
                                          const DescriptorConfig& cfg, DropReason* reason) {
    if (reason) *reason = DropReason::none;
    const int n = cfg.window;
    const int cells = n / 4;
    if (cells * 4 != n) throw std::domain_error("make_descriptor: window must be 4x4 cells");
    const double half = n / 2.0;
    const double c = std::cos(kp.theta), s = std::sin(kp.theta);

    Descriptor d;
    d.values.fill(0.0);
    const double bin_width = 2.0 * std::numbers::pi / 8.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double v = i - half + 0.5;
            const double u = j - half + 0.5;
            const int px = static_cast<int>(std::lround(kp.x + u * c - v * s));
            const int py = static_cast<int>(std::lround(kp.y + u * s + v * c));
            if (px < 1 || py < 1 || px >= filtered.width() - 1 || py >= filtered.height() - 1) {
                if (reason) *reason = DropReason::border;
                return std::nullopt;
            }
            const Gradient g = gradient_at(filtered, px, py);
            if (g.magnitude == 0.0) continue;
            double rel = g.angle - kp.theta;
            while (rel < 0.0) rel += 2.0 * std::numbers::pi;
            while (rel >= 2.0 * std::numbers::pi) rel -= 2.0 * std::numbers::pi;
            int b = static_cast<int>(rel / bin_width);
            if (b >= 8) b = 7;
            const int cell = (i / 4) * cells + (j / 4);
            d.values[static_cast<std::size_t>(cell * 8 + b)] += g.magnitude;
        }
    }
    double norm = 0.0;
    for (double v : d.values) norm += v * v;
    if (norm <= 0.0) {
        if (reason) *reason = DropReason::zero_gradient;
        return std::nullopt;
    }
    // Clamp-and-renormalize fixpoint in closed form (water-filling): the
    // unique scale c with |min(c*v, clamp)|_2 = 1, so the emitted vector is
    // unit-norm with every component within the clamp. Undefined when the
    // gradient mass sits in fewer bins than the clamp can absorb.
    std::array<double, 128> sorted = d.values;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    std::array<double, 129> suffix_sq{};
    for (int i = 127; i >= 0; --i)
        suffix_sq[static_cast<std::size_t>(i)] =
            suffix_sq[static_cast<std::size_t>(i) + 1] +
            sorted[static_cast<std::size_t>(i)] * sorted[static_cast<std::size_t>(i)];
    const double c2 = cfg.clamp * cfg.clamp;
    double scale = -1.0;
    for (int k = 0; k < 128; ++k) {
        const double rest = suffix_sq[static_cast<std::size_t>(k)];
        const double need = 1.0 - k * c2;
        if (need <= 0.0) break;
        if (rest <= 0.0) break;
        const double c = std::sqrt(need / rest);
        const bool upper_ok = k == 0 || c * sorted[static_cast<std::size_t>(k - 1)] >= cfg.clamp * (1.0 - 1e-12);
        const bool lower_ok = c * sorted[static_cast<std::size_t>(k)] <= cfg.clamp * (1.0 + 1e-12);
        if (upper_ok && lower_ok) {
            scale = c;
            break;
        }
    }
    if (scale <= 0.0) {
        if (reason) *reason = DropReason::zero_gradient;
        return std::nullopt;
    }
    for (double& v : d.values) v = std::min(v * scale, cfg.clamp);
    return d;
}

SiftResult run_sift(const Image& image, const SiftConfig& config) {
    const auto t_start = std::chrono::steady_clock::now();
    SiftResult res;
    res.contrast_threshold_used = config.contrast_threshold >= 0.0
                                      ? config.contrast_threshold
                                      : 0.005 * image.dynamic_range();

    auto t0 = std::chrono::steady_clock::now();
    const GaussianPyramid pyr = build_pyramid(image, config.pyramid);
    res.timings.pyramid_s = now_minus(t0);

    t0 = std::chrono::steady_clock::now();
    const DoGPyramid dog = build_dog(pyr);
    res.timings.dog_s = now_minus(t0);

    t0 = std::chrono::steady_clock::now();
    const std::vector<Keypoint> raw = detect_keypoints(dog, res.contrast_threshold_used);
    res.raw_keypoint_count = static_cast<int>(raw.size());
    res.timings.detection_s = now_minus(t0);

    t0 = std::chrono::steady_clock::now();
    std::vector<Keypoint> oriented;
    for (const Keypoint& kp : raw) {
        const int src = kp.scale + config.gradient_source_offset;
        const auto& scales = pyr.octaves[static_cast<std::size_t>(kp.octave)];
        const Image& img =
            scales[static_cast<std::size_t>(std::clamp(src, 0, static_cast<int>(scales.size()) - 1))];
        DropReason why = DropReason::none;
        const auto got = assign_orientation(kp, img, config.orientation, &why);
        if (got.empty()) {
            if (why == DropReason::border) ++res.drops.orientation_border;
            if (why == DropReason::zero_gradient) ++res.drops.orientation_zero_gradient;
            continue;
        }
        oriented.insert(oriented.end(), got.begin(), got.end());
    }
    res.timings.orientation_s = now_minus(t0);

    t0 = std::chrono::steady_clock::now();
    for (const Keypoint& kp : oriented) {
        const int src = kp.scale + config.gradient_source_offset;
        const auto& scales = pyr.octaves[static_cast<std::size_t>(kp.octave)];
        const Image& img =
            scales[static_cast<std::size_t>(std::clamp(src, 0, static_cast<int>(scales.size()) - 1))];
        DropReason why = DropReason::none;
        auto desc = make_descriptor(kp, img, config.descriptor, &why);
        if (!desc) {
            if (why == DropReason::border) ++res.drops.descriptor_border;
            if (why == DropReason::zero_gradient) ++res.drops.descriptor_zero_gradient;
            continue;
        }
        desc->keypoint = res.keypoints.size();
        res.keypoints.push_back(kp);
        res.descriptors.push_back(*desc);
    }
    res.timings.descriptor_s = now_minus(t0);
    res.timings.total_s = now_minus(t_start);
    return res;
}

} // namespace rnsift
