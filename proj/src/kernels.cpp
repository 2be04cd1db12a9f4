#include "rnsift/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rnsift/solver.hpp"

namespace rnsift {

std::vector<double> gaussian_kernel_1d(double sigma, int support_radius) {
    if (!(sigma > 0.0)) throw std::domain_error("gaussian_kernel_1d: sigma must be positive");
    if (support_radius < static_cast<int>(std::ceil(3.0 * sigma)))
        throw std::domain_error("gaussian_kernel_1d: support_radius must be >= ceil(3*sigma)");
    std::vector<double> k(static_cast<std::size_t>(2 * support_radius + 1));
    double sum = 0.0;
    for (int x = -support_radius; x <= support_radius; ++x) {
        const double v = std::exp(-0.5 * x * x / (sigma * sigma));
        k[static_cast<std::size_t>(x + support_radius)] = v;
        sum += v;
    }
    for (double& v : k) v /= sum;
    return k;
}

double gaussian_2d(double x, double y, double sigma, KernelForm form) {
    if (!(sigma > 0.0)) throw std::domain_error("gaussian_2d: sigma must be positive");
    const double norm = 1.0 / (2.0 * std::numbers::pi * sigma * sigma);
    const double q = x * x + y * y;
    return form == KernelForm::standard ? norm * std::exp(-q / (2.0 * sigma * sigma))
                                        : norm * std::exp(-q);
}

double regularization_kernel(double x, double lambda, KernelForm form) {
    if (!(lambda > 0.0))
        throw std::domain_error("regularization_kernel: lambda must be positive");
    const double w = std::sqrt(2.0) * std::pow(lambda, 0.25);
    const double ax = std::abs(x) / w;
    const double expo = form == KernelForm::standard ? -ax : ax;
    return 1.0 / (2.0 * std::pow(lambda, 0.25)) * std::exp(expo) *
           std::cos(ax - std::numbers::pi / 4.0);
}

namespace {

struct FitProblem {
    std::span<const double> response; // sum-normalized
    std::span<const double> dist2;    // squared distance to the peak, per node
    double peak = 0.0;
};

double lsq_amplitude(const FitProblem& p, std::span<const double> shape) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < shape.size(); ++i) {
        num += shape[i] * p.response[i];
        den += shape[i] * shape[i];
    }
    return den > 0.0 ? num / den : 0.0;
}

void gaussian_shape(const FitProblem& p, double sigma, std::vector<double>& shape) {
    const double inv = -0.5 / (sigma * sigma);
    for (std::size_t i = 0; i < shape.size(); ++i)
        shape[i] = std::exp(p.dist2[i] * inv);
}

// Total absolute deviation of the amplitude-fitted Gaussian. A plain mean over
// the sigma-dependent support would reward absurdly wide fits by dilution.
double objective(const FitProblem& p, double sigma, std::vector<double>& scratch) {
    gaussian_shape(p, sigma, scratch);
    const double a = lsq_amplitude(p, scratch);
    double s = 0.0;
    for (std::size_t i = 0; i < scratch.size(); ++i)
        s += std::abs(p.response[i] - a * scratch[i]);
    return s;
}

FitResult fit_core(std::vector<double> response, std::vector<double> dist2, double bracket_hi) {
    const std::size_t n = response.size();
    double sum = 0.0;
    for (double v : response) sum += v;
    if (!(sum > 0.0)) throw UnfittableError("fit_sigma: response has nonpositive mass");
    for (double& v : response) v /= sum;

    FitProblem p;
    p.response = response;
    p.dist2 = dist2;
    p.peak = *std::max_element(response.begin(), response.end());
    const double lo = *std::min_element(response.begin(), response.end());
    if (p.peak - lo <= 1e-12 * std::abs(p.peak))
        throw UnfittableError("fit_sigma: flat response");

    // golden-section width search
    const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = 0.1, b = bracket_hi;
    std::vector<double> scratch(n);
    double x1 = b - golden * (b - a), x2 = a + golden * (b - a);
    double f1 = objective(p, x1, scratch), f2 = objective(p, x2, scratch);
    while (b - a > 1e-4) {
        if (f1 < f2) {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - golden * (b - a);
            f1 = objective(p, x1, scratch);
        } else {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + golden * (b - a);
            f2 = objective(p, x2, scratch);
        }
    }
    const double sigma = 0.5 * (a + b);
    if (sigma < 0.1 + 1e-3 || sigma > bracket_hi - 1e-3)
        throw UnfittableError("fit_sigma: best width clamped at the search bracket");

    FitResult r;
    r.sigma_star = sigma;
    gaussian_shape(p, sigma, scratch);
    r.amplitude = lsq_amplitude(p, scratch);
    if (!(r.amplitude > 0.0)) throw UnfittableError("fit_sigma: nonpositive fit amplitude");
    r.fitted.resize(n);
    r.per_node_error_pct.resize(n);
    r.in_support.resize(n);
    const double shape_peak = *std::max_element(scratch.begin(), scratch.end());
    double err_sum = 0.0;
    std::size_t support = 0;
    for (std::size_t i = 0; i < n; ++i) {
        r.fitted[i] = r.amplitude * scratch[i];
        r.per_node_error_pct[i] = std::abs(response[i] - r.fitted[i]) / p.peak * 100.0;
        r.in_support[i] = scratch[i] >= 1e-3 * shape_peak;
        if (r.in_support[i]) {
            err_sum += r.per_node_error_pct[i];
            r.max_relative_error_pct = std::max(r.max_relative_error_pct, r.per_node_error_pct[i]);
            ++support;
        }
    }
    r.mean_relative_error_pct = err_sum / static_cast<double>(support);
    return r;
}

std::size_t unique_peak_index(std::span<const double> response) {
    const auto it = std::max_element(response.begin(), response.end());
    return static_cast<std::size_t>(it - response.begin());
}

} // namespace

FitResult fit_sigma(std::span<const double> response) {
    const std::size_t n = response.size();
    if (n < 5) throw std::domain_error("fit_sigma: response too short");
    const std::size_t c = unique_peak_index(response);
    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = static_cast<double>(i) - static_cast<double>(c);
        d2[i] = d * d;
    }
    return fit_core({response.begin(), response.end()}, std::move(d2),
                    static_cast<double>(n) / 4.0);
}

FitResult fit_sigma_grid(std::span<const double> response, int rows, int cols) {
    if (rows < 5 || cols < 5) throw std::domain_error("fit_sigma_grid: grid too small");
    if (response.size() != static_cast<std::size_t>(rows) * cols)
        throw std::domain_error("fit_sigma_grid: size mismatch");
    const std::size_t c = unique_peak_index(response);
    const int pr = static_cast<int>(c) / cols, pc = static_cast<int>(c) % cols;
    std::vector<double> d2(response.size());
    for (int r = 0; r < rows; ++r)
        for (int cc2 = 0; cc2 < cols; ++cc2)
            d2[static_cast<std::size_t>(r) * cols + cc2] =
                static_cast<double>(r - pr) * (r - pr) + static_cast<double>(cc2 - pc) * (cc2 - pc);
    return fit_core({response.begin(), response.end()}, std::move(d2),
                    static_cast<double>(std::min(rows, cols)) / 4.0);
}

DeviationReport1D deviation_report_1d(int node_count, double lambda, Boundary boundary) {
    Smoother1DSpec spec{node_count, lambda, boundary};
    spec.validate();
    DeviationReport1D rep;
    rep.node_count = node_count;
    rep.lambda = lambda;
    rep.center = node_count / 2;
    rep.response = impulse_response(spec, rep.center);
    if (lambda == 0.0) {
        rep.fit.degenerate_identity = true;
        rep.fit.fitted = rep.response;
        rep.fit.per_node_error_pct.assign(rep.response.size(), 0.0);
        rep.fit.in_support.assign(rep.response.size(), 1);
        return rep;
    }
    rep.fit = fit_sigma(rep.response);
    double sum = 0.0;
    for (double v : rep.response) sum += v;
    for (double& v : rep.response) v /= sum;
    return rep;
}

DeviationReport2D deviation_report_2d(const Smoother2DSpec& spec) {
    spec.validate();
    if (spec.rows < 33 || spec.cols < 33)
        throw std::domain_error("deviation_report_2d: grid must be at least 33x33");
    DeviationReport2D rep;
    rep.spec = spec;
    rep.center_row = spec.rows / 2;
    rep.center_col = spec.cols / 2;
    rep.response = impulse_response(spec, rep.center_row, rep.center_col);

    const auto ring_rows = [&](const std::vector<double>& errors) {
        std::vector<RingRow> rings;
        for (int k = 0; k <= 8; ++k) {
            RingRow row;
            row.chebyshev_distance = k;
            row.circle_index = k + 1;
            double esum = 0.0, rsum = 0.0;
            int count = 0;
            for (int r = 0; r < spec.rows; ++r) {
                for (int c = 0; c < spec.cols; ++c) {
                    if (std::max(std::abs(r - rep.center_row), std::abs(c - rep.center_col)) != k)
                        continue;
                    const std::size_t i = static_cast<std::size_t>(r) * spec.cols + c;
                    esum += errors[i];
                    rsum += rep.response[i];
                    ++count;
                }
            }
            row.mean_error_pct = esum / count;
            row.mean_response = rsum / count;
            rings.push_back(row);
        }
        return rings;
    };

    if (spec.lambda == 0.0) {
        rep.fit.degenerate_identity = true;
        rep.fit.fitted = rep.response;
        rep.fit.per_node_error_pct.assign(rep.response.size(), 0.0);
        rep.fit.in_support.assign(rep.response.size(), 1);
        rep.rings = ring_rows(rep.fit.per_node_error_pct);
        return rep;
    }
    rep.fit = fit_sigma_grid(rep.response, spec.rows, spec.cols);
    double sum = 0.0;
    for (double v : rep.response) sum += v;
    for (double& v : rep.response) v /= sum;
    rep.rings = ring_rows(rep.fit.per_node_error_pct);
    return rep;
}

std::vector<LambdaSigmaRow> lambda_sigma_curve(std::span<const double> lambdas) {
    std::vector<LambdaSigmaRow> rows;
    rows.reserve(lambdas.size());
    for (double lam : lambdas) {
        LambdaSigmaRow row;
        row.lambda = lam;
        row.sigma_star = sigma_for_lambda(lam);
        row.ratio = lam / std::pow(row.sigma_star, 4.0);
        rows.push_back(row);
    }
    return rows;
}

double sigma_for_lambda(double lambda) {
    if (!(lambda > 0.0)) throw std::domain_error("sigma_for_lambda: lambda must be positive");
    // wide enough that the mirror boundary cannot bias the fit (n >= 20*lambda^(1/4))
    const int n = std::max(201, 2 * static_cast<int>(std::ceil(10.0 * std::pow(lambda, 0.25))) + 1);
    Smoother1DSpec spec{n, lambda, Boundary::mirror};
    return fit_sigma(impulse_response(spec, n / 2)).sigma_star;
}

} // namespace rnsift
