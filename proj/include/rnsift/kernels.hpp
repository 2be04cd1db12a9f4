#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "rnsift/network.hpp"

namespace rnsift {

/// Formula variant. `verbatim` reproduces the source formulas as printed in
/// the original publication chain (for documentation; the verbatim
/// regularization kernel has a growing exponent and diverges). Experiments
/// always use `standard`.
enum class KernelForm { standard, verbatim };

/// Normalized symmetric 1-D Gaussian taps at integer offsets -r..r.
/// Throws std::domain_error unless support_radius >= ceil(3*sigma).
std::vector<double> gaussian_kernel_1d(double sigma, int support_radius);

/// 2-D Gaussian density. standard: exp(-(x^2+y^2)/(2 sigma^2)) / (2 pi sigma^2).
double gaussian_2d(double x, double y, double sigma, KernelForm form = KernelForm::standard);

/// Closed-form impulse response of the second-derivative-penalized smoother
/// (Poggio's regularization kernel): even damped cosine with width ~ lambda^(1/4).
double regularization_kernel(double x, double lambda, KernelForm form = KernelForm::standard);

/// A response no Gaussian can be fitted to (flat, non-positive peak, or the
/// best width pressed against the search bracket).
class UnfittableError : public std::runtime_error {
public:
    explicit UnfittableError(const std::string& what) : std::runtime_error(what) {}
};

struct FitResult {
    double sigma_star = 0.0;
    double amplitude = 0.0;               ///< least-squares scale of the fitted Gaussian
    double mean_relative_error_pct = 0.0; ///< over the fitted support
    double max_relative_error_pct = 0.0;  ///< over the fitted support
    std::vector<double> per_node_error_pct; ///< |response - fit| / response peak, all nodes
    std::vector<unsigned char> in_support;  ///< fitted Gaussian >= 1e-3 of its peak
    std::vector<double> fitted;             ///< fitted Gaussian sampled on the grid
    bool degenerate_identity = false;       ///< lambda = 0 short-circuit, all errors zero
};

/// Fit a sampled Gaussian to a 1-D impulse response (peak located
/// automatically). Errors are percent of the response peak; the width search
/// is golden-section to 1e-3 on [0.1, n/4].
FitResult fit_sigma(std::span<const double> response);

/// Same fit for a row-major 2-D response with a circularly symmetric Gaussian.
FitResult fit_sigma_grid(std::span<const double> response, int rows, int cols);

struct DeviationReport1D {
    int node_count = 0;
    double lambda = 0.0;
    int center = 0;
    std::vector<double> response; ///< sum-normalized impulse response
    FitResult fit;
};

/// Impulse-response deviation experiment of the 1-D network.
DeviationReport1D deviation_report_1d(int node_count = 45, double lambda = 36.0,
                                      Boundary boundary = Boundary::mirror);

struct RingRow {
    int circle_index = 0;       ///< 1-based, starting at the driven node
    int chebyshev_distance = 0; ///< circle_index - 1
    double mean_error_pct = 0.0;
    double mean_response = 0.0;
};

struct DeviationReport2D {
    Smoother2DSpec spec;
    int center_row = 0, center_col = 0;
    std::vector<double> response; ///< sum-normalized, row-major
    FitResult fit;
    std::vector<RingRow> rings; ///< circles 1..9 (distances 0..8)
};

/// Ring-wise deviation experiment of the 2-D network. Requires rows and cols
/// >= 33 so distances up to 8 stay clear of the boundary.
DeviationReport2D deviation_report_2d(const Smoother2DSpec& spec);

struct LambdaSigmaRow {
    double lambda = 0.0;
    double sigma_star = 0.0;
    double ratio = 0.0; ///< lambda / sigma_star^4
};

/// Fitted width per penalty weight on a grid wide enough that the boundary is
/// negligible; the ratio column exposes the lambda ~ sigma^4 law.
std::vector<LambdaSigmaRow> lambda_sigma_curve(std::span<const double> lambdas);

/// Width of the filter equivalent to a given penalty weight (1-D fit on a
/// wide grid). Used to match the ideal-Gaussian backend to the network one.
double sigma_for_lambda(double lambda);

} // namespace rnsift
