#pragma once

#include <chrono>
#include <span>
#include <stdexcept>
#include <vector>

#include "rnsift/image.hpp"
#include "rnsift/network.hpp"

namespace rnsift {

enum class SolveMethod { direct_banded, iterative_cg };

struct SolveConfig {
    SolveMethod method = SolveMethod::direct_banded;
    double tolerance = 1e-9; ///< relative residual, must lie in (0, 1e-3]
    int max_iterations = 0;  ///< 0 = auto (the system dimension)

    void validate(int dimension) const;
};

struct SolveReport {
    int iterations = 0;
    double relative_residual = 0.0;
    double wall_seconds = 0.0;
    SolveMethod method = SolveMethod::direct_banded;
};

/// Non-convergence carries the best iterate so callers can inspect it.
class SolveFailure : public std::runtime_error {
public:
    SolveFailure(std::string what, std::vector<double> best, SolveReport rep)
        : std::runtime_error(std::move(what)), best_iterate(std::move(best)), report(rep) {}
    std::vector<double> best_iterate;
    SolveReport report;
};

struct SolveResult {
    std::vector<double> u;
    SolveReport report;
};

/// Pick direct banded factorization when the band is thin (1-D mirror or
/// truncate), conjugate gradient otherwise (2-D grids, periodic wrap).
SolveConfig default_solve_config(const LinearOperator& op);

/// Steady-state node voltages: the u with A*u = v, i.e. the minimizer of the
/// discrete smoothing energy. Throws SolveFailure on non-convergence.
SolveResult solve(const LinearOperator& op, std::span<const double> v, SolveConfig config);
SolveResult solve(const LinearOperator& op, std::span<const double> v);

/// Network response to a unit impulse at `center`.
std::vector<double> impulse_response(const Smoother1DSpec& spec, int center);
std::vector<double> impulse_response(const Smoother2DSpec& spec, int center_row, int center_col);

/// Whole-image smoothing through the 2-D network.
Image filter_image(const Image& image, const Smoother2DSpec& spec, const SolveConfig& config);
Image filter_image(const Image& image, const Smoother2DSpec& spec);

/// Discrete smoothing energy |u - v|^2 + u^T (A - I) u; A's penalty part is
/// exactly lambda * |L u|^2 for mirror/periodic assembly, so solve() is its
/// unique minimizer.
double discrete_energy(const LinearOperator& op, std::span<const double> u,
                       std::span<const double> v);

/// 1-D convenience: energy of the default mirror-boundary smoother.
double discrete_energy(std::span<const double> u, std::span<const double> v, double lambda,
                       Boundary boundary = Boundary::mirror);

/// 2-D convenience over a grid spec.
double discrete_energy(std::span<const double> u, std::span<const double> v,
                       const Smoother2DSpec& spec);

} // namespace rnsift
