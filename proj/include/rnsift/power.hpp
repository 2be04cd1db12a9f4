#pragma once

#include <span>
#include <vector>

#include "rnsift/image.hpp"
#include "rnsift/network.hpp"

namespace rnsift {

/// Steady-state power bookkeeping of one network solve. Branch dissipation is
/// g*(dV)^2 per branch; branches realized by the active elements carry
/// negative conductance and show up as a signed delivery line item.
struct PowerReport {
    double source_delivered_w = 0.0;   ///< sum over nodes of g0*(v - u)*v
    double source_branch_w = 0.0;      ///< dissipated in the source resistors
    double positive_branch_w = 0.0;    ///< dissipated in positive coupling resistors
    double negative_branch_w = 0.0;    ///< signed, <= 0: power delivered by active elements
    double total_dissipated_w = 0.0;   ///< source + positive + negative branches
    double conservation_rel_error = 0.0;
    double per_pixel_w = 0.0;          ///< source-delivered power per node
    int node_count = 0;
};

/// Power accounting for steady state u of source vector v. u must satisfy the
/// node equations (relative residual <= 1e-8), otherwise std::domain_error.
PowerReport steady_power(const LinearOperator& op, std::span<const double> v,
                         std::span<const double> u, const ConductanceSet& conductances);

struct PyramidLevelPower {
    double lambda = 0.0;
    int octave = 0;
    int pixels = 0;
    double power_w = 0.0;
    double energy_j = 0.0;
    PowerReport report;
};

struct PyramidEnergyReport {
    std::vector<PyramidLevelPower> levels;
    long pixels_per_lambda = 0;   ///< 86016 for a 256x256 input, 3 octaves
    double settle_time_s = 0.0;
    double full_scale_volts = 0.0;
    double r1_ohms = 0.0;
    double total_energy_j = 0.0;
    /// Published estimate for this pyramid configuration, for side-by-side reporting.
    static constexpr double reference_energy_j = 669.6e-12;
    double ratio_to_reference() const { return total_energy_j / reference_energy_j; }
};

/// Energy of computing the full 3-octave pyramid: per (lambda, octave) level,
/// steady source power times the settle time. Pixel luminance [0,255] maps
/// linearly to [0, full_scale_volts].
PyramidEnergyReport pyramid_energy(const Image& image, std::span<const double> lambdas,
                                   double settle_time_s, double full_scale_volts = 0.255,
                                   double r1_ohms = 250.0, int octaves = 3,
                                   Stencil2D stencil = Stencil2D::diagonal_augmented,
                                   Boundary boundary = Boundary::mirror);

} // namespace rnsift
