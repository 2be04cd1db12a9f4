#include "rnsift/power.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rnsift/solver.hpp"

namespace rnsift {

PowerReport steady_power(const LinearOperator& op, std::span<const double> v,
                         std::span<const double> u, const ConductanceSet& g) {
    const int n = op.dimension();
    if (static_cast<int>(v.size()) != n || static_cast<int>(u.size()) != n)
        throw std::domain_error("steady_power: dimension mismatch");
    if (!(g.g0 > 0.0)) throw std::domain_error("steady_power: g0 must be positive");

    // steady-state guard: g0*(v - A u) must vanish
    std::vector<double> Au = op.apply(u);
    double res = 0.0, vmax = 0.0;
    for (int i = 0; i < n; ++i) {
        res = std::max(res, std::abs(v[static_cast<std::size_t>(i)] - Au[static_cast<std::size_t>(i)]));
        vmax = std::max(vmax, std::abs(v[static_cast<std::size_t>(i)]));
    }
    if (res > 1e-8 * std::max(vmax, 1e-300))
        throw std::domain_error("steady_power: u is not the steady state for v");

    PowerReport rep;
    rep.node_count = n;
    for (int i = 0; i < n; ++i) {
        const double di = v[static_cast<std::size_t>(i)] - u[static_cast<std::size_t>(i)];
        rep.source_delivered_w += g.g0 * di * v[static_cast<std::size_t>(i)];
        rep.source_branch_w += g.g0 * di * di;
    }
    // coupling branches from the operator's off-diagonals: conductance -g0*A_ij
    for (int i = 0; i < n; ++i) {
        auto cols = op.row_cols(i);
        auto vals = op.row_values(i);
        for (std::size_t t = 0; t < cols.size(); ++t) {
            const int j = cols[t];
            if (j <= i) continue; // each branch once
            const double gb = -g.g0 * vals[t];
            const double du = u[static_cast<std::size_t>(i)] - u[static_cast<std::size_t>(j)];
            const double p = gb * du * du;
            if (gb >= 0.0)
                rep.positive_branch_w += p;
            else
                rep.negative_branch_w += p;
        }
    }
    rep.total_dissipated_w = rep.source_branch_w + rep.positive_branch_w + rep.negative_branch_w;
    const double denom =
        std::max({std::abs(rep.source_delivered_w), std::abs(rep.total_dissipated_w), 1e-300});
    rep.conservation_rel_error = std::abs(rep.source_delivered_w - rep.total_dissipated_w) / denom;
    if (rep.source_delivered_w == 0.0 && rep.total_dissipated_w == 0.0)
        rep.conservation_rel_error = 0.0;
    rep.per_pixel_w = rep.source_delivered_w / n;
    return rep;
}

PyramidEnergyReport pyramid_energy(const Image& image, std::span<const double> lambdas,
                                   double settle_time_s, double full_scale_volts,
                                   double r1_ohms, int octaves, Stencil2D stencil,
                                   Boundary boundary) {
    if (!(settle_time_s > 0.0))
        throw std::domain_error("pyramid_energy: settle time must be positive");
    if (!(full_scale_volts > 0.0))
        throw std::domain_error("pyramid_energy: full-scale voltage must be positive");
    if (lambdas.empty()) throw std::domain_error("pyramid_energy: empty lambda list");

    PyramidEnergyReport rep;
    rep.settle_time_s = settle_time_s;
    rep.full_scale_volts = full_scale_volts;
    rep.r1_ohms = r1_ohms;

    for (int o = 0; o < octaves; ++o) {
        const Image level = image.decimate(1 << o);
        rep.pixels_per_lambda += static_cast<long>(level.size());
    }

    SolveConfig cfg;
    cfg.method = SolveMethod::iterative_cg;
    cfg.tolerance = 1e-12; // conservation is checked at 1e-9; leave headroom

    for (double lam : lambdas) {
        const ConductanceSet g = conductances_from_lambda(lam, r1_ohms);
        for (int o = 0; o < octaves; ++o) {
            const Image level = image.decimate(1 << o);
            Smoother2DSpec spec{level.height(), level.width(), lam, stencil, boundary};
            const LinearOperator op = assemble_2d(spec);
            std::vector<double> v(level.size());
            for (std::size_t i = 0; i < v.size(); ++i)
                v[i] = level.data()[i] / 255.0 * full_scale_volts;
            const SolveResult sol = solve(op, v, cfg);
            PyramidLevelPower lvl;
            lvl.lambda = lam;
            lvl.octave = o;
            lvl.pixels = static_cast<int>(level.size());
            lvl.report = steady_power(op, v, sol.u, g);
            lvl.power_w = lvl.report.source_delivered_w;
            lvl.energy_j = lvl.power_w * settle_time_s;
            rep.total_energy_j += lvl.energy_j;
            rep.levels.push_back(std::move(lvl));
        }
    }
    return rep;
}

} // namespace rnsift
