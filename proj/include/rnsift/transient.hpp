#pragma once

#include <span>
#include <vector>

#include "rnsift/network.hpp"

namespace rnsift {

enum class Integrator {
    implicit_trapezoidal, ///< fixed-step trapezoidal rule on the node ODE
    exponential_scaling   ///< integrate once at a reference C, rescale settle times linearly
};

struct TransientConfig {
    double stray_capacitance_f = 1e-12; ///< per-node lumped capacitance
    double settle_fraction = 0.01;      ///< settled when max-norm distance <= fraction * |u_inf|_inf
    double max_time_s = 0.0;            ///< 0 = auto
    Integrator integrator = Integrator::implicit_trapezoidal;
    double step_fraction = 0.1;         ///< step = fraction * C/(g0 + 2 g1 + 2|g2|)
    double deep_stop_fraction = 0.2;    ///< keep integrating to this fraction of the threshold
    bool record_states = false;

    void validate() const;
};

struct TransientTrace {
    std::vector<double> times_s;
    std::vector<double> distance;              ///< max-norm to the steady state, per sample
    std::vector<std::vector<double>> states;   ///< only when record_states
    std::vector<double> steady_state;
    std::vector<double> final_state;
    double threshold = 0.0;
    double settle_time_s = 0.0;
    bool settled = false;
};

/// Integrate C du/dt = g0 (v - A u) from u = 0 (power-on) and measure the
/// settling time: the last threshold crossing of the max-norm distance to the
/// steady state. Throws std::runtime_error when the integration diverges
/// (distance growing over 100 consecutive steps).
TransientTrace simulate(const LinearOperator& op, std::span<const double> v,
                        const ConductanceSet& conductances, const TransientConfig& config);

/// Convenience over a 1-D network spec (conductances from its lambda).
TransientTrace simulate(const Smoother1DSpec& spec, std::span<const double> v,
                        const ConductanceSet& conductances, const TransientConfig& config);

struct SettleRow {
    double capacitance_f = 0.0;
    double settle_time_s = 0.0;
    bool simulated = true; ///< false when produced by the linear-rescaling fast path
};

/// One settle time per capacitance (ascending, positive). With
/// Integrator::exponential_scaling only the first value is integrated; the
/// rest scale linearly, which the linear time-rescaling of the ODE makes exact.
std::vector<SettleRow> settle_time_vs_capacitance(const LinearOperator& op,
                                                  std::span<const double> v,
                                                  const ConductanceSet& conductances,
                                                  std::span<const double> c_values,
                                                  TransientConfig config);

} // namespace rnsift
