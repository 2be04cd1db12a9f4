#include "rnsift/transient.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "banded_cholesky.hpp"
#include "rnsift/solver.hpp"

namespace rnsift {

void TransientConfig::validate() const {
    if (!(stray_capacitance_f > 0.0))
        throw std::domain_error("TransientConfig: stray capacitance must be positive");
    if (!(settle_fraction > 0.0) || settle_fraction > 0.1)
        throw std::domain_error("TransientConfig: settle_fraction must lie in (0, 0.1]");
    if (max_time_s < 0.0)
        throw std::domain_error("TransientConfig: max_time must be nonnegative");
    if (!(step_fraction > 0.0) || step_fraction > 0.5)
        throw std::domain_error("TransientConfig: step_fraction must lie in (0, 0.5]");
    if (!(deep_stop_fraction > 0.0) || deep_stop_fraction > 1.0)
        throw std::domain_error("TransientConfig: deep_stop_fraction must lie in (0, 1]");
}

namespace {

double max_abs(std::span<const double> x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

// One trapezoidal step solver for (I + alpha*A) x = rhs. Banded factorization
// where the band is thin, matrix-free CG otherwise (2-D grids); the step
// matrix is close to identity, so CG needs only a handful of iterations.
class StepSolver {
public:
    StepSolver(const LinearOperator& A, double alpha) : A_(A), alpha_(alpha) {
        if (A.bandwidth() <= 8) {
            chol_.emplace(A, 1.0, alpha);
            if (!chol_->positive_definite())
                throw std::runtime_error("transient: step matrix is not positive definite");
        }
    }

    void solve(std::vector<double>& x, const std::vector<double>& rhs) {
        if (chol_) {
            x = rhs;
            chol_->solve_in_place(x);
            return;
        }
        const int n = A_.dimension();
        auto mult = [&](const std::vector<double>& in, std::vector<double>& out) {
            A_.apply(in, out);
            for (int i = 0; i < n; ++i)
                out[static_cast<std::size_t>(i)] =
                    in[static_cast<std::size_t>(i)] + alpha_ * out[static_cast<std::size_t>(i)];
        };
        std::vector<double>& u = x; // warm start from the previous state
        std::vector<double> r(static_cast<std::size_t>(n)), p, Ap(static_cast<std::size_t>(n));
        mult(u, r);
        double bnorm2 = 0.0;
        for (int i = 0; i < n; ++i) {
            r[static_cast<std::size_t>(i)] = rhs[static_cast<std::size_t>(i)] - r[static_cast<std::size_t>(i)];
            bnorm2 += rhs[static_cast<std::size_t>(i)] * rhs[static_cast<std::size_t>(i)];
        }
        p = r;
        double rr = 0.0;
        for (double v : r) rr += v * v;
        const double stop2 = 1e-24 * std::max(bnorm2, 1e-300);
        int it = 0;
        while (rr > stop2 && it < n) {
            mult(p, Ap);
            double pAp = 0.0;
            for (int i = 0; i < n; ++i) pAp += p[static_cast<std::size_t>(i)] * Ap[static_cast<std::size_t>(i)];
            const double a = rr / pAp;
            for (int i = 0; i < n; ++i) {
                u[static_cast<std::size_t>(i)] += a * p[static_cast<std::size_t>(i)];
                r[static_cast<std::size_t>(i)] -= a * Ap[static_cast<std::size_t>(i)];
            }
            double rr2 = 0.0;
            for (double v : r) rr2 += v * v;
            const double beta = rr2 / rr;
            rr = rr2;
            for (int i = 0; i < n; ++i)
                p[static_cast<std::size_t>(i)] = r[static_cast<std::size_t>(i)] + beta * p[static_cast<std::size_t>(i)];
            ++it;
        }
    }

private:
    const LinearOperator& A_;
    double alpha_;
    std::optional<detail::BandedCholesky> chol_;
};

} // namespace

TransientTrace simulate(const LinearOperator& op, std::span<const double> v,
                        const ConductanceSet& g, const TransientConfig& config) {
    config.validate();
    const int n = op.dimension();
    if (static_cast<int>(v.size()) != n)
        throw std::domain_error("simulate: dimension mismatch");
    if (!(g.g0 > 0.0)) throw std::domain_error("simulate: source conductance must be positive");

    const double C = config.stray_capacitance_f;

    TransientTrace trace;
    trace.steady_state = solve(op, v).u; // also the SPD sanity gate before integrating
    const double settle_norm = max_abs(trace.steady_state);
    trace.threshold = config.settle_fraction * settle_norm;

    if (settle_norm == 0.0) {
        trace.final_state.assign(static_cast<std::size_t>(n), 0.0);
        trace.settled = true;
        trace.settle_time_s = 0.0;
        trace.times_s = {0.0};
        trace.distance = {0.0};
        return trace;
    }

    // alpha is capacitance-free, so the discrete trajectory is identical for
    // every C and settle times rescale exactly linearly.
    const double g_total = g.g0 + 2.0 * g.g1 + 2.0 * std::abs(g.g2);
    const double alpha = 0.5 * config.step_fraction * g.g0 / g_total;
    const double h = 2.0 * alpha * C / g.g0;
    const double max_time =
        config.max_time_s > 0.0
            ? config.max_time_s
            : 50.0 * (C / g.g0) * std::max(1.0, std::log(1.0 / config.settle_fraction));

    StepSolver step(op, alpha);
    std::vector<double> u(static_cast<std::size_t>(n), 0.0); // power-on from reset
    std::vector<double> rhs(static_cast<std::size_t>(n)), Au(static_cast<std::size_t>(n));

    auto distance_to_steady = [&](const std::vector<double>& x) {
        double m = 0.0;
        for (int i = 0; i < n; ++i)
            m = std::max(m, std::abs(x[static_cast<std::size_t>(i)] -
                                     trace.steady_state[static_cast<std::size_t>(i)]));
        return m;
    };

    double t = 0.0;
    double d = distance_to_steady(u);
    trace.times_s.push_back(t);
    trace.distance.push_back(d);
    if (config.record_states) trace.states.push_back(u);

    int growing = 0;
    const double deep = config.deep_stop_fraction * trace.threshold;
    while (t < max_time && d > deep) {
        // (I + alpha A) u_next = (I - alpha A) u + 2 alpha v
        op.apply(u, Au);
        for (int i = 0; i < n; ++i)
            rhs[static_cast<std::size_t>(i)] = u[static_cast<std::size_t>(i)] -
                                               alpha * Au[static_cast<std::size_t>(i)] +
                                               2.0 * alpha * v[static_cast<std::size_t>(i)];
        step.solve(u, rhs);
        t += h;
        const double d_new = distance_to_steady(u);
        growing = d_new > d ? growing + 1 : 0;
        if (growing >= 100)
            throw std::runtime_error(
                "simulate: distance to steady state grew over 100 consecutive steps "
                "(integrator instability)");
        d = d_new;
        trace.times_s.push_back(t);
        trace.distance.push_back(d);
        if (config.record_states) trace.states.push_back(u);
    }

    trace.final_state = std::move(u);
    trace.settled = d <= trace.threshold;
    if (!trace.settled) {
        trace.settle_time_s = max_time;
        return trace;
    }
    // last down-crossing of the threshold, linearly interpolated
    trace.settle_time_s = 0.0;
    for (std::size_t k = trace.distance.size(); k-- > 1;) {
        if (trace.distance[k - 1] > trace.threshold) {
            const double d0 = trace.distance[k - 1], d1 = trace.distance[k];
            const double frac = d0 > d1 ? (d0 - trace.threshold) / (d0 - d1) : 1.0;
            trace.settle_time_s =
                trace.times_s[k - 1] + frac * (trace.times_s[k] - trace.times_s[k - 1]);
            break;
        }
    }
    return trace;
}

TransientTrace simulate(const Smoother1DSpec& spec, std::span<const double> v,
                        const ConductanceSet& g, const TransientConfig& config) {
    spec.validate();
    if (!(spec.lambda > 0.0))
        throw std::domain_error("simulate: network spec needs lambda > 0");
    return simulate(assemble_1d(spec), v, g, config);
}

std::vector<SettleRow> settle_time_vs_capacitance(const LinearOperator& op,
                                                  std::span<const double> v,
                                                  const ConductanceSet& g,
                                                  std::span<const double> c_values,
                                                  TransientConfig config) {
    if (c_values.empty())
        throw std::domain_error("settle_time_vs_capacitance: need at least one capacitance");
    for (std::size_t i = 0; i < c_values.size(); ++i) {
        if (!(c_values[i] > 0.0))
            throw std::domain_error("settle_time_vs_capacitance: capacitances must be positive");
        if (i > 0 && c_values[i] <= c_values[i - 1])
            throw std::domain_error("settle_time_vs_capacitance: capacitances must ascend");
    }
    std::vector<SettleRow> rows;
    rows.reserve(c_values.size());
    if (config.integrator == Integrator::exponential_scaling) {
        config.stray_capacitance_f = c_values[0];
        const TransientTrace ref = simulate(op, v, g, config);
        if (!ref.settled)
            throw std::runtime_error("settle_time_vs_capacitance: reference run did not settle");
        for (std::size_t i = 0; i < c_values.size(); ++i)
            rows.push_back({c_values[i], ref.settle_time_s * (c_values[i] / c_values[0]), i == 0});
        return rows;
    }
    for (double c : c_values) {
        config.stray_capacitance_f = c;
        const TransientTrace tr = simulate(op, v, g, config);
        if (!tr.settled)
            throw std::runtime_error("settle_time_vs_capacitance: run did not settle within max_time");
        rows.push_back({c, tr.settle_time_s, true});
    }
    return rows;
}

} // namespace rnsift
