#include "rnsift/solver.hpp"

#include <algorithm>
#include <cmath>

#include "banded_cholesky.hpp"

namespace rnsift {

namespace {

double norm2(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

} // namespace

void SolveConfig::validate(int dimension) const {
    if (!(tolerance > 0.0) || tolerance > 1e-3)
        throw std::domain_error("SolveConfig: tolerance must lie in (0, 1e-3]");
    if (method == SolveMethod::iterative_cg && max_iterations != 0 &&
        max_iterations < dimension)
        throw std::domain_error("SolveConfig: iterative max_iterations must be >= dimension");
}

SolveConfig default_solve_config(const LinearOperator& op) {
    SolveConfig c;
    c.method = op.bandwidth() <= 8 ? SolveMethod::direct_banded : SolveMethod::iterative_cg;
    return c;
}

SolveResult solve(const LinearOperator& op, std::span<const double> v, SolveConfig config) {
    const int n = op.dimension();
    if (static_cast<int>(v.size()) != n)
        throw std::domain_error("solve: dimension mismatch");
    config.validate(n);
    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&t0] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    SolveResult res;
    res.report.method = config.method;
    const double vnorm = norm2(v);
    if (vnorm == 0.0) {
        res.u.assign(static_cast<std::size_t>(n), 0.0);
        res.report.wall_seconds = elapsed();
        return res;
    }

    if (config.method == SolveMethod::direct_banded) {
        detail::BandedCholesky chol(op);
        if (!chol.positive_definite())
            throw SolveFailure("solve: operator is not positive definite",
                               std::vector<double>(v.begin(), v.end()), res.report);
        res.u.assign(v.begin(), v.end());
        chol.solve_in_place(res.u);
        std::vector<double> r = op.apply(res.u);
        for (int i = 0; i < n; ++i) r[static_cast<std::size_t>(i)] = v[static_cast<std::size_t>(i)] - r[static_cast<std::size_t>(i)];
        res.report.relative_residual = norm2(r) / vnorm;
        res.report.wall_seconds = elapsed();
        if (res.report.relative_residual > config.tolerance)
            throw SolveFailure("solve: direct factorization left residual above tolerance",
                               std::move(res.u), res.report);
        return res;
    }

    // conjugate gradient, started from v (the filter contracts toward smooth inputs).
    // Finite termination in n steps only holds in exact arithmetic; small stiff
    // systems need the cushion.
    const int max_it = config.max_iterations > 0 ? config.max_iterations : std::max(n, 1000);
    std::vector<double> u(v.begin(), v.end());
    std::vector<double> r = op.apply(u);
    for (int i = 0; i < n; ++i) r[static_cast<std::size_t>(i)] = v[static_cast<std::size_t>(i)] - r[static_cast<std::size_t>(i)];
    std::vector<double> p = r;
    std::vector<double> Ap(static_cast<std::size_t>(n));
    double rr = dot(r, r);
    int it = 0;
    while (std::sqrt(rr) / vnorm > config.tolerance && it < max_it) {
        op.apply(p, Ap);
        const double pAp = dot(p, Ap);
        if (!(pAp > 0.0)) {
            res.report.iterations = it;
            res.report.relative_residual = std::sqrt(rr) / vnorm;
            res.report.wall_seconds = elapsed();
            throw SolveFailure("solve: conjugate gradient met a nonpositive curvature direction",
                               std::move(u), res.report);
        }
        const double alpha = rr / pAp;
        for (int i = 0; i < n; ++i) {
            u[static_cast<std::size_t>(i)] += alpha * p[static_cast<std::size_t>(i)];
            r[static_cast<std::size_t>(i)] -= alpha * Ap[static_cast<std::size_t>(i)];
        }
        const double rr_new = dot(r, r);
        const double beta = rr_new / rr;
        rr = rr_new;
        for (int i = 0; i < n; ++i)
            p[static_cast<std::size_t>(i)] = r[static_cast<std::size_t>(i)] + beta * p[static_cast<std::size_t>(i)];
        ++it;
    }
    res.report.iterations = it;
    res.report.relative_residual = std::sqrt(rr) / vnorm;
    res.report.wall_seconds = elapsed();
    if (res.report.relative_residual > config.tolerance)
        throw SolveFailure("solve: conjugate gradient did not converge in " +
                               std::to_string(max_it) + " iterations",
                           std::move(u), res.report);
    res.u = std::move(u);
    return res;
}

SolveResult solve(const LinearOperator& op, std::span<const double> v) {
    return solve(op, v, default_solve_config(op));
}

std::vector<double> impulse_response(const Smoother1DSpec& spec, int center) {
    spec.validate();
    if (center < 0 || center >= spec.node_count)
        throw std::domain_error("impulse_response: center out of range");
    if (spec.lambda == 0.0) {
        std::vector<double> u(static_cast<std::size_t>(spec.node_count), 0.0);
        u[static_cast<std::size_t>(center)] = 1.0;
        return u;
    }
    LinearOperator op = assemble_1d(spec);
    std::vector<double> v(static_cast<std::size_t>(spec.node_count), 0.0);
    v[static_cast<std::size_t>(center)] = 1.0;
    return solve(op, v).u;
}

std::vector<double> impulse_response(const Smoother2DSpec& spec, int center_row, int center_col) {
    spec.validate();
    if (center_row < 0 || center_row >= spec.rows || center_col < 0 || center_col >= spec.cols)
        throw std::domain_error("impulse_response: center out of range");
    const std::size_t n = static_cast<std::size_t>(spec.rows) * spec.cols;
    std::vector<double> v(n, 0.0);
    v[static_cast<std::size_t>(center_row) * spec.cols + center_col] = 1.0;
    if (spec.lambda == 0.0) return v;
    LinearOperator op = assemble_2d(spec);
    return solve(op, v).u;
}

Image filter_image(const Image& image, const Smoother2DSpec& spec, const SolveConfig& config) {
    spec.validate();
    if (image.width() != spec.cols || image.height() != spec.rows)
        throw std::domain_error("filter_image: image dimensions do not match the spec");
    if (!image.all_finite_nonnegative())
        throw std::domain_error("filter_image: pixels must be finite and nonnegative");
    if (spec.lambda == 0.0) return image;
    LinearOperator op = assemble_2d(spec);
    SolveResult r = solve(op, image.pixels(), config);
    return Image(image.width(), image.height(), std::move(r.u));
}

Image filter_image(const Image& image, const Smoother2DSpec& spec) {
    SolveConfig config;
    config.method = SolveMethod::iterative_cg; // 2-D band is O(cols) wide
    return filter_image(image, spec, config);
}

double discrete_energy(const LinearOperator& op, std::span<const double> u,
                       std::span<const double> v) {
    const int n = op.dimension();
    if (static_cast<int>(u.size()) != n || static_cast<int>(v.size()) != n)
        throw std::domain_error("discrete_energy: dimension mismatch");
    double data = 0.0;
    for (int i = 0; i < n; ++i) {
        const double d = u[static_cast<std::size_t>(i)] - v[static_cast<std::size_t>(i)];
        data += d * d;
    }
    std::vector<double> Au = op.apply(u);
    double penalty = 0.0;
    for (int i = 0; i < n; ++i)
        penalty += u[static_cast<std::size_t>(i)] * (Au[static_cast<std::size_t>(i)] - u[static_cast<std::size_t>(i)]);
    return data + penalty;
}

double discrete_energy(std::span<const double> u, std::span<const double> v, double lambda,
                       Boundary boundary) {
    Smoother1DSpec spec{static_cast<int>(u.size()), lambda, boundary};
    return discrete_energy(assemble_1d(spec), u, v);
}

double discrete_energy(std::span<const double> u, std::span<const double> v,
                       const Smoother2DSpec& spec) {
    return discrete_energy(assemble_2d(spec), u, v);
}

} // namespace rnsift
