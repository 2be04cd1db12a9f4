#include "rnsift/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rnsift {

const char* to_string(Boundary b) {
    switch (b) {
        case Boundary::mirror: return "mirror";
        case Boundary::periodic: return "periodic";
        case Boundary::truncate: return "truncate";
    }
    return "?";
}

const char* to_string(Stencil2D s) {
    return s == Stencil2D::axis_only ? "axis_only" : "diagonal_augmented";
}

void Smoother1DSpec::validate() const {
    if (node_count < 5)
        throw std::domain_error("Smoother1DSpec: node_count must be >= 5 (5-point stencil)");
    if (!(lambda >= 0.0))
        throw std::domain_error("Smoother1DSpec: lambda must be >= 0");
}

void Smoother2DSpec::validate() const {
    if (rows < 5 || cols < 5)
        throw std::domain_error("Smoother2DSpec: rows and cols must be >= 5");
    if (!(lambda >= 0.0))
        throw std::domain_error("Smoother2DSpec: lambda must be >= 0");
}

ConductanceSet conductances_from_lambda(double lambda, double r1_ohms) {
    if (!(r1_ohms > 0.0))
        throw std::domain_error("conductances_from_lambda: r1 must be positive");
    if (lambda < 0.0)
        throw std::domain_error("conductances_from_lambda: lambda must be >= 0");
    if (lambda == 0.0)
        throw IdentityFilterSignal();
    ConductanceSet g;
    g.r1_ohms = r1_ohms;
    g.g1 = 1.0 / r1_ohms;
    g.g0 = g.g1 / lambda;   // r0 = lambda * r1
    g.g2 = -g.g1 / 4.0;     // r2 = -4 * r1
    return g;
}

namespace {

// Stencil tap on a grid: (row offset, col offset, integer weight).
struct Tap {
    int dr, dc;
    double w;
};

// Integer-weight Laplacian stencils. Keeping weights integral makes row sums
// of L^T L exactly zero in floating point; the fractional 9-point scale is
// applied once at the end.
std::vector<Tap> laplacian_taps_1d() {
    return {{0, -1, 1.0}, {0, 0, -2.0}, {0, 1, 1.0}};
}

std::vector<Tap> laplacian_taps_2d(Stencil2D stencil) {
    if (stencil == Stencil2D::axis_only)
        return {{0, 0, -4.0}, {0, 1, 1.0}, {0, -1, 1.0}, {1, 0, 1.0}, {-1, 0, 1.0}};
    return {{0, 0, -20.0}, {0, 1, 4.0}, {0, -1, 4.0}, {1, 0, 4.0}, {-1, 0, 4.0},
            {1, 1, 1.0},   {1, -1, 1.0}, {-1, 1, 1.0}, {-1, -1, 1.0}};
}

double penalty_scale(Stencil2D stencil) {
    return stencil == Stencil2D::axis_only ? 1.0 : 1.0 / 36.0;
}

int fold_index(int i, int n, Boundary b) {
    while (i < 0 || i >= n) {
        if (b == Boundary::periodic) {
            i = ((i % n) + n) % n;
        } else { // mirror, whole-sample reflection
            if (i < 0) i = -i;
            if (i >= n) i = 2 * n - 2 - i;
        }
    }
    return i;
}

struct Csr {
    std::vector<int> row_ptr, col;
    std::vector<double> val;
    int dim = 0;
};

// Rows built as (col, weight) lists with possible duplicates; merged sorted.
Csr to_csr(int dim, std::vector<std::vector<std::pair<int, double>>>& rows) {
    Csr m;
    m.dim = dim;
    m.row_ptr.assign(static_cast<std::size_t>(dim) + 1, 0);
    std::size_t nnz = 0;
    for (auto& r : rows) {
        std::sort(r.begin(), r.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        std::size_t out = 0;
        for (std::size_t i = 0; i < r.size();) {
            int c = r[i].first;
            double w = 0.0;
            while (i < r.size() && r[i].first == c) w += r[i++].second;
            r[out++] = {c, w};
        }
        r.resize(out);
        nnz += out;
    }
    m.col.reserve(nnz);
    m.val.reserve(nnz);
    for (int i = 0; i < dim; ++i) {
        for (auto& [c, w] : rows[static_cast<std::size_t>(i)]) {
            m.col.push_back(c);
            m.val.push_back(w);
        }
        m.row_ptr[static_cast<std::size_t>(i) + 1] = static_cast<int>(m.col.size());
    }
    return m;
}

// Fold the Laplacian taps onto the grid; returns L in CSR form.
Csr build_laplacian(int grid_rows, int grid_cols, const std::vector<Tap>& taps, Boundary b) {
    const int dim = grid_rows * grid_cols;
    std::vector<std::vector<std::pair<int, double>>> rows(static_cast<std::size_t>(dim));
    for (int r = 0; r < grid_rows; ++r) {
        for (int c = 0; c < grid_cols; ++c) {
            auto& row = rows[static_cast<std::size_t>(r) * grid_cols + c];
            row.reserve(taps.size());
            for (const Tap& t : taps) {
                int rr = fold_index(r + t.dr, grid_rows, b);
                int cc = fold_index(c + t.dc, grid_cols, b);
                row.emplace_back(rr * grid_cols + cc, t.w);
            }
        }
    }
    return to_csr(dim, rows);
}

// B = L^T L via a transpose pass and a scatter-accumulate row kernel.
Csr square_laplacian(const Csr& L) {
    const int n = L.dim;
    // transpose
    Csr T;
    T.dim = n;
    T.row_ptr.assign(static_cast<std::size_t>(n) + 1, 0);
    for (int c : L.col) T.row_ptr[static_cast<std::size_t>(c) + 1]++;
    for (int i = 0; i < n; ++i)
        T.row_ptr[static_cast<std::size_t>(i) + 1] += T.row_ptr[static_cast<std::size_t>(i)];
    T.col.resize(L.col.size());
    T.val.resize(L.val.size());
    {
        std::vector<int> next(T.row_ptr.begin(), T.row_ptr.end() - 1);
        for (int i = 0; i < n; ++i) {
            for (int k = L.row_ptr[static_cast<std::size_t>(i)];
                 k < L.row_ptr[static_cast<std::size_t>(i) + 1]; ++k) {
                int c = L.col[static_cast<std::size_t>(k)];
                int pos = next[static_cast<std::size_t>(c)]++;
                T.col[static_cast<std::size_t>(pos)] = i;
                T.val[static_cast<std::size_t>(pos)] = L.val[static_cast<std::size_t>(k)];
            }
        }
    }
    // product rows
    Csr B;
    B.dim = n;
    B.row_ptr.assign(static_cast<std::size_t>(n) + 1, 0);
    std::vector<double> acc(static_cast<std::size_t>(n), 0.0);
    std::vector<int> touched;
    touched.reserve(32);
    for (int i = 0; i < n; ++i) {
        touched.clear();
        for (int t = T.row_ptr[static_cast<std::size_t>(i)];
             t < T.row_ptr[static_cast<std::size_t>(i) + 1]; ++t) {
            const int k = T.col[static_cast<std::size_t>(t)];
            const double wki = T.val[static_cast<std::size_t>(t)];
            for (int s = L.row_ptr[static_cast<std::size_t>(k)];
                 s < L.row_ptr[static_cast<std::size_t>(k) + 1]; ++s) {
                const int j = L.col[static_cast<std::size_t>(s)];
                if (acc[static_cast<std::size_t>(j)] == 0.0) touched.push_back(j);
                acc[static_cast<std::size_t>(j)] += wki * L.val[static_cast<std::size_t>(s)];
            }
        }
        std::sort(touched.begin(), touched.end());
        for (int j : touched) {
            double w = acc[static_cast<std::size_t>(j)];
            acc[static_cast<std::size_t>(j)] = 0.0;
            if (w != 0.0) {
                B.col.push_back(j);
                B.val.push_back(w);
            }
        }
        B.row_ptr[static_cast<std::size_t>(i) + 1] = static_cast<int>(B.col.size());
    }
    return B;
}

// Autocorrelation of the stencil: the canonical interior row of L^T L,
// used directly by the truncate policy.
std::vector<Tap> stencil_autocorrelation(const std::vector<Tap>& taps) {
    std::vector<Tap> out;
    for (const Tap& a : taps) {
        for (const Tap& b : taps) {
            int dr = b.dr - a.dr, dc = b.dc - a.dc;
            double w = a.w * b.w;
            bool merged = false;
            for (Tap& t : out) {
                if (t.dr == dr && t.dc == dc) {
                    t.w += w;
                    merged = true;
                    break;
                }
            }
            if (!merged) out.push_back({dr, dc, w});
        }
    }
    return out;
}

// CSR of A = I + lambda * scale * B for the grid, with boundary folding.
Csr assemble_csr(int grid_rows, int grid_cols, double lambda, Boundary boundary,
                 const std::vector<Tap>& lap_taps, double scale) {
    const int dim = grid_rows * grid_cols;
    const double f = lambda * scale;
    if (f == 0.0) {
        Csr I;
        I.dim = dim;
        I.row_ptr.resize(static_cast<std::size_t>(dim) + 1);
        std::iota(I.row_ptr.begin(), I.row_ptr.end(), 0);
        I.col.resize(static_cast<std::size_t>(dim));
        std::iota(I.col.begin(), I.col.end(), 0);
        I.val.assign(static_cast<std::size_t>(dim), 1.0);
        return I;
    }

    Csr B;
    if (boundary == Boundary::truncate) {
        const auto canon = stencil_autocorrelation(lap_taps);
        std::vector<std::vector<std::pair<int, double>>> rows(static_cast<std::size_t>(dim));
        for (int r = 0; r < grid_rows; ++r) {
            for (int c = 0; c < grid_cols; ++c) {
                auto& row = rows[static_cast<std::size_t>(r) * grid_cols + c];
                double kept_offdiag = 0.0;
                for (const Tap& t : canon) {
                    if (t.dr == 0 && t.dc == 0) continue;
                    int rr = r + t.dr, cc = c + t.dc;
                    if (rr < 0 || rr >= grid_rows || cc < 0 || cc >= grid_cols) continue;
                    row.emplace_back(rr * grid_cols + cc, t.w);
                    kept_offdiag += t.w;
                }
                // diagonal re-centered so the row of B sums to zero
                row.emplace_back(r * grid_cols + c, -kept_offdiag);
            }
        }
        B = to_csr(dim, rows);
    } else {
        B = square_laplacian(build_laplacian(grid_rows, grid_cols, lap_taps, boundary));
    }

    for (int i = 0; i < dim; ++i) {
        bool has_diag = false;
        for (int k = B.row_ptr[static_cast<std::size_t>(i)];
             k < B.row_ptr[static_cast<std::size_t>(i) + 1]; ++k) {
            double w = f * B.val[static_cast<std::size_t>(k)];
            if (B.col[static_cast<std::size_t>(k)] == i) {
                w += 1.0;
                has_diag = true;
            }
            B.val[static_cast<std::size_t>(k)] = w;
        }
        if (!has_diag)
            throw std::logic_error("operator assembly: missing diagonal entry");
    }
    return B;
}

} // namespace

LinearOperator assemble_1d(const Smoother1DSpec& spec) {
    spec.validate();
    Csr m = assemble_csr(1, spec.node_count, spec.lambda, spec.boundary, laplacian_taps_1d(), 1.0);
    LinearOperator A;
    A.dim_ = m.dim;
    A.lambda_ = spec.lambda;
    A.boundary_ = spec.boundary;
    A.grid_rows_ = 1;
    A.grid_cols_ = spec.node_count;
    A.row_ptr_ = std::move(m.row_ptr);
    A.col_ = std::move(m.col);
    A.val_ = std::move(m.val);
    return A;
}

LinearOperator assemble_2d(const Smoother2DSpec& spec) {
    spec.validate();
    Csr m = assemble_csr(spec.rows, spec.cols, spec.lambda, spec.boundary,
                         laplacian_taps_2d(spec.stencil), penalty_scale(spec.stencil));
    LinearOperator A;
    A.dim_ = m.dim;
    A.lambda_ = spec.lambda;
    A.boundary_ = spec.boundary;
    A.grid_rows_ = spec.rows;
    A.grid_cols_ = spec.cols;
    A.row_ptr_ = std::move(m.row_ptr);
    A.col_ = std::move(m.col);
    A.val_ = std::move(m.val);
    return A;
}

void LinearOperator::apply(std::span<const double> x, std::span<double> y) const {
    if (static_cast<int>(x.size()) != dim_ || static_cast<int>(y.size()) != dim_)
        throw std::domain_error("LinearOperator::apply: dimension mismatch");
    for (int i = 0; i < dim_; ++i) {
        double s = 0.0;
        for (int k = row_ptr_[static_cast<std::size_t>(i)];
             k < row_ptr_[static_cast<std::size_t>(i) + 1]; ++k)
            s += val_[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(col_[static_cast<std::size_t>(k)])];
        y[static_cast<std::size_t>(i)] = s;
    }
}

std::vector<double> LinearOperator::apply(std::span<const double> x) const {
    std::vector<double> y(static_cast<std::size_t>(dim_));
    apply(x, y);
    return y;
}

double LinearOperator::coefficient(int row, int col) const {
    for (int k = row_ptr_[static_cast<std::size_t>(row)];
         k < row_ptr_[static_cast<std::size_t>(row) + 1]; ++k)
        if (col_[static_cast<std::size_t>(k)] == col) return val_[static_cast<std::size_t>(k)];
    return 0.0;
}

double LinearOperator::row_sum(int row) const {
    double s = 0.0;
    for (int k = row_ptr_[static_cast<std::size_t>(row)];
         k < row_ptr_[static_cast<std::size_t>(row) + 1]; ++k)
        s += val_[static_cast<std::size_t>(k)];
    return s;
}

std::span<const int> LinearOperator::row_cols(int row) const {
    const auto b = static_cast<std::size_t>(row_ptr_[static_cast<std::size_t>(row)]);
    const auto e = static_cast<std::size_t>(row_ptr_[static_cast<std::size_t>(row) + 1]);
    return {col_.data() + b, e - b};
}

std::span<const double> LinearOperator::row_values(int row) const {
    const auto b = static_cast<std::size_t>(row_ptr_[static_cast<std::size_t>(row)]);
    const auto e = static_cast<std::size_t>(row_ptr_[static_cast<std::size_t>(row) + 1]);
    return {val_.data() + b, e - b};
}

int LinearOperator::bandwidth() const {
    int bw = 0;
    for (int i = 0; i < dim_; ++i)
        for (int k = row_ptr_[static_cast<std::size_t>(i)];
             k < row_ptr_[static_cast<std::size_t>(i) + 1]; ++k)
            bw = std::max(bw, std::abs(col_[static_cast<std::size_t>(k)] - i));
    return bw;
}

std::vector<double> LinearOperator::dense() const {
    if (dim_ > 64)
        throw std::domain_error("dense(): reserved for test oracles on grids <= 64 nodes");
    std::vector<double> m(static_cast<std::size_t>(dim_) * dim_, 0.0);
    for (int i = 0; i < dim_; ++i)
        for (int k = row_ptr_[static_cast<std::size_t>(i)];
             k < row_ptr_[static_cast<std::size_t>(i) + 1]; ++k)
            m[static_cast<std::size_t>(i) * dim_ + col_[static_cast<std::size_t>(k)]] =
                val_[static_cast<std::size_t>(k)];
    return m;
}

LinearOperator LinearOperator::from_rows(
    int dimension, const std::vector<std::vector<std::pair<int, double>>>& rows,
    double lambda, Boundary boundary, int grid_rows, int grid_cols) {
    if (static_cast<int>(rows.size()) != dimension)
        throw std::domain_error("from_rows: row count mismatch");
    LinearOperator A;
    A.dim_ = dimension;
    A.lambda_ = lambda;
    A.boundary_ = boundary;
    A.grid_rows_ = grid_rows;
    A.grid_cols_ = grid_cols > 0 ? grid_cols : dimension;
    auto copy = rows;
    Csr m = to_csr(dimension, copy);
    A.row_ptr_ = std::move(m.row_ptr);
    A.col_ = std::move(m.col);
    A.val_ = std::move(m.val);
    return A;
}

std::vector<double> node_residual(const LinearOperator& op, std::span<const double> u,
                                  std::span<const double> v, const ConductanceSet& g) {
    if (static_cast<int>(u.size()) != op.dimension() ||
        static_cast<int>(v.size()) != op.dimension())
        throw std::domain_error("node_residual: dimension mismatch");
    std::vector<double> r = op.apply(u);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = g.g0 * (v[i] - r[i]);
    return r;
}

} // namespace rnsift
