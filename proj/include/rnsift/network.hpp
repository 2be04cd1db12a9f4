#pragma once

#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace rnsift {

/// How stencil taps falling off the grid edge are folded back.
enum class Boundary {
    mirror,    ///< whole-sample reflection about the edge node
    periodic,  ///< wrap around
    truncate   ///< drop out-of-range taps, re-center the diagonal so rows keep sum 1
};

/// Neighborhood of the 2-D smoothing penalty.
enum class Stencil2D {
    axis_only,           ///< 5-point Laplacian
    diagonal_augmented   ///< 9-point Laplacian (1/6 diagonal, 4/6 axis, -20/6 center)
};

const char* to_string(Boundary b);
const char* to_string(Stencil2D s);

struct Smoother1DSpec {
    int node_count = 0;
    double lambda = 0.0;
    Boundary boundary = Boundary::mirror;

    void validate() const; ///< throws std::domain_error when invariants fail
};

struct Smoother2DSpec {
    int rows = 0;
    int cols = 0;
    double lambda = 0.0;
    Stencil2D stencil = Stencil2D::diagonal_augmented;
    Boundary boundary = Boundary::mirror;

    void validate() const;
};

/// Raised where lambda = 0 would require an infinite source resistor: the
/// caller should fall back to identity filtering instead of building a network.
class IdentityFilterSignal : public std::domain_error {
public:
    IdentityFilterSignal()
        : std::domain_error("lambda = 0: network degenerates to the identity filter") {}
};

/// Branch conductances of the active network. g2 is negative (the active
/// element); ratios follow r0 = lambda*r1, r2 = -4*r1.
struct ConductanceSet {
    double g0 = 0.0;      ///< source branch, siemens
    double g1 = 0.0;      ///< nearest-neighbor branch, siemens
    double g2 = 0.0;      ///< second-neighbor branch, siemens (negative)
    double r1_ohms = 0.0; ///< reference resistor

    double r0_ohms() const { return 1.0 / g0; }
    double r2_ohms() const { return 1.0 / g2; }
    double lambda() const { return g1 / g0; }
};

/// Build the conductance set for a given penalty weight. Throws
/// IdentityFilterSignal at lambda = 0 and std::domain_error on negative input.
ConductanceSet conductances_from_lambda(double lambda, double r1_ohms);

/// Sparse symmetric positive-definite operator I + lambda*B in row-stencil
/// (CSR) form. B is the squared discrete Laplacian of the chosen stencil, so
/// interior rows sum to exactly 1 and constants are fixed points.
class LinearOperator {
public:
    int dimension() const { return dim_; }
    double lambda() const { return lambda_; }
    Boundary boundary() const { return boundary_; }
    int grid_rows() const { return grid_rows_; }
    int grid_cols() const { return grid_cols_; }

    /// y = A*x
    void apply(std::span<const double> x, std::span<double> y) const;
    std::vector<double> apply(std::span<const double> x) const;

    /// Entry (row, col); 0 where the sparsity pattern has no entry.
    double coefficient(int row, int col) const;
    double row_sum(int row) const;

    std::span<const int> row_cols(int row) const;
    std::span<const double> row_values(int row) const;

    /// Largest |row - col| over stored entries.
    int bandwidth() const;

    /// Dense row-major copy, restricted to small operators (test oracles only).
    /// Throws std::domain_error above 64 nodes.
    std::vector<double> dense() const;

    /// Assemble from explicit rows (custom node networks and tests).
    static LinearOperator from_rows(int dimension,
                                    const std::vector<std::vector<std::pair<int, double>>>& rows,
                                    double lambda, Boundary boundary,
                                    int grid_rows = 1, int grid_cols = 0);

private:
    friend LinearOperator assemble_1d(const Smoother1DSpec&);
    friend LinearOperator assemble_2d(const Smoother2DSpec&);

    int dim_ = 0;
    double lambda_ = 0.0;
    Boundary boundary_ = Boundary::mirror;
    int grid_rows_ = 1;
    int grid_cols_ = 0;
    std::vector<int> row_ptr_;
    std::vector<int> col_;
    std::vector<double> val_;
};

/// Operator of the 1-D network: interior rows [l, -4l, 1+6l, -4l, l].
LinearOperator assemble_1d(const Smoother1DSpec& spec);

/// Operator of the 2-D network: I + lambda * L^T L for the chosen Laplacian.
LinearOperator assemble_2d(const Smoother2DSpec& spec);

/// Per-node current residual g0 * (v - A*u), amperes. Zero exactly when u is
/// the network's steady state for source voltages v.
std::vector<double> node_residual(const LinearOperator& op,
                                  std::span<const double> u,
                                  std::span<const double> v,
                                  const ConductanceSet& conductances);

} // namespace rnsift
