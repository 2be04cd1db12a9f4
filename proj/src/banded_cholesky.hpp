#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "rnsift/network.hpp"

namespace rnsift::detail {

/// Symmetric banded Cholesky; band stored as (k+1) rows of length n, row d
/// holding subdiagonal d. Factors on construction; positive_definite() is the
/// structural SPD check (factorization succeeds iff the matrix is SPD).
class BandedCholesky {
public:
    explicit BandedCholesky(const LinearOperator& A, double diagonal_shift = 0.0,
                            double scale = 1.0)
        : n_(A.dimension()), k_(A.bandwidth()) {
        band_.assign(static_cast<std::size_t>(k_ + 1) * n_, 0.0);
        for (int i = 0; i < n_; ++i) {
            auto cols = A.row_cols(i);
            auto vals = A.row_values(i);
            for (std::size_t t = 0; t < cols.size(); ++t) {
                const int j = cols[t];
                if (j <= i) at(i - j, j) = scale * vals[t] + (j == i ? diagonal_shift : 0.0);
            }
        }
        factor();
    }

    bool positive_definite() const { return spd_; }
    int bandwidth() const { return k_; }

    void solve_in_place(std::vector<double>& x) const {
        for (int j = 0; j < n_; ++j) {
            x[static_cast<std::size_t>(j)] /= at(0, j);
            const int last = std::min(n_ - 1, j + k_);
            for (int i = j + 1; i <= last; ++i)
                x[static_cast<std::size_t>(i)] -= at(i - j, j) * x[static_cast<std::size_t>(j)];
        }
        for (int j = n_ - 1; j >= 0; --j) {
            const int last = std::min(n_ - 1, j + k_);
            for (int i = j + 1; i <= last; ++i)
                x[static_cast<std::size_t>(j)] -= at(i - j, j) * x[static_cast<std::size_t>(i)];
            x[static_cast<std::size_t>(j)] /= at(0, j);
        }
    }

private:
    double& at(int d, int j) { return band_[static_cast<std::size_t>(d) * n_ + j]; }
    double at(int d, int j) const { return band_[static_cast<std::size_t>(d) * n_ + j]; }

    void factor() {
        for (int j = 0; j < n_; ++j) {
            double d = at(0, j);
            if (!(d > 0.0)) {
                spd_ = false;
                return;
            }
            d = std::sqrt(d);
            at(0, j) = d;
            const int last = std::min(n_ - 1, j + k_);
            for (int i = j + 1; i <= last; ++i) at(i - j, j) /= d;
            for (int c = j + 1; c <= last; ++c) {
                const double ljc = at(c - j, j);
                if (ljc == 0.0) continue;
                for (int i = c; i <= last; ++i) at(i - c, c) -= at(i - j, j) * ljc;
            }
        }
    }

    int n_, k_;
    bool spd_ = true;
    std::vector<double> band_;
};

} // namespace rnsift::detail
