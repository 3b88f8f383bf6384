#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "kinslab/errors.hpp"

namespace kinslab {

// Thomas algorithm for lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i].
// lower[0] and upper[n-1] are ignored. Intended for diagonally dominant systems;
// no pivoting.
class TridiagonalSolver {
public:
    explicit TridiagonalSolver(std::size_t n = 0) : scratch_(n) {}

    void solve(std::span<const double> lower, std::span<const double> diag,
               std::span<const double> upper, std::span<const double> rhs,
               std::span<double> x) {
        const std::size_t n = diag.size();
        if (scratch_.size() < n) scratch_.resize(n);
        if (n == 0) return;
        double denom = diag[0];
        if (denom == 0.0) throw NumericalError("tridiagonal solve: zero pivot at row 0");
        scratch_[0] = n > 1 ? upper[0] / denom : 0.0;
        x[0] = rhs[0] / denom;
        for (std::size_t i = 1; i < n; ++i) {
            denom = diag[i] - lower[i] * scratch_[i - 1];
            if (denom == 0.0) throw NumericalError("tridiagonal solve: zero pivot");
            scratch_[i] = i + 1 < n ? upper[i] / denom : 0.0;
            x[i] = (rhs[i] - lower[i] * x[i - 1]) / denom;
        }
        for (std::size_t i = n - 1; i-- > 0;) x[i] -= scratch_[i] * x[i + 1];
    }

private:
    std::vector<double> scratch_;
};

}  // namespace kinslab
