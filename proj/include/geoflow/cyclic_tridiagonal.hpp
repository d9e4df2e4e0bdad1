#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace geoflow {

/// Solver for the constant-coefficient periodic tridiagonal system
///
///     off * x[i-1] + diag * x[i] + off * x[i+1] = r[i],   indices mod n,
///
/// applied independently to each of `width` interleaved columns
/// (x[i * width + c]). Factorization happens once in the constructor;
/// the corner entries are handled with a Sherman-Morrison correction.
class CyclicTridiagonal {
public:
    CyclicTridiagonal(std::size_t n, double diag, double off);

    std::size_t size() const { return n_; }

    /// Overwrites `rhs` (n * width values) with the solution.
    void solve_in_place(std::span<double> rhs, std::size_t width) const;

private:
    void thomas(std::span<double> x, std::size_t width, std::size_t column) const;

    std::size_t n_;
    double diag_;
    double off_;
    double gamma_;
    std::vector<double> inv_denom_;  // 1 / pivot of the modified tridiagonal factor
    std::vector<double> upper_;      // eliminated super-diagonal
    std::vector<double> z_;          // T^{-1} u
    double correction_denom_ = 1.0;  // 1 + v.z
};

}  // namespace geoflow
