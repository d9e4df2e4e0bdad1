#include "geoflow/cyclic_tridiagonal.hpp"

#include "geoflow/error.hpp"

#include <cmath>

namespace geoflow {

CyclicTridiagonal::CyclicTridiagonal(std::size_t n, double diag, double off)
    : n_(n), diag_(diag), off_(off), gamma_(-diag) {
    if (n < 3) throw Error(ErrorCode::InvalidParameter, "cyclic tridiagonal system needs n >= 3");
    if (std::abs(diag) <= 2.0 * std::abs(off)) {
        throw Error(ErrorCode::InvalidParameter, "cyclic tridiagonal system must be strictly diagonally dominant");
    }

    // T = A - u v^T with u = (gamma, 0, ..., 0, off), v = (1, 0, ..., 0, off / gamma).
    inv_denom_.resize(n);
    upper_.resize(n);
    auto diag_at = [&](std::size_t i) {
        if (i == 0) return diag_ - gamma_;
        if (i == n - 1) return diag_ - off_ * off_ / gamma_;
        return diag_;
    };

    double pivot = diag_at(0);
    inv_denom_[0] = 1.0 / pivot;
    upper_[0] = off_ * inv_denom_[0];
    for (std::size_t i = 1; i < n; ++i) {
        pivot = diag_at(i) - off_ * upper_[i - 1];
        inv_denom_[i] = 1.0 / pivot;
        upper_[i] = off_ * inv_denom_[i];
    }

    z_.assign(n, 0.0);
    z_[0] = gamma_;
    z_[n - 1] = off_;
    thomas(z_, 1, 0);
    correction_denom_ = 1.0 + z_[0] + off_ / gamma_ * z_[n - 1];
}

void CyclicTridiagonal::thomas(std::span<double> x, std::size_t width, std::size_t column) const {
    auto at = [&](std::size_t i) -> double& { return x[i * width + column]; };
    at(0) *= inv_denom_[0];
    for (std::size_t i = 1; i < n_; ++i) at(i) = (at(i) - off_ * at(i - 1)) * inv_denom_[i];
    for (std::size_t i = n_ - 1; i-- > 0;) at(i) -= upper_[i] * at(i + 1);
}

void CyclicTridiagonal::solve_in_place(std::span<double> rhs, std::size_t width) const {
    if (rhs.size() != n_ * width) {
        throw Error(ErrorCode::MismatchedResolution, "cyclic tridiagonal right-hand side has the wrong size");
    }
    for (std::size_t c = 0; c < width; ++c) {
        thomas(rhs, width, c);
        const double vy = rhs[c] + off_ / gamma_ * rhs[(n_ - 1) * width + c];
        const double factor = vy / correction_denom_;
        for (std::size_t i = 0; i < n_; ++i) rhs[i * width + c] -= factor * z_[i];
    }
}

}  // namespace geoflow
