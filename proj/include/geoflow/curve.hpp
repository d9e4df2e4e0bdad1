#pragma once

#include "geoflow/manifold.hpp"
#include "geoflow/vec3.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace geoflow {

inline constexpr std::size_t kMinLoopPoints = 8;
inline constexpr double kOnManifoldTol = 1e-10;

/// Closed curve sampled at N points with uniform parameter spacing 2 pi / N.
/// Coordinates are stored interleaved (x0 y0 z0 x1 ...), the layout the kernels expect.
class DiscreteLoop {
public:
    /// Empty placeholder; every operation expects a loop built by one of the other constructors.
    DiscreteLoop() = default;
    /// Throws TooFewPoints when fewer than kMinLoopPoints points are given.
    explicit DiscreteLoop(std::vector<Vec3> points);
    static DiscreteLoop from_flat(std::vector<double> coords);

    /// N copies of p.
    static DiscreteLoop constant(const Vec3& p, std::size_t n);

    std::size_t size() const { return coords_.size() / 3; }
    double dtheta() const;

    Vec3 point(std::size_t i) const { return {coords_[3 * i], coords_[3 * i + 1], coords_[3 * i + 2]}; }
    /// Point at a periodic index.
    Vec3 point_wrapped(std::ptrdiff_t i) const;
    std::vector<Vec3> points() const;

    std::span<const double> flat() const { return coords_; }

    /// All points equal to within `tol` of the first one.
    bool is_point_loop(double tol = 1e-12) const;

    /// max_i |f(p_i)|
    double max_constraint_residual(const ManifoldDescriptor& m) const;

    friend bool operator==(const DiscreteLoop&, const DiscreteLoop&) = default;

private:
    std::vector<double> coords_;
};

/// Projects every sample onto M. Throws TooFewPoints or OutsideTube.
DiscreteLoop make_loop(std::span<const Vec3> samples, const ManifoldDescriptor& m);

/// Throws OffManifold unless every point satisfies |f| <= tol.
void require_on_manifold(const DiscreteLoop& loop, const ManifoldDescriptor& m, double tol = kOnManifoldTol);

/// 1/2 sum_i |p_{i+1} - p_i|^2 / dtheta for any number of interleaved points.
double discrete_energy(std::span<const double> coords);

double energy(const DiscreteLoop& loop);

/// Central differences (p_{i+1} - p_{i-1}) / (2 dtheta).
std::vector<Vec3> derivative(const DiscreteLoop& loop);

/// Forward differences (p_{i+1} - p_i) / dtheta.
std::vector<Vec3> forward_derivative(const DiscreteLoop& loop);

/// (p_{i+1} - 2 p_i + p_{i-1}) / dtheta^2
std::vector<Vec3> second_derivative(const DiscreteLoop& loop);

/// max_i |(p_{i+1} - p_i) / dtheta|^2
double sup_grad_sq(const DiscreteLoop& loop);

double l2_distance(const DiscreteLoop& a, const DiscreteLoop& b);
double h1_distance(const DiscreteLoop& a, const DiscreteLoop& b);

struct Alignment {
    /// b[i] is compared with a[shift + i] (forward) or a[shift - i] (reversed).
    std::size_t shift = 0;
    bool reversed = false;
    /// max_i (|position difference| + |central-derivative difference|)
    double distance = 0.0;
};

/// Minimizes the discrete C^1 distance over the 2N cyclic shifts and orientations of `a`.
/// Ties go to the forward orientation, then to the smallest shift.
Alignment align_cyclic(const DiscreteLoop& a, const DiscreteLoop& b);

/// C^1 distance for one fixed reparametrization (shift, orientation) of `a`.
double c1_distance(const DiscreteLoop& a, const DiscreteLoop& b, std::size_t shift, bool reversed);

}  // namespace geoflow
