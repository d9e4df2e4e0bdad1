#include "geoflow/curve.hpp"

#include "geoflow/error.hpp"
#include "geoflow/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace geoflow {
namespace {

void require_size(std::size_t n) {
    if (n < kMinLoopPoints) {
        throw Error(ErrorCode::TooFewPoints,
                    "loop needs at least " + std::to_string(kMinLoopPoints) + " points, got " + std::to_string(n));
    }
}

void require_same_size(const DiscreteLoop& a, const DiscreteLoop& b) {
    if (a.size() != b.size()) {
        throw Error(ErrorCode::MismatchedResolution, "loops have different resolutions (" + std::to_string(a.size()) +
                                                         " vs " + std::to_string(b.size()) + ")");
    }
}

std::vector<Vec3> to_points(std::span<const double> flat) {
    std::vector<Vec3> out(flat.size() / 3);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = {flat[3 * i], flat[3 * i + 1], flat[3 * i + 2]};
    return out;
}

}  // namespace

DiscreteLoop::DiscreteLoop(std::vector<Vec3> points) {
    require_size(points.size());
    coords_.reserve(3 * points.size());
    for (const Vec3& p : points) {
        coords_.push_back(p.x);
        coords_.push_back(p.y);
        coords_.push_back(p.z);
    }
}

DiscreteLoop DiscreteLoop::from_flat(std::vector<double> coords) {
    if (coords.size() % 3 != 0) throw Error(ErrorCode::Format, "flat coordinate array length is not a multiple of 3");
    require_size(coords.size() / 3);
    DiscreteLoop out;
    out.coords_ = std::move(coords);
    return out;
}

DiscreteLoop DiscreteLoop::constant(const Vec3& p, std::size_t n) { return DiscreteLoop(std::vector<Vec3>(n, p)); }

double DiscreteLoop::dtheta() const { return 2.0 * std::numbers::pi / static_cast<double>(size()); }

Vec3 DiscreteLoop::point_wrapped(std::ptrdiff_t i) const {
    const auto n = static_cast<std::ptrdiff_t>(size());
    return point(static_cast<std::size_t>(((i % n) + n) % n));
}

std::vector<Vec3> DiscreteLoop::points() const { return to_points(coords_); }

bool DiscreteLoop::is_point_loop(double tol) const {
    const Vec3 first = point(0);
    for (std::size_t i = 1; i < size(); ++i) {
        if (norm(point(i) - first) > tol) return false;
    }
    return true;
}

double DiscreteLoop::max_constraint_residual(const ManifoldDescriptor& m) const {
    double worst = 0.0;
    for (std::size_t i = 0; i < size(); ++i) worst = std::max(worst, std::abs(m.constraint(point(i))));
    return worst;
}

DiscreteLoop make_loop(std::span<const Vec3> samples, const ManifoldDescriptor& m) {
    require_size(samples.size());
    std::vector<Vec3> projected(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const Vec3& x = samples[i];
        const double g = norm(m.gradient(x));
        if (g < kDegenerateGradient || std::abs(m.constraint(x)) / g > m.tube_radius()) {
            throw Error(ErrorCode::OutsideTube,
                        "sample " + std::to_string(i) + " lies outside the tube around the " + m.name());
        }
        projected[i] = closest_point_project(m, x);
    }
    return DiscreteLoop(std::move(projected));
}

void require_on_manifold(const DiscreteLoop& loop, const ManifoldDescriptor& m, double tol) {
    const double r = loop.max_constraint_residual(m);
    if (!(r <= tol)) {
        throw Error(ErrorCode::OffManifold, "loop is not on the " + m.name() + " (max |f| = " + std::to_string(r) + ")");
    }
}

double discrete_energy(std::span<const double> coords) {
    const double n = static_cast<double>(coords.size() / 3);
    if (n == 0) return 0.0;
    const double dtheta = 2.0 * std::numbers::pi / n;
    return 0.5 * kernels::active().sum_sq_forward_diff(coords) / dtheta;
}

double energy(const DiscreteLoop& loop) { return discrete_energy(loop.flat()); }

std::vector<Vec3> derivative(const DiscreteLoop& loop) {
    std::vector<double> out(loop.flat().size());
    kernels::active().central_difference(loop.flat(), out, 0.5 / loop.dtheta());
    return to_points(out);
}

std::vector<Vec3> forward_derivative(const DiscreteLoop& loop) {
    const std::size_t n = loop.size();
    const double inv = 1.0 / loop.dtheta();
    std::vector<Vec3> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = (loop.point((i + 1) % n) - loop.point(i)) * inv;
    return out;
}

std::vector<Vec3> second_derivative(const DiscreteLoop& loop) {
    std::vector<double> out(loop.flat().size());
    const double h = loop.dtheta();
    kernels::active().second_difference(loop.flat(), out, 1.0 / (h * h));
    return to_points(out);
}

double sup_grad_sq(const DiscreteLoop& loop) {
    const std::size_t n = loop.size();
    const double h = loop.dtheta();
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, norm_sq(loop.point((i + 1) % n) - loop.point(i)));
    return worst / (h * h);
}

double l2_distance(const DiscreteLoop& a, const DiscreteLoop& b) {
    require_same_size(a, b);
    return std::sqrt(kernels::active().sum_sq_diff(a.flat(), b.flat()) * a.dtheta());
}

double h1_distance(const DiscreteLoop& a, const DiscreteLoop& b) {
    require_same_size(a, b);
    const auto& k = kernels::active();
    const double h = a.dtheta();
    const double l2_sq = k.sum_sq_diff(a.flat(), b.flat()) * h;
    const double grad_sq = k.sum_sq_forward_diff_of_difference(a.flat(), b.flat()) / h;
    return std::sqrt(l2_sq + grad_sq);
}

namespace {

double c1_distance_with(const std::vector<Vec3>& pa, const std::vector<Vec3>& da, const std::vector<Vec3>& pb,
                        const std::vector<Vec3>& db, std::size_t shift, bool reversed, double cutoff) {
    const std::size_t n = pa.size();
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = reversed ? (shift + n - i % n) % n : (shift + i) % n;
        const Vec3 dj = reversed ? -da[j] : da[j];
        const double e = norm(pb[i] - pa[j]) + norm(db[i] - dj);
        if (e > worst) {
            worst = e;
            if (worst > cutoff) return worst;
        }
    }
    return worst;
}

}  // namespace

double c1_distance(const DiscreteLoop& a, const DiscreteLoop& b, std::size_t shift, bool reversed) {
    require_same_size(a, b);
    return c1_distance_with(a.points(), derivative(a), b.points(), derivative(b), shift % a.size(), reversed,
                            std::numeric_limits<double>::infinity());
}

Alignment align_cyclic(const DiscreteLoop& a, const DiscreteLoop& b) {
    require_same_size(a, b);
    const std::size_t n = a.size();
    const auto pa = a.points();
    const auto pb = b.points();
    const auto da = derivative(a);
    const auto db = derivative(b);

    Alignment best{0, false, std::numeric_limits<double>::infinity()};
    for (int orientation = 0; orientation < 2; ++orientation) {
        const bool reversed = orientation == 1;
        for (std::size_t shift = 0; shift < n; ++shift) {
            // Early exit once a candidate can no longer beat the incumbent; ties keep the incumbent.
            const double d = c1_distance_with(pa, da, pb, db, shift, reversed, best.distance);
            if (d < best.distance) best = {shift, reversed, d};
        }
    }
    return best;
}

}  // namespace geoflow
