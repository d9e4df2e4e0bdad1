#include "geoflow/cli/presets.hpp"

#include "geoflow/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

namespace geoflow::cli {
namespace {

double theta(std::size_t i, std::size_t n) {
    return 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
}

}  // namespace

DiscreteLoop great_circle_loop(const Vec3& axis, std::size_t n) {
    if (!(norm(axis) > 0.0)) throw Error(ErrorCode::InvalidParameter, "great circle axis must be non-zero");
    const auto [e1, e2] = orthonormal_complement(axis);
    std::vector<Vec3> pts(n);
    for (std::size_t i = 0; i < n; ++i) pts[i] = std::cos(theta(i, n)) * e1 + std::sin(theta(i, n)) * e2;
    return DiscreteLoop(std::move(pts));
}

DiscreteLoop latitude_loop(double phi, std::size_t n) {
    const double r = std::sin(phi);
    const double z = std::cos(phi);
    std::vector<Vec3> pts(n);
    for (std::size_t i = 0; i < n; ++i) pts[i] = {r * std::cos(theta(i, n)), r * std::sin(theta(i, n)), z};
    return DiscreteLoop(std::move(pts));
}

DiscreteLoop perturbed_loop(const ManifoldDescriptor& m, std::size_t n, std::uint64_t seed, double amplitude) {
    double ax = 1.0;
    double by = 1.0;
    if (const auto* e = std::get_if<Ellipsoid>(&m.shape())) {
        ax = e->a;
        by = e->b;
    } else if (const auto* t = std::get_if<Torus>(&m.shape())) {
        ax = by = t->major + t->minor;
    }

    std::mt19937_64 rng(seed);
    std::array<double, 4> ca{};
    std::array<double, 4> cb{};
    for (std::size_t k = 0; k < 4; ++k) {
        ca[k] = 2.0 * unit_double(rng()) - 1.0;
        cb[k] = 2.0 * unit_double(rng()) - 1.0;
    }

    std::vector<double> bump(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < 4; ++k) {
            const double kk = static_cast<double>(k + 1);
            bump[i] += (ca[k] * std::cos(kk * theta(i, n)) + cb[k] * std::sin(kk * theta(i, n))) / kk;
        }
    }
    double peak = 0.0;
    for (double b : bump) peak = std::max(peak, std::abs(b));
    const double scale = peak > 0.0 ? amplitude / peak : 0.0;

    // The base curve lies in z = 0 where the surface normal is horizontal, so z is tangent
    // to M and orthogonal to the curve.
    std::vector<Vec3> pts(n);
    for (std::size_t i = 0; i < n; ++i) {
        pts[i] = {ax * std::cos(theta(i, n)), by * std::sin(theta(i, n)), scale * bump[i]};
    }
    return make_loop(pts, m);
}

}  // namespace geoflow::cli
