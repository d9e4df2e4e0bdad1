#include "geoflow/manifold.hpp"

#include "geoflow/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace geoflow {
namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double sample_curvature_bound_sq(const ManifoldDescriptor& m) {
    constexpr int kU = 64;
    constexpr int kV = 128;
    const bool torus = m.kind() == ManifoldKind::Torus;
    double best = 0.0;
    for (int i = 0; i <= kU; ++i) {
        const double u = torus ? 2.0 * std::numbers::pi * i / kU : std::numbers::pi * i / kU;
        for (int j = 0; j < kV; ++j) {
            const double v = 2.0 * std::numbers::pi * j / kV;
            const double k = max_principal_curvature(m, m.surface_point(u, v));
            best = std::max(best, k * k);
        }
    }
    return best;
}

void require_positive(double value, const char* what) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw Error(ErrorCode::InvalidParameter, std::string(what) + " must be a positive number");
    }
}

}  // namespace

ManifoldDescriptor::ManifoldDescriptor(std::string name, Shape shape, double tube_radius)
    : name_(std::move(name)), shape_(shape), tube_radius_(tube_radius) {
    curvature_bound_sq_ = sample_curvature_bound_sq(*this);
}

ManifoldDescriptor ManifoldDescriptor::sphere() { return {"sphere", UnitSphere{}, 0.5}; }

ManifoldDescriptor ManifoldDescriptor::ellipsoid(double a, double b, double c) {
    require_positive(a, "ellipsoid semi-axis a");
    require_positive(b, "ellipsoid semi-axis b");
    require_positive(c, "ellipsoid semi-axis c");
    return {"ellipsoid", Ellipsoid{a, b, c}, 0.3 * std::min({a, b, c})};
}

ManifoldDescriptor ManifoldDescriptor::torus(double major, double minor) {
    require_positive(major, "torus major radius");
    require_positive(minor, "torus minor radius");
    if (!(major > minor)) throw Error(ErrorCode::InvalidParameter, "torus needs major radius > minor radius");
    return {"torus", Torus{major, minor}, 0.5 * minor};
}

ManifoldDescriptor ManifoldDescriptor::from_name(const std::string& kind, const std::vector<double>& params) {
    auto expect = [&](std::size_t count) {
        if (params.size() != count) {
            throw Error(ErrorCode::InvalidParameter, "manifold '" + kind + "' takes " + std::to_string(count) +
                                                         " parameters, got " + std::to_string(params.size()));
        }
    };
    if (kind == "sphere") {
        expect(0);
        return sphere();
    }
    if (kind == "ellipsoid") {
        expect(3);
        return ellipsoid(params[0], params[1], params[2]);
    }
    if (kind == "torus") {
        expect(2);
        return torus(params[0], params[1]);
    }
    throw Error(ErrorCode::UnsupportedManifold, "unknown manifold kind '" + kind + "'");
}

ManifoldKind ManifoldDescriptor::kind() const {
    return std::visit(overloaded{[](const UnitSphere&) { return ManifoldKind::Sphere; },
                                 [](const Ellipsoid&) { return ManifoldKind::Ellipsoid; },
                                 [](const Torus&) { return ManifoldKind::Torus; }},
                      shape_);
}

std::vector<double> ManifoldDescriptor::params() const {
    return std::visit(overloaded{[](const UnitSphere&) { return std::vector<double>{}; },
                                 [](const Ellipsoid& e) { return std::vector<double>{e.a, e.b, e.c}; },
                                 [](const Torus& t) { return std::vector<double>{t.major, t.minor}; }},
                      shape_);
}

double ManifoldDescriptor::constraint(const Vec3& x) const {
    return std::visit(
        overloaded{[&](const UnitSphere&) { return norm_sq(x) - 1.0; },
                   [&](const Ellipsoid& e) {
                       return x.x * x.x / (e.a * e.a) + x.y * x.y / (e.b * e.b) + x.z * x.z / (e.c * e.c) - 1.0;
                   },
                   [&](const Torus& t) {
                       const double rho = std::hypot(x.x, x.y);
                       const double d = rho - t.major;
                       return d * d + x.z * x.z - t.minor * t.minor;
                   }},
        shape_);
}

Vec3 ManifoldDescriptor::gradient(const Vec3& x) const {
    return std::visit(overloaded{[&](const UnitSphere&) { return 2.0 * x; },
                                 [&](const Ellipsoid& e) {
                                     return Vec3{2.0 * x.x / (e.a * e.a), 2.0 * x.y / (e.b * e.b),
                                                 2.0 * x.z / (e.c * e.c)};
                                 },
                                 [&](const Torus& t) {
                                     const double rho = std::hypot(x.x, x.y);
                                     if (rho == 0.0) return Vec3{0.0, 0.0, 2.0 * x.z};
                                     const double s = 2.0 * (rho - t.major) / rho;
                                     return Vec3{s * x.x, s * x.y, 2.0 * x.z};
                                 }},
                      shape_);
}

Mat3 ManifoldDescriptor::hessian(const Vec3& x) const {
    return std::visit(overloaded{[&](const UnitSphere&) {
                                     Mat3 h;
                                     h(0, 0) = h(1, 1) = h(2, 2) = 2.0;
                                     return h;
                                 },
                                 [&](const Ellipsoid& e) {
                                     Mat3 h;
                                     h(0, 0) = 2.0 / (e.a * e.a);
                                     h(1, 1) = 2.0 / (e.b * e.b);
                                     h(2, 2) = 2.0 / (e.c * e.c);
                                     return h;
                                 },
                                 [&](const Torus& t) {
                                     // f = rho^2 - 2 R rho + R^2 + z^2 - r^2, so Hf = 2I - 2R Hess(rho) on (x, y).
                                     Mat3 h;
                                     const double rho = std::hypot(x.x, x.y);
                                     h(2, 2) = 2.0;
                                     if (rho == 0.0) {
                                         h(0, 0) = h(1, 1) = 2.0;
                                         return h;
                                     }
                                     const double k = 2.0 * t.major / (rho * rho * rho);
                                     h(0, 0) = 2.0 - k * x.y * x.y;
                                     h(1, 1) = 2.0 - k * x.x * x.x;
                                     h(0, 1) = h(1, 0) = k * x.x * x.y;
                                     return h;
                                 }},
                      shape_);
}

Vec3 ManifoldDescriptor::surface_point(double u, double v) const {
    return std::visit(overloaded{[&](const UnitSphere&) {
                                     return Vec3{std::sin(u) * std::cos(v), std::sin(u) * std::sin(v), std::cos(u)};
                                 },
                                 [&](const Ellipsoid& e) {
                                     return Vec3{e.a * std::sin(u) * std::cos(v), e.b * std::sin(u) * std::sin(v),
                                                 e.c * std::cos(u)};
                                 },
                                 [&](const Torus& t) {
                                     const double rho = t.major + t.minor * std::cos(u);
                                     return Vec3{rho * std::cos(v), rho * std::sin(v), t.minor * std::sin(u)};
                                 }},
                      shape_);
}

double eval_constraint(const ManifoldDescriptor& m, const Vec3& x) { return m.constraint(x); }

Vec3 unit_normal(const ManifoldDescriptor& m, const Vec3& x) {
    const Vec3 g = m.gradient(x);
    const double len = norm(g);
    if (!(len >= kDegenerateGradient)) {
        throw Error(ErrorCode::DegenerateGradient, m.name() + ": constraint gradient vanishes near the point");
    }
    return g / len;
}

Vec3 second_fundamental_form(const ManifoldDescriptor& m, const Vec3& x, const Vec3& v, double tangent_tol) {
    const Vec3 g = m.gradient(x);
    const double g_sq = norm_sq(g);
    if (!(std::sqrt(g_sq) >= kDegenerateGradient)) {
        throw Error(ErrorCode::DegenerateGradient, m.name() + ": constraint gradient vanishes near the point");
    }
    const double v_len = norm(v);
    if (v_len == 0.0) return {};
    if (std::abs(dot(v, g)) > tangent_tol * v_len * std::sqrt(g_sq)) {
        throw Error(ErrorCode::NonTangentInput, "second fundamental form needs a tangent vector");
    }
    return (-quadratic_form(m.hessian(x), v) / g_sq) * g;
}

Vec3 tangent_project(const ManifoldDescriptor& m, const Vec3& x, const Vec3& w) {
    const Vec3 n = unit_normal(m, x);
    return w - dot(w, n) * n;
}

Vec3 closest_point_project(const ManifoldDescriptor& m, const Vec3& x, const ProjectionOptions& options) {
    const Vec3 dir = m.gradient(x);
    const double dir_sq = norm_sq(dir);
    if (!(std::sqrt(dir_sq) >= kDegenerateGradient)) {
        throw Error(ErrorCode::DegenerateGradient, m.name() + ": cannot project, constraint gradient vanishes");
    }
    double f = m.constraint(x);
    if (f == 0.0) return x;
    if (std::abs(f) / std::sqrt(dir_sq) > 2.0 * m.tube_radius()) {
        throw Error(ErrorCode::OutsideTube, m.name() + ": point is outside the projection tube");
    }

    // Newton in the line parameter s; |f| is floored by rounding at a few ulps of the
    // constraint's terms, so stop once a full step no longer improves it.
    double s = 0.0;
    Vec3 p = x;
    for (int it = 0; it < options.max_iterations; ++it) {
        const double slope = dot(m.gradient(p), dir);
        if (!(std::abs(slope) > 0.0)) break;
        double step = -f / slope;
        double trial_s = s + step;
        Vec3 trial = x + trial_s * dir;
        double trial_f = m.constraint(trial);
        int halvings = 0;
        while (std::abs(trial_f) > std::abs(f) && halvings < 30) {
            step *= 0.5;
            trial_s = s + step;
            trial = x + trial_s * dir;
            trial_f = m.constraint(trial);
            ++halvings;
        }
        if (!(std::abs(trial_f) < std::abs(f))) break;
        s = trial_s;
        p = trial;
        f = trial_f;
        if (f == 0.0) break;
    }
    if (!(std::abs(f) <= options.tolerance)) {
        throw Error(ErrorCode::NewtonDivergence, m.name() + ": projection did not converge");
    }
    return p;
}

double max_principal_curvature(const ManifoldDescriptor& m, const Vec3& x) {
    const Vec3 g = m.gradient(x);
    const double len = norm(g);
    if (!(len >= kDegenerateGradient)) {
        throw Error(ErrorCode::DegenerateGradient, m.name() + ": constraint gradient vanishes near the point");
    }
    const auto [e1, e2] = orthonormal_complement(g);
    const Mat3 h = m.hessian(x);
    const double s11 = quadratic_form(h, e1) / len;
    const double s22 = quadratic_form(h, e2) / len;
    const double s12 = dot(e1, h * e2) / len;
    const double mean = 0.5 * (s11 + s22);
    const double radius = std::hypot(0.5 * (s11 - s22), s12);
    return std::max(std::abs(mean + radius), std::abs(mean - radius));
}

}  // namespace geoflow
