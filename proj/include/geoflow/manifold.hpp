#pragma once

#include "geoflow/vec3.hpp"

#include <string>
#include <variant>
#include <vector>

namespace geoflow {

struct UnitSphere {};

/// x^2/a^2 + y^2/b^2 + z^2/c^2 = 1
struct Ellipsoid {
    double a = 1.0;
    double b = 1.0;
    double c = 1.0;
};

/// Torus of revolution about the z axis: (sqrt(x^2+y^2) - R)^2 + z^2 = r^2.
struct Torus {
    double major = 2.0;
    double minor = 0.5;
};

enum class ManifoldKind { Sphere, Ellipsoid, Torus };

/// Closed hypersurface {f = 0} in R^3 given by an analytic constraint.
/// Immutable after construction.
class ManifoldDescriptor {
public:
    using Shape = std::variant<UnitSphere, Ellipsoid, Torus>;

    static ManifoldDescriptor sphere();
    static ManifoldDescriptor ellipsoid(double a, double b, double c);
    static ManifoldDescriptor torus(double major, double minor);

    /// Builds from a kind name and its numeric parameters, e.g. ("torus", {2.0, 0.5}).
    static ManifoldDescriptor from_name(const std::string& kind, const std::vector<double>& params);

    const std::string& name() const { return name_; }
    ManifoldKind kind() const;
    const Shape& shape() const { return shape_; }
    int ambient_dim() const { return 3; }

    /// Parameters in the order accepted by from_name (empty for the sphere).
    std::vector<double> params() const;

    /// Radius of the neighbourhood in which the gradient stays away from zero
    /// and projection onto M is well defined.
    double tube_radius() const { return tube_radius_; }

    /// Sampled estimate of sup_M |A|^2 (square of the largest principal curvature).
    /// Approximate: obtained from a parameter grid, not a certified bound.
    double curvature_bound_sq() const { return curvature_bound_sq_; }

    double constraint(const Vec3& x) const;
    Vec3 gradient(const Vec3& x) const;
    Mat3 hessian(const Vec3& x) const;

    /// Surface point for parameters (u, v) in [0, pi] x [0, 2 pi) (sphere, ellipsoid)
    /// or [0, 2 pi) x [0, 2 pi) (torus: u around the tube, v around the axis).
    Vec3 surface_point(double u, double v) const;

private:
    ManifoldDescriptor(std::string name, Shape shape, double tube_radius);

    std::string name_;
    Shape shape_;
    double tube_radius_;
    double curvature_bound_sq_ = 0.0;
};

/// Smallest gradient norm for which a normal direction is defined.
inline constexpr double kDegenerateGradient = 1e-10;

double eval_constraint(const ManifoldDescriptor& m, const Vec3& x);

/// grad f / |grad f|. Throws DegenerateGradient when |grad f| is too small.
Vec3 unit_normal(const ManifoldDescriptor& m, const Vec3& x);

/// A_x(v, v) = -(v^T Hf v / |grad f|^2) grad f, a normal vector.
/// Throws NonTangentInput when |<v, n>| > tangent_tol * |v|.
Vec3 second_fundamental_form(const ManifoldDescriptor& m, const Vec3& x, const Vec3& v,
                             double tangent_tol = 1e-8);

/// w - <w, n> n
Vec3 tangent_project(const ManifoldDescriptor& m, const Vec3& x, const Vec3& w);

struct ProjectionOptions {
    int max_iterations = 50;
    /// Required |f(p)| on return.
    double tolerance = 1e-12;
};

/// Moves x onto M along the line x + s grad f(x), solving f = 0 by damped Newton in s.
/// Throws OutsideTube when the first-order distance estimate |f|/|grad f| exceeds
/// twice the tube radius, NewtonDivergence when the tolerance is not reached.
Vec3 closest_point_project(const ManifoldDescriptor& m, const Vec3& x, const ProjectionOptions& options = {});

/// Largest |principal curvature| at a point of M.
double max_principal_curvature(const ManifoldDescriptor& m, const Vec3& x);

}  // namespace geoflow
