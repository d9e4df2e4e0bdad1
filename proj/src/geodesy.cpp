#include "geoflow/geodesy.hpp"

#include "geoflow/error.hpp"
#include "geoflow/parallel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

namespace geoflow {

std::string_view to_string(Classification c) {
    switch (c) {
        case Classification::ConvergedToGeodesic: return "converged_to_geodesic";
        case Classification::CollapsedToPoint: return "collapsed_to_point";
        case Classification::Undetermined: return "undetermined";
    }
    return "undetermined";
}

std::optional<Classification> parse_classification(std::string_view s) {
    for (auto c : {Classification::ConvergedToGeodesic, Classification::CollapsedToPoint, Classification::Undetermined}) {
        if (to_string(c) == s) return c;
    }
    return std::nullopt;
}

Residual residual(const DiscreteLoop& loop, const ManifoldDescriptor& m) {
    const auto lap = second_derivative(loop);
    const auto d = derivative(loop);
    Residual out;
    double sum = 0.0;
    for (std::size_t i = 0; i < loop.size(); ++i) {
        const Vec3 p = loop.point(i);
        const Vec3 di = tangent_project(m, p, d[i]);
        const double r2 = norm_sq(lap[i] - second_fundamental_form(m, p, di));
        out.sup = std::max(out.sup, r2);
        sum += r2;
    }
    out.sup = std::sqrt(out.sup);
    out.l2 = std::sqrt(sum * loop.dtheta());
    return out;
}

namespace {

constexpr double kPi = std::numbers::pi;

double theta(std::size_t i, std::size_t n) { return 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n); }

// Ellipse A cos t e1 + B sin t e2 traversed at constant speed.
class ConstantSpeedEllipse {
public:
    ConstantSpeedEllipse(double a, double b) : a_(a), b_(b), width_(2.0 * kPi / kPanels), cumulative_(kPanels + 1, 0.0) {
        for (std::size_t k = 0; k < kPanels; ++k) {
            cumulative_[k + 1] = cumulative_[k] + integrate(width_ * static_cast<double>(k), width_);
        }
    }

    double length() const { return cumulative_.back(); }

    // Ellipse parameter t in [0, 2 pi) at arc length s (taken modulo the length).
    double param_at(double s) const {
        const double total = length();
        s = std::fmod(s, total);
        if (s < 0.0) s += total;
        auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
        std::size_t k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(1, it - cumulative_.begin())) - 1;
        k = std::min(k, kPanels - 1);
        const double t0 = width_ * static_cast<double>(k);
        const double local = s - cumulative_[k];
        double dt = width_ * local / (cumulative_[k + 1] - cumulative_[k]);
        for (int iter = 0; iter < 30; ++iter) {
            const double step = (integrate(t0, dt) - local) / speed(t0 + dt);
            dt -= step;
            if (std::abs(step) < 1e-16) break;
        }
        return t0 + dt;
    }

private:
    static constexpr std::size_t kPanels = 2048;

    double speed(double t) const { return std::hypot(a_ * std::sin(t), b_ * std::cos(t)); }

    // 8-point Gauss-Legendre on [t0, t0 + w].
    double integrate(double t0, double w) const {
        static constexpr std::array<double, 4> x{0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                                 0.9602898564975363};
        static constexpr std::array<double, 4> wt{0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                                  0.1012285362903763};
        const double half = 0.5 * w;
        const double mid = t0 + half;
        double sum = 0.0;
        for (std::size_t j = 0; j < 4; ++j) sum += wt[j] * (speed(mid - half * x[j]) + speed(mid + half * x[j]));
        return sum * half;
    }

    double a_;
    double b_;
    double width_;
    std::vector<double> cumulative_;
};

Vec3 axis_vector(std::size_t k) {
    Vec3 v{};
    if (k == 0) v.x = 1.0;
    if (k == 1) v.y = 1.0;
    if (k == 2) v.z = 1.0;
    return v;
}

std::vector<double> shift_params(std::span<const double> base, std::span<const double> delta) {
    std::vector<double> out(base.begin(), base.end());
    for (std::size_t i = 0; i < delta.size(); ++i) out[out.size() - delta.size() + i] += delta[i];
    return out;
}

// Great circle frames: columns (first point, quarter-turn point, axis).
Mat3 frame_from_params(std::span<const double> params) {
    Vec3 axis{params[0], params[1], params[2]};
    axis = axis / norm(axis);
    const auto [e1, e2] = orthonormal_complement(axis);
    const double c = std::cos(params[3]);
    const double s = std::sin(params[3]);
    const Vec3 f1 = c * e1 + s * e2;
    const Vec3 f2 = cross(axis, f1);
    Mat3 f;
    for (int r = 0; r < 3; ++r) {
        f(r, 0) = f1[r];
        f(r, 1) = f2[r];
        f(r, 2) = axis[r];
    }
    return f;
}

std::vector<double> params_from_frame(const Mat3& f) {
    const Vec3 f1{f(0, 0), f(1, 0), f(2, 0)};
    Vec3 axis{f(0, 2), f(1, 2), f(2, 2)};
    axis = axis / norm(axis);
    const auto [e1, e2] = orthonormal_complement(axis);
    return {axis.x, axis.y, axis.z, std::atan2(dot(f1, e2), dot(f1, e1))};
}

DiscreteLoop great_circle(const Mat3& f, std::size_t n) {
    std::vector<Vec3> pts(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = theta(i, n);
        pts[i] = f * Vec3{std::cos(t), std::sin(t), 0.0};
    }
    return DiscreteLoop(std::move(pts));
}

// Rotation F minimizing sum_i |target_i - F c_{j(i)}|^2 with c_j the canonical circle samples.
Mat3 fit_great_circle(const DiscreteLoop& target, const Alignment& al) {
    const std::size_t n = target.size();
    Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = al.reversed ? (al.shift + n - i) % n : (al.shift + i) % n;
        const double t = theta(j, n);
        const Eigen::Vector3d c(std::cos(t), std::sin(t), 0.0);
        const Vec3 b = target.point(i);
        h += c * Eigen::Vector3d(b.x, b.y, b.z).transpose();
    }
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::Matrix3d u = svd.matrixU();
    const Eigen::Matrix3d v = svd.matrixV();
    Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
    if ((v * u.transpose()).determinant() < 0.0) d(2, 2) = -1.0;
    const Eigen::Matrix3d r = v * d * u.transpose();
    Mat3 out;
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) out(a, b) = r(a, b);
    }
    return out;
}

GeodesicFamily great_circle_family() {
    GeodesicFamily fam;
    fam.id = "great_circle";
    fam.param_names = {"axis_x", "axis_y", "axis_z", "phase"};
    fam.generate = [](std::span<const double> p, std::size_t n) { return great_circle(frame_from_params(p), n); };
    for (const Vec3& a : fibonacci_sphere(512)) fam.seeds.push_back({a.x, a.y, a.z, 0.0});
    fam.free_dims = 3;
    // Rotations act on the right (in the circle's own frame), so the search commutes with
    // rotating the target.
    fam.perturb = [](std::span<const double> base, std::span<const double> w) {
        const Vec3 axis{w[0], w[1], w[2]};
        const double angle = norm(axis);
        const Mat3 f = frame_from_params(base);
        return params_from_frame(angle > 0.0 ? f * rotation(axis, angle) : f);
    };
    fam.refine_step = {0.01, 0.01, 0.01};
    fam.fit = [](const DiscreteLoop& target, std::span<const double>, const Alignment& al) {
        return params_from_frame(fit_great_circle(target, al));
    };
    return fam;
}

GeodesicFamily principal_ellipse(const std::string& id, double sa, std::size_t ia, double sb, std::size_t ib) {
    auto arc = std::make_shared<const ConstantSpeedEllipse>(sa, sb);
    GeodesicFamily fam;
    fam.id = id;
    fam.param_names = {"phase"};
    fam.generate = [arc, sa, sb, ia, ib](std::span<const double> p, std::size_t n) {
        const Vec3 e1 = axis_vector(ia);
        const Vec3 e2 = axis_vector(ib);
        const double total = arc->length();
        std::vector<Vec3> pts(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double s = total * (theta(i, n) + p[0]) / (2.0 * kPi);
            const double t = arc->param_at(s);
            pts[i] = sa * std::cos(t) * e1 + sb * std::sin(t) * e2;
        }
        return DiscreteLoop(std::move(pts));
    };
    fam.seeds = {{0.0}};
    fam.free_dims = 1;
    fam.perturb = shift_params;
    fam.refine_step = {0.02};
    return fam;
}

GeodesicFamily torus_equator(const std::string& id, double radius) {
    GeodesicFamily fam;
    fam.id = id;
    fam.param_names = {"phase"};
    fam.generate = [radius](std::span<const double> p, std::size_t n) {
        std::vector<Vec3> pts(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double t = theta(i, n) + p[0];
            pts[i] = {radius * std::cos(t), radius * std::sin(t), 0.0};
        }
        return DiscreteLoop(std::move(pts));
    };
    fam.seeds = {{0.0}};
    fam.free_dims = 1;
    fam.perturb = shift_params;
    fam.refine_step = {0.02};
    return fam;
}

GeodesicFamily torus_meridian(double major, double minor) {
    GeodesicFamily fam;
    fam.id = "meridian";
    fam.param_names = {"azimuth", "phase"};
    fam.generate = [major, minor](std::span<const double> p, std::size_t n) {
        const Vec3 radial{std::cos(p[0]), std::sin(p[0]), 0.0};
        std::vector<Vec3> pts(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double t = theta(i, n) + p[1];
            pts[i] = (major + minor * std::cos(t)) * radial + Vec3{0.0, 0.0, minor * std::sin(t)};
        }
        return DiscreteLoop(std::move(pts));
    };
    constexpr std::size_t kAzimuths = 64;
    for (std::size_t k = 0; k < kAzimuths; ++k) fam.seeds.push_back({theta(k, kAzimuths), 0.0});
    fam.free_dims = 2;
    fam.perturb = shift_params;
    fam.refine_step = {kPi / kAzimuths, 0.02};
    return fam;
}

// Nelder-Mead over R^d starting at the origin.
std::vector<double> nelder_mead(const std::function<double(std::span<const double>)>& f, std::size_t d,
                                std::span<const double> step, double& best_value) {
    std::vector<std::vector<double>> x(d + 1, std::vector<double>(d, 0.0));
    for (std::size_t k = 0; k < d; ++k) x[k + 1][k] = step[k];
    std::vector<double> fx(d + 1);
    for (std::size_t k = 0; k <= d; ++k) fx[k] = f(x[k]);

    auto blend = [&](const std::vector<double>& a, const std::vector<double>& b, double t) {
        std::vector<double> out(d);
        for (std::size_t k = 0; k < d; ++k) out[k] = a[k] + t * (b[k] - a[k]);
        return out;
    };

    std::vector<std::size_t> order(d + 1);
    for (int iter = 0; iter < 400; ++iter) {
        for (std::size_t k = 0; k <= d; ++k) order[k] = k;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fx[a] < fx[b]; });
        const std::size_t lo = order.front();
        const std::size_t hi = order.back();
        const std::size_t second = order[d - 1];

        double diameter = 0.0;
        for (std::size_t k = 0; k <= d; ++k) {
            for (std::size_t c = 0; c < d; ++c) diameter = std::max(diameter, std::abs(x[k][c] - x[lo][c]));
        }
        if (fx[hi] - fx[lo] <= 1e-15 * (1.0 + std::abs(fx[lo])) && diameter < 1e-12) break;
        if (diameter < 1e-14) break;

        std::vector<double> centroid(d, 0.0);
        for (std::size_t k = 0; k <= d; ++k) {
            if (k == hi) continue;
            for (std::size_t c = 0; c < d; ++c) centroid[c] += x[k][c] / static_cast<double>(d);
        }
        const auto reflected = blend(centroid, x[hi], -1.0);
        const double fr = f(reflected);
        if (fr < fx[lo]) {
            const auto expanded = blend(centroid, x[hi], -2.0);
            const double fe = f(expanded);
            if (fe < fr) {
                x[hi] = expanded;
                fx[hi] = fe;
            } else {
                x[hi] = reflected;
                fx[hi] = fr;
            }
        } else if (fr < fx[second]) {
            x[hi] = reflected;
            fx[hi] = fr;
        } else {
            const bool outside = fr < fx[hi];
            const auto contracted = outside ? blend(centroid, reflected, 0.5) : blend(centroid, x[hi], 0.5);
            const double fc = f(contracted);
            if (fc < std::min(fr, fx[hi])) {
                x[hi] = contracted;
                fx[hi] = fc;
            } else {
                for (std::size_t k = 0; k <= d; ++k) {
                    if (k == lo) continue;
                    x[k] = blend(x[lo], x[k], 0.5);
                    fx[k] = f(x[k]);
                }
            }
        }
    }
    const auto best = std::min_element(fx.begin(), fx.end()) - fx.begin();
    best_value = fx[static_cast<std::size_t>(best)];
    return x[static_cast<std::size_t>(best)];
}

struct FamilyMatch {
    std::vector<double> params;
    Alignment alignment;
};

FamilyMatch best_in_family(const DiscreteLoop& loop, const GeodesicFamily& fam) {
    const std::size_t n = loop.size();
    FamilyMatch best{{}, {0, false, std::numeric_limits<double>::infinity()}};
    for (const auto& seed : fam.seeds) {
        const Alignment al = align_cyclic(fam.generate(seed, n), loop);
        if (al.distance < best.alignment.distance) best = {seed, al};
    }

    if (fam.fit) {
        for (int iter = 0; iter < 8; ++iter) {
            auto params = fam.fit(loop, best.params, best.alignment);
            const Alignment al = align_cyclic(fam.generate(params, n), loop);
            if (!(al.distance < best.alignment.distance)) break;
            best = {std::move(params), al};
        }
    }

    if (fam.free_dims > 0 && fam.perturb) {
        for (int restart = 0; restart < 3; ++restart) {
            const std::vector<double> base = best.params;
            auto objective = [&](std::span<const double> delta) {
                return align_cyclic(fam.generate(fam.perturb(base, delta), n), loop).distance;
            };
            double value = 0.0;
            const auto delta = nelder_mead(objective, fam.free_dims, fam.refine_step, value);
            if (!(value < best.alignment.distance)) break;
            auto params = fam.perturb(base, delta);
            best = {params, align_cyclic(fam.generate(params, n), loop)};
        }
    }
    return best;
}

}  // namespace

std::vector<Vec3> fibonacci_sphere(std::size_t n) {
    std::vector<Vec3> out(n);
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (std::size_t i = 0; i < n; ++i) {
        const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(n);
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double a = golden * static_cast<double>(i);
        out[i] = {r * std::cos(a), r * std::sin(a), z};
    }
    return out;
}

GeodesicCatalog GeodesicCatalog::for_manifold(const ManifoldDescriptor& m) {
    std::vector<GeodesicFamily> fams;
    if (std::holds_alternative<UnitSphere>(m.shape())) {
        fams.push_back(great_circle_family());
    } else if (const auto* e = std::get_if<Ellipsoid>(&m.shape())) {
        fams.push_back(principal_ellipse("ellipse_xy", e->a, 0, e->b, 1));
        fams.push_back(principal_ellipse("ellipse_xz", e->a, 0, e->c, 2));
        fams.push_back(principal_ellipse("ellipse_yz", e->b, 1, e->c, 2));
    } else if (const auto* t = std::get_if<Torus>(&m.shape())) {
        fams.push_back(torus_meridian(t->major, t->minor));
        fams.push_back(torus_equator("outer_equator", t->major + t->minor));
        fams.push_back(torus_equator("inner_equator", t->major - t->minor));
    }
    return GeodesicCatalog(std::move(fams));
}

const GeodesicFamily& GeodesicCatalog::family(const std::string& id) const {
    for (const auto& f : families_) {
        if (f.id == id) return f;
    }
    throw Error(ErrorCode::InvalidParameter, "no catalog entry named '" + id + "'");
}

double distance_to_member(const DiscreteLoop& loop, const GeodesicFamily& family, std::span<const double> params) {
    return align_cyclic(family.generate(params, loop.size()), loop).distance;
}

CatalogMatch dist_to_catalog(const DiscreteLoop& loop, const GeodesicCatalog& catalog, const ManifoldDescriptor& m) {
    if (catalog.empty()) throw Error(ErrorCode::EmptyCatalog, "geodesic catalog for the " + m.name() + " is empty");
    require_on_manifold(loop, m, 1e-8);
    CatalogMatch best;
    best.c1_distance = std::numeric_limits<double>::infinity();
    for (const auto& fam : catalog.families()) {
        FamilyMatch fm = best_in_family(loop, fam);
        if (fm.alignment.distance < best.c1_distance) {
            best = {fam.id, std::move(fm.params), fm.alignment.distance, fm.alignment};
        }
    }
    return best;
}

Classification classify(const FlowReport& report) {
    const double e = energy(report.final_state.curve);
    if (e < report.params.stop_energy) return Classification::CollapsedToPoint;
    if (report.termination == Termination::VelocityConverged) return Classification::ConvergedToGeodesic;
    return Classification::Undetermined;
}

std::vector<GeodesicAudit> near_max_audit(const Sweepout& sw, std::span<const FlowReport> reports, double delta,
                                          const GeodesicCatalog& catalog, const ManifoldDescriptor& m) {
    if (!(delta > 0.0)) throw Error(ErrorCode::InvalidParameter, "audit delta must be positive");
    if (!reports.empty() && reports.size() != sw.size()) {
        throw Error(ErrorCode::InvalidParameter, "need one flow report per slice");
    }
    const auto energies = slice_energies(sw);
    const MaxEnergy top = max_energy(sw);

    std::vector<std::size_t> selected;
    for (std::size_t j = 0; j < sw.size(); ++j) {
        if (energies[j] >= top.energy - delta && !sw.slices()[j].is_point_loop(kPointLoopTol)) selected.push_back(j);
    }
    if (selected.empty()) selected.push_back(top.index);

    std::vector<GeodesicAudit> out(selected.size());
    parallel_for(selected.size(), [&](std::size_t k) {
        const std::size_t j = selected[k];
        const DiscreteLoop& slice = sw.slices()[j];
        GeodesicAudit& a = out[k];
        a.slice_index = j;
        a.s = sw.s_values()[j];
        a.energy = energies[j];
        const Residual r = residual(slice, m);
        a.residual_sup = r.sup;
        a.residual_l2 = r.l2;
        CatalogMatch match = dist_to_catalog(slice, catalog, m);
        a.match_id = std::move(match.entry_id);
        a.match_params = std::move(match.params);
        a.c1_distance = match.c1_distance;
        if (!reports.empty()) a.classification = classify(reports[j]);
    });
    return out;
}

}  // namespace geoflow
