#pragma once

// Closed geodesics: residuals, catalogs of known geodesic families on the built-in
// manifolds, distance to those families and the audit of near-maximal sweepout slices.

#include "geoflow/curve.hpp"
#include "geoflow/flow.hpp"
#include "geoflow/geodesic_audit.hpp"
#include "geoflow/manifold.hpp"
#include "geoflow/sweepout.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace geoflow {

struct Residual {
    double sup = 0.0;
    double l2 = 0.0;
};

/// Discrete geodesic defect r_i = (p_{i+1} - 2 p_i + p_{i-1}) / dth^2 - A_{p_i}(d_i, d_i), d_i the
/// tangent-projected central difference. Its tangential part is the tension field; the normal
/// part is the consistency error of the difference quotients. Returns sup_i |r_i| and
/// (sum_i |r_i|^2 dth)^{1/2}.
Residual residual(const DiscreteLoop& loop, const ManifoldDescriptor& m);

/// A continuous family of closed geodesics, sampled at any resolution.
struct GeodesicFamily {
    std::string id;
    std::vector<std::string> param_names;
    std::function<DiscreteLoop(std::span<const double> params, std::size_t n)> generate;
    /// Starting points of the parameter search.
    std::vector<std::vector<double>> seeds;

    /// Local chart for refinement: params for base moved by delta (delta.size() == free_dims).
    std::size_t free_dims = 0;
    std::function<std::vector<double>(std::span<const double> base, std::span<const double> delta)> perturb;
    /// Initial simplex edge per free dimension.
    std::vector<double> refine_step;

    /// Optional least-squares fit of the params to `target` given the current alignment.
    std::function<std::vector<double>(const DiscreteLoop& target, std::span<const double> params,
                                      const Alignment& alignment)>
        fit;
};

class GeodesicCatalog {
public:
    GeodesicCatalog() = default;
    explicit GeodesicCatalog(std::vector<GeodesicFamily> families) : families_(std::move(families)) {}

    /// Sphere: great circles. Ellipsoid: the three principal ellipses at constant speed.
    /// Torus: meridians and the inner and outer equators.
    static GeodesicCatalog for_manifold(const ManifoldDescriptor& m);

    const std::vector<GeodesicFamily>& families() const { return families_; }
    const GeodesicFamily& family(const std::string& id) const;
    bool empty() const { return families_.empty(); }

private:
    std::vector<GeodesicFamily> families_;
};

/// Fibonacci lattice of n unit vectors.
std::vector<Vec3> fibonacci_sphere(std::size_t n);

struct CatalogMatch {
    std::string entry_id;
    std::vector<double> params;
    double c1_distance = 0.0;
    Alignment alignment;
};

/// Smallest aligned C1 distance from `loop` to a catalog member: a search over every family's
/// seeds followed by local refinement of the best seed. Throws EmptyCatalog.
CatalogMatch dist_to_catalog(const DiscreteLoop& loop, const GeodesicCatalog& catalog, const ManifoldDescriptor& m);

/// Aligned C1 distance to the family member with exactly these params (no search).
double distance_to_member(const DiscreteLoop& loop, const GeodesicFamily& family, std::span<const double> params);

Classification classify(const FlowReport& report);

/// Audits every slice with energy >= (max slice energy) - delta, point loops excluded unless
/// the maximal slice is one. `reports` may be empty; otherwise it holds one report per slice and
/// each audit carries the classification of its slice.
std::vector<GeodesicAudit> near_max_audit(const Sweepout& sw, std::span<const FlowReport> reports, double delta,
                                          const GeodesicCatalog& catalog, const ManifoldDescriptor& m);

}  // namespace geoflow
