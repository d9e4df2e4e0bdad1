#pragma once

// One-parameter families of loops s -> sigma(s, .) over s in [-1, 1] whose end slices
// are point loops, and their tightening by the flow.

#include "geoflow/curve.hpp"
#include "geoflow/flow.hpp"
#include "geoflow/geodesic_audit.hpp"
#include "geoflow/manifold.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace geoflow {

inline constexpr double kPointLoopTol = 1e-12;

class GeodesicCatalog;

class Sweepout {
public:
    Sweepout() = default;

    /// Throws InvalidSweepout unless s runs strictly increasing from -1 to 1, there is one
    /// slice per parameter, all slices share one resolution and both end slices are point loops.
    Sweepout(std::vector<double> s_values, std::vector<DiscreteLoop> slices, double time = 0.0);

    const std::vector<double>& s_values() const { return s_values_; }
    const std::vector<DiscreteLoop>& slices() const { return slices_; }
    std::size_t size() const { return slices_.size(); }
    std::size_t resolution() const { return slices_.empty() ? 0 : slices_.front().size(); }

    /// Flow time the slices have been tightened for.
    double time() const { return time_; }

    friend bool operator==(const Sweepout&, const Sweepout&) = default;

private:
    std::vector<double> s_values_;
    std::vector<DiscreteLoop> slices_;
    double time_ = 0.0;
};

/// n_slices latitude circles about the given coordinate axis (0, 1, 2), spaced uniformly in
/// the polar angle, s uniform in [-1, 1]. The end slices are the poles.
/// Sphere and ellipsoid only; throws UnsupportedManifold for the torus.
Sweepout latitude_sweepout(const ManifoldDescriptor& m, std::size_t n_slices, std::size_t n_points, int axis = 2);

struct MaxEnergy {
    std::size_t index = 0;
    double s = 0.0;
    double energy = 0.0;
};

/// Slice of largest energy; the first one on ties.
MaxEnergy max_energy(const Sweepout& sw);

std::vector<double> slice_energies(const Sweepout& sw);

struct TightenResult {
    Sweepout sweepout;
    std::vector<FlowReport> reports;
    /// h1_distance of every slice from its state before tightening.
    std::vector<double> displacement;
};

/// Runs every slice for a further `duration` of flow time. The number of steps is
/// round((t0 + duration) / dt) - round(t0 / dt), so successive calls compose exactly.
/// End slices are copied unchanged. Flow errors are rethrown tagged with the slice index.
TightenResult tighten(const Sweepout& sw, const ManifoldDescriptor& m, double duration, const FlowParams& p);

struct ContinuityReport {
    /// gaps[j] = h1_distance(slice j, slice j + 1)
    std::vector<double> gaps;
    /// Bound applied to each adjacent pair.
    std::vector<double> bounds;
    double max_gap = 0.0;
    std::size_t max_gap_index = 0;
    /// Pairs j with gaps[j] > bounds[j].
    std::vector<std::size_t> violations;
    bool passed = true;
};

ContinuityReport continuity_audit(const Sweepout& sw, double gap_bound);

/// Variant for tightened sweepouts: pair j may reach gap_bound + displacement[j] + displacement[j + 1].
ContinuityReport continuity_audit(const Sweepout& sw, double gap_bound, std::span<const double> displacement);

/// Drops of the max slice energy below this count as a plateau.
inline constexpr double kPlateauDrop = 1e-6;

struct WidthReport {
    std::vector<double> times;
    std::vector<double> max_energies;
    std::vector<double> argmax_s;
    /// Largest raw adjacent-slice H1 gap at each time.
    std::vector<double> max_gaps;
    /// Continuity audit with the displacement-relaxed bound at each time.
    std::vector<bool> continuity_passed;
    /// Largest per-slice H1 displacement over windows of length <= displacement_window
    /// during the segment ending at each time (0 at the initial time).
    std::vector<double> max_window_displacement;
    double plateau_estimate = 0.0;
    bool plateau = false;
    bool non_increasing = true;
    std::vector<GeodesicAudit> near_max_audit;

    friend bool operator==(const WidthReport&, const WidthReport&) = default;
};

struct WidthOptions {
    double gap_bound = 0.5;
    double delta = 0.05;
    /// Catalog for the near-max audit of the final state; no audit when null.
    const GeodesicCatalog* catalog = nullptr;
    /// Called after each schedule time with the tightened state and the schedule index.
    std::function<void(const Sweepout&, const TightenResult&, std::size_t)> on_checkpoint;
};

/// Tightens cumulatively through the increasing schedule of absolute times, recording the
/// max slice energy at the start and after every time. Schedule times not beyond sw.time()
/// are skipped, which is how a run resumes from a checkpoint.
WidthReport width_estimate(const Sweepout& sw, const ManifoldDescriptor& m, std::span<const double> schedule,
                           const FlowParams& p, const WidthOptions& options = {});

}  // namespace geoflow
