#pragma once

// Discrete harmonic map heat flow u_t = u_thth - A_u(u_th, u_th) for closed
// curves on an implicit surface, and the per-step diagnostics recorded while
// integrating it.

#include "geoflow/curve.hpp"
#include "geoflow/cyclic_tridiagonal.hpp"
#include "geoflow/manifold.hpp"

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

namespace geoflow {

enum class Scheme { Explicit, SemiImplicit };

std::string_view to_string(Scheme s);
std::optional<Scheme> parse_scheme(std::string_view s);

/// Largest explicit time step, as a multiple of dtheta^2.
inline constexpr double kExplicitStabilityFactor = 0.4;

struct FlowParams {
    double dt = 1e-3;
    Scheme scheme = Scheme::SemiImplicit;
    std::size_t max_steps = 1000;
    /// Stop once sup_i |u_t| falls to this value.
    double stop_velocity_sup = 1e-8;
    /// Stop once the energy falls below this value (collapse to a point).
    double stop_energy = 1e-8;
    /// Required |f| after the post-step projection.
    double projection_tol = 1e-12;
    /// Record every trace_stride steps (the initial and final states are always recorded).
    std::size_t trace_stride = 1;
    /// When positive, track the largest H1 displacement of the curve over time
    /// windows of at most this length.
    double displacement_window = 0.0;

    friend bool operator==(const FlowParams&, const FlowParams&) = default;
};

/// Throws InvalidParameter or StabilityGuard when the parameters cannot be used at resolution n.
void validate(const FlowParams& p, std::size_t n);

struct FlowState {
    DiscreteLoop curve;
    double time = 0.0;
    std::size_t step_index = 0;

    friend bool operator==(const FlowState&, const FlowState&) = default;
};

/// Columnar per-record diagnostics. Entry k describes the state at time[k];
/// dissipation[k] and grad_step_increase[k] cover the steps since record k-1.
struct FlowTrace {
    std::vector<double> time;
    std::vector<double> energy;
    std::vector<double> sup_grad_sq;         // sup |u_th|^2 (forward differences)
    std::vector<double> sup_vel_sq;          // sup |u_t|^2
    std::vector<double> vel_l2;              // int |u_t|^2 dth
    std::vector<double> dissipation;         // int int |u_t|^2 dth dt, trapezoidal in time
    std::vector<double> utt_l2;              // int |u_thth|^2 dth
    std::vector<double> utt_time_integral;   // int_0^t int |u_thth|^2 dth dt (cumulative)
    std::vector<double> grad_step_increase;  // largest single-step increase of sup |u_th|^2

    /// sup_M |A|^2 estimate of the manifold the trace was produced on.
    double curvature_bound_sq = 0.0;
    /// Segment length R0 on the initial curve (see segment_radius).
    double segment_radius = 0.0;

    std::size_t size() const { return time.size(); }
    friend bool operator==(const FlowTrace&, const FlowTrace&) = default;
};

enum class Termination { VelocityConverged, PointCollapsed, MaxSteps };

std::string_view to_string(Termination t);
std::optional<Termination> parse_termination(std::string_view s);

struct FlowReport {
    FlowParams params;
    FlowState final_state;
    FlowTrace trace;
    Termination termination = Termination::MaxSteps;
    double initial_energy = 0.0;
    /// Largest single-step energy increase (should be <= 0 up to rounding).
    double max_energy_increase = 0.0;
    /// Largest H1 displacement over any window of length <= params.displacement_window.
    double max_window_displacement = 0.0;
};

/// Tangential velocity v_i = P_T[(p_{i+1} - 2 p_i + p_{i-1}) / dth^2 - A_{p_i}(d_i, d_i)],
/// d_i the tangent-projected central difference.
std::vector<Vec3> velocity_field(const DiscreteLoop& curve, const ManifoldDescriptor& m);
std::vector<Vec3> velocity_field(const FlowState& state, const ManifoldDescriptor& m);

/// Reusable integrator for one manifold, parameter set and resolution.
/// Holds the factorized implicit operator; not shared between threads.
class FlowStepper {
public:
    FlowStepper(const ManifoldDescriptor& m, const FlowParams& p, std::size_t n);

    /// Quantities of one state needed by the integrator and the trace.
    struct Metrics {
        double energy = 0.0;
        double sup_grad_sq = 0.0;
        double sup_vel_sq = 0.0;
        double vel_l2 = 0.0;
        double utt_l2 = 0.0;
        std::vector<double> normal_force;  // A_{p_i}(d_i, d_i), interleaved
        std::vector<double> velocity;      // interleaved
    };

    Metrics evaluate(const DiscreteLoop& curve) const;

    /// One step from `state`; `metrics` must be evaluate(state.curve).
    FlowState advance(const FlowState& state, const Metrics& metrics) const;
    FlowState advance(const FlowState& state) const { return advance(state, evaluate(state.curve)); }

    const FlowParams& params() const { return params_; }

private:
    ManifoldDescriptor manifold_;
    FlowParams params_;
    std::size_t n_;
    std::optional<CyclicTridiagonal> implicit_;
};

/// One step of the configured scheme followed by projection onto M.
FlowState step(const FlowState& state, const ManifoldDescriptor& m, const FlowParams& p);

/// Integrates until sup |u_t| <= stop_velocity_sup, E < stop_energy, or max_steps.
FlowReport run(const DiscreteLoop& u0, const ManifoldDescriptor& m, const FlowParams& p);

/// Continues an existing state, e.g. a sweepout slice at a checkpoint time.
FlowReport run_from(const FlowState& start, const ManifoldDescriptor& m, const FlowParams& p);

/// |E(t1) - E(t2) - sum of dissipation over records (i1, i2]|.
double energy_identity_residual(const FlowTrace& trace, std::size_t i1, std::size_t i2);

struct GradBoundCheck {
    /// max over records with t > 0 of sup|u_th|^2 * t / E0 (0 when E0 = 0).
    double worst_ratio = 0.0;
    /// Largest single-step increase of sup|u_th|^2 over the whole run.
    double max_step_increase = 0.0;
};

GradBoundCheck grad_bound_check(const FlowTrace& trace, double initial_energy);

struct DecayRecord {
    double time = 0.0;
    /// int|u_thth|^2 / (int|u_t|^2 + t^{-1} sup|A|^2 E0^2)
    double second_derivative_ratio = 0.0;
    /// int_0^t int|u_thth|^2 / (t E0 / (4 R0^2) + 2 (E0 - E(t)))
    double cumulative_ratio = 0.0;
    /// sup|u_t|^2(t) / (E(t/2) - E(t)); 0 when both vanish, +inf when only the denominator does.
    double velocity_ratio = 0.0;
};

struct DecayReport {
    std::vector<DecayRecord> records;  // records with t > 0
    double max_second_derivative_ratio = 0.0;
    double max_cumulative_ratio = 0.0;
    double max_velocity_ratio = 0.0;
};

DecayReport decay_diagnostics(const FlowTrace& trace);

/// Largest segment length R0 with sqrt(2 pi) sup|A|^2 int_{I_R0} |u_th|^2 < 1/16 for every
/// parameter segment of that length (whole cells, or a fraction of one cell when even a
/// single cell violates the bound). Capped at 2 pi.
double segment_radius(const DiscreteLoop& curve, double curvature_bound_sq);

struct StabilityReport {
    std::vector<double> time;
    std::vector<double> l2;  // l2_distance(u(t), u~(t))
    std::vector<double> h1;  // h1_distance(u(t), u~(t))
    /// sup_t l2(t) / l2(0), with 0/0 read as 0.
    double max_growth = 0.0;
    double max_h1 = 0.0;
    bool bit_identical = false;
};

/// Integrates both initial curves for p.max_steps steps (no early stopping) and compares them.
StabilityReport stability_probe(const DiscreteLoop& u0, const DiscreteLoop& v0, const ManifoldDescriptor& m,
                                const FlowParams& p);

}  // namespace geoflow
