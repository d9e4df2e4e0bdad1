#include "geoflow/flow.hpp"

#include "geoflow/error.hpp"
#include "geoflow/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <string>

namespace geoflow {

std::string_view to_string(Scheme s) {
    switch (s) {
        case Scheme::Explicit: return "explicit";
        case Scheme::SemiImplicit: return "semi_implicit";
    }
    return "unknown";
}

std::optional<Scheme> parse_scheme(std::string_view s) {
    if (s == "explicit") return Scheme::Explicit;
    if (s == "semi_implicit") return Scheme::SemiImplicit;
    return std::nullopt;
}

std::string_view to_string(Termination t) {
    switch (t) {
        case Termination::VelocityConverged: return "velocity_converged";
        case Termination::PointCollapsed: return "point_collapsed";
        case Termination::MaxSteps: return "max_steps";
    }
    return "unknown";
}

std::optional<Termination> parse_termination(std::string_view s) {
    if (s == "velocity_converged") return Termination::VelocityConverged;
    if (s == "point_collapsed") return Termination::PointCollapsed;
    if (s == "max_steps") return Termination::MaxSteps;
    return std::nullopt;
}

void validate(const FlowParams& p, std::size_t n) {
    if (!(p.dt > 0.0) || !std::isfinite(p.dt)) throw Error(ErrorCode::InvalidParameter, "flow.dt must be positive");
    if (p.trace_stride == 0) throw Error(ErrorCode::InvalidParameter, "flow.trace_stride must be at least 1");
    if (!(p.projection_tol > 0.0)) throw Error(ErrorCode::InvalidParameter, "flow.projection_tol must be positive");
    if (p.stop_velocity_sup < 0.0 || p.stop_energy < 0.0) {
        throw Error(ErrorCode::InvalidParameter, "flow stopping thresholds must be non-negative");
    }
    if (p.displacement_window < 0.0) {
        throw Error(ErrorCode::InvalidParameter, "flow.displacement_window must be non-negative");
    }
    if (n < kMinLoopPoints) throw Error(ErrorCode::TooFewPoints, "flow needs at least 8 points");
    if (p.scheme == Scheme::Explicit) {
        const double h = 2.0 * std::numbers::pi / static_cast<double>(n);
        const double limit = kExplicitStabilityFactor * h * h;
        if (p.dt > limit * (1.0 + 1e-12)) {
            throw Error(ErrorCode::StabilityGuard, "explicit scheme needs dt <= 0.4 dtheta^2 = " + std::to_string(limit));
        }
    }
}

FlowStepper::FlowStepper(const ManifoldDescriptor& m, const FlowParams& p, std::size_t n)
    : manifold_(m), params_(p), n_(n) {
    validate(p, n);
    if (p.scheme == Scheme::SemiImplicit) {
        const double h = 2.0 * std::numbers::pi / static_cast<double>(n);
        const double r = p.dt / (h * h);
        implicit_.emplace(n, 1.0 + 2.0 * r, -r);
    }
}

FlowStepper::Metrics FlowStepper::evaluate(const DiscreteLoop& curve) const {
    if (curve.size() != n_) throw Error(ErrorCode::MismatchedResolution, "curve resolution does not match the stepper");
    const auto& k = kernels::active();
    const std::size_t len = curve.flat().size();
    const double h = curve.dtheta();

    std::vector<double> lap(len);
    std::vector<double> d(len);
    k.second_difference(curve.flat(), lap, 1.0 / (h * h));
    k.central_difference(curve.flat(), d, 0.5 / h);

    Metrics out;
    out.normal_force.resize(len);
    out.velocity.resize(len);
    for (std::size_t i = 0; i < n_; ++i) {
        const Vec3 p = curve.point(i);
        const Vec3 n = unit_normal(manifold_, p);
        Vec3 di{d[3 * i], d[3 * i + 1], d[3 * i + 2]};
        di -= dot(di, n) * n;
        const Vec3 a = second_fundamental_form(manifold_, p, di);
        Vec3 v = Vec3{lap[3 * i], lap[3 * i + 1], lap[3 * i + 2]} - a;
        v -= dot(v, n) * n;
        out.normal_force[3 * i] = a.x;
        out.normal_force[3 * i + 1] = a.y;
        out.normal_force[3 * i + 2] = a.z;
        out.velocity[3 * i] = v.x;
        out.velocity[3 * i + 1] = v.y;
        out.velocity[3 * i + 2] = v.z;
        out.sup_vel_sq = std::max(out.sup_vel_sq, norm_sq(v));
    }
    out.energy = energy(curve);
    out.sup_grad_sq = sup_grad_sq(curve);
    out.vel_l2 = k.sum_sq(out.velocity) * h;
    out.utt_l2 = k.sum_sq(lap) * h;
    return out;
}

FlowState FlowStepper::advance(const FlowState& state, const Metrics& metrics) const {
    const auto& k = kernels::active();
    const double dt = params_.dt;
    std::vector<double> next(state.curve.flat().size());
    if (params_.scheme == Scheme::SemiImplicit) {
        // (I - dt D^2) u+ = u - dt A_u(u_th, u_th)
        k.axpy(state.curve.flat(), -dt, metrics.normal_force, next);
        implicit_->solve_in_place(next, 3);
    } else {
        k.axpy(state.curve.flat(), dt, metrics.velocity, next);
    }

    const ProjectionOptions options{50, params_.projection_tol};
    std::vector<Vec3> projected(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        const Vec3 x{next[3 * i], next[3 * i + 1], next[3 * i + 2]};
        try {
            projected[i] = closest_point_project(manifold_, x, options);
        } catch (const Error& e) {
            throw Error(ErrorCode::ProjectionFailure, "step " + std::to_string(state.step_index) + ", point " +
                                                          std::to_string(i) + ": " + e.what() +
                                                          " (the curve left the tube; reduce dt)");
        }
    }
    return {DiscreteLoop(std::move(projected)), state.time + dt, state.step_index + 1};
}

std::vector<Vec3> velocity_field(const DiscreteLoop& curve, const ManifoldDescriptor& m) {
    const std::size_t n = curve.size();
    const auto lap = second_derivative(curve);
    const auto d = derivative(curve);
    std::vector<Vec3> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3 p = curve.point(i);
        const Vec3 di = tangent_project(m, p, d[i]);
        v[i] = tangent_project(m, p, lap[i] - second_fundamental_form(m, p, di));
    }
    return v;
}

std::vector<Vec3> velocity_field(const FlowState& state, const ManifoldDescriptor& m) {
    return velocity_field(state.curve, m);
}

FlowState step(const FlowState& state, const ManifoldDescriptor& m, const FlowParams& p) {
    return FlowStepper(m, p, state.curve.size()).advance(state);
}

namespace {

void append_record(FlowTrace& trace, double t, const FlowStepper::Metrics& mt, double dissipation,
                   double utt_integral, double grad_increase) {
    trace.time.push_back(t);
    trace.energy.push_back(mt.energy);
    trace.sup_grad_sq.push_back(mt.sup_grad_sq);
    trace.sup_vel_sq.push_back(mt.sup_vel_sq);
    trace.vel_l2.push_back(mt.vel_l2);
    trace.dissipation.push_back(dissipation);
    trace.utt_l2.push_back(mt.utt_l2);
    trace.utt_time_integral.push_back(utt_integral);
    trace.grad_step_increase.push_back(grad_increase);
}

}  // namespace

FlowReport run(const DiscreteLoop& u0, const ManifoldDescriptor& m, const FlowParams& p) {
    return run_from(FlowState{u0, 0.0, 0}, m, p);
}

FlowReport run_from(const FlowState& start, const ManifoldDescriptor& m, const FlowParams& p) {
    const FlowStepper stepper(m, p, start.curve.size());

    FlowReport report;
    report.params = p;
    report.trace.curvature_bound_sq = m.curvature_bound_sq();
    report.trace.segment_radius = segment_radius(start.curve, m.curvature_bound_sq());

    FlowState state = start;
    FlowStepper::Metrics metrics = stepper.evaluate(state.curve);
    report.initial_energy = metrics.energy;
    append_record(report.trace, state.time, metrics, 0.0, 0.0, 0.0);

    const std::size_t window_steps =
        p.displacement_window > 0.0 ? std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(p.displacement_window / p.dt))) : 0;
    std::deque<DiscreteLoop> window;
    if (window_steps > 0) window.push_back(state.curve);

    double dissipation = 0.0;
    double utt_integral = 0.0;
    double grad_increase = 0.0;
    bool pending = false;
    std::size_t steps_taken = 0;

    for (;;) {
        if (metrics.energy < p.stop_energy) {
            report.termination = Termination::PointCollapsed;
            break;
        }
        if (std::sqrt(metrics.sup_vel_sq) <= p.stop_velocity_sup) {
            report.termination = Termination::VelocityConverged;
            break;
        }
        if (steps_taken >= p.max_steps) {
            report.termination = Termination::MaxSteps;
            break;
        }

        FlowState next = stepper.advance(state, metrics);
        FlowStepper::Metrics next_metrics = stepper.evaluate(next.curve);
        ++steps_taken;

        dissipation += 0.5 * p.dt * (metrics.vel_l2 + next_metrics.vel_l2);
        utt_integral += 0.5 * p.dt * (metrics.utt_l2 + next_metrics.utt_l2);
        grad_increase = std::max(grad_increase, next_metrics.sup_grad_sq - metrics.sup_grad_sq);
        report.max_energy_increase = std::max(report.max_energy_increase, next_metrics.energy - metrics.energy);

        if (window_steps > 0) {
            for (const DiscreteLoop& earlier : window) {
                report.max_window_displacement = std::max(report.max_window_displacement, h1_distance(earlier, next.curve));
            }
            window.push_back(next.curve);
            if (window.size() > window_steps) window.pop_front();
        }

        state = std::move(next);
        metrics = std::move(next_metrics);
        pending = true;

        if (steps_taken % p.trace_stride == 0) {
            append_record(report.trace, state.time, metrics, dissipation, utt_integral, grad_increase);
            dissipation = 0.0;
            grad_increase = 0.0;
            pending = false;
        }
    }
    if (pending) append_record(report.trace, state.time, metrics, dissipation, utt_integral, grad_increase);

    report.final_state = std::move(state);
    return report;
}

double energy_identity_residual(const FlowTrace& trace, std::size_t i1, std::size_t i2) {
    if (!(i1 < i2) || i2 >= trace.size()) {
        throw Error(ErrorCode::InvalidParameter, "energy identity window needs i1 < i2 < trace size");
    }
    double dissipated = 0.0;
    for (std::size_t k = i1 + 1; k <= i2; ++k) dissipated += trace.dissipation[k];
    return std::abs(trace.energy[i1] - trace.energy[i2] - dissipated);
}

GradBoundCheck grad_bound_check(const FlowTrace& trace, double initial_energy) {
    GradBoundCheck out;
    for (std::size_t k = 0; k < trace.size(); ++k) {
        if (trace.time[k] > 0.0 && initial_energy > 0.0) {
            out.worst_ratio = std::max(out.worst_ratio, trace.sup_grad_sq[k] * trace.time[k] / initial_energy);
        }
        out.max_step_increase = std::max(out.max_step_increase, trace.grad_step_increase[k]);
    }
    return out;
}

namespace {

double energy_at(const FlowTrace& trace, double t) {
    const auto it = std::lower_bound(trace.time.begin(), trace.time.end(), t);
    if (it == trace.time.begin()) return trace.energy.front();
    if (it == trace.time.end()) return trace.energy.back();
    const auto hi = static_cast<std::size_t>(it - trace.time.begin());
    const std::size_t lo = hi - 1;
    const double w = (t - trace.time[lo]) / (trace.time[hi] - trace.time[lo]);
    return (1.0 - w) * trace.energy[lo] + w * trace.energy[hi];
}

double guarded_ratio(double num, double den) {
    if (den > 0.0) return num / den;
    return num > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

}  // namespace

DecayReport decay_diagnostics(const FlowTrace& trace) {
    DecayReport out;
    if (trace.size() == 0) return out;
    const double t0 = trace.time.front();
    const double e0 = trace.energy.front();
    const double a_sq = trace.curvature_bound_sq;
    const double r0 = trace.segment_radius;
    for (std::size_t k = 0; k < trace.size(); ++k) {
        const double t = trace.time[k] - t0;
        if (!(t > 0.0)) continue;
        DecayRecord rec;
        rec.time = trace.time[k];
        rec.second_derivative_ratio = guarded_ratio(trace.utt_l2[k], trace.vel_l2[k] + a_sq * e0 * e0 / t);
        const double cumulative_rhs = t * e0 / (4.0 * r0 * r0) + 2.0 * (e0 - trace.energy[k]);
        rec.cumulative_ratio = guarded_ratio(trace.utt_time_integral[k], cumulative_rhs);
        const double drop = energy_at(trace, t0 + 0.5 * t) - trace.energy[k];
        rec.velocity_ratio = guarded_ratio(trace.sup_vel_sq[k], drop);
        out.max_second_derivative_ratio = std::max(out.max_second_derivative_ratio, rec.second_derivative_ratio);
        out.max_cumulative_ratio = std::max(out.max_cumulative_ratio, rec.cumulative_ratio);
        out.max_velocity_ratio = std::max(out.max_velocity_ratio, rec.velocity_ratio);
        out.records.push_back(rec);
    }
    return out;
}

double segment_radius(const DiscreteLoop& curve, double curvature_bound_sq) {
    const std::size_t n = curve.size();
    const double h = curve.dtheta();
    const double full = 2.0 * std::numbers::pi;
    const double limit = 1.0 / 16.0;
    const double scale = std::sqrt(2.0 * std::numbers::pi) * curvature_bound_sq;
    if (scale == 0.0) return full;

    // Energy density of each cell: |u_th|^2 h with forward differences.
    std::vector<double> cell(n);
    for (std::size_t i = 0; i < n; ++i) cell[i] = norm_sq(curve.point((i + 1) % n) - curve.point(i)) / h;

    std::size_t best = 0;
    for (std::size_t len = 1; len <= n; ++len) {
        // Sliding maximum of len consecutive cells around the circle.
        double window = 0.0;
        for (std::size_t i = 0; i < len; ++i) window += cell[i];
        double worst = window;
        for (std::size_t start = 1; start < n; ++start) {
            window += cell[(start + len - 1) % n] - cell[start - 1];
            worst = std::max(worst, window);
        }
        if (!(scale * worst < limit)) break;
        best = len;
    }
    if (best == n) return full;
    if (best > 0) return static_cast<double>(best) * h;
    const double densest = *std::max_element(cell.begin(), cell.end());
    return h * limit / (scale * densest);
}

StabilityReport stability_probe(const DiscreteLoop& u0, const DiscreteLoop& v0, const ManifoldDescriptor& m,
                                const FlowParams& p) {
    if (u0.size() != v0.size()) throw Error(ErrorCode::MismatchedResolution, "stability probe needs equal resolutions");
    const FlowStepper stepper(m, p, u0.size());
    StabilityReport out;
    FlowState a{u0, 0.0, 0};
    FlowState b{v0, 0.0, 0};
    const double initial = l2_distance(u0, v0);
    bool identical = u0 == v0;

    auto record = [&]() {
        const double l2 = l2_distance(a.curve, b.curve);
        const double h1 = h1_distance(a.curve, b.curve);
        out.time.push_back(a.time);
        out.l2.push_back(l2);
        out.h1.push_back(h1);
        out.max_h1 = std::max(out.max_h1, h1);
        const double growth = initial > 0.0 ? l2 / initial : (l2 > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
        out.max_growth = std::max(out.max_growth, growth);
        identical = identical && a.curve == b.curve;
    };
    record();
    for (std::size_t s = 1; s <= p.max_steps; ++s) {
        a = stepper.advance(a);
        b = stepper.advance(b);
        if (s % p.trace_stride == 0 || s == p.max_steps) record();
    }
    out.bit_identical = identical;
    return out;
}

}  // namespace geoflow
