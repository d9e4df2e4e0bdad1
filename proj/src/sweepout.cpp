#include "geoflow/sweepout.hpp"

#include "geoflow/error.hpp"
#include "geoflow/geodesy.hpp"
#include "geoflow/parallel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace geoflow {
namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::InvalidSweepout, what); }

}  // namespace

Sweepout::Sweepout(std::vector<double> s_values, std::vector<DiscreteLoop> slices, double time)
    : s_values_(std::move(s_values)), slices_(std::move(slices)), time_(time) {
    if (slices_.size() < 2) invalid("a sweepout needs at least two slices");
    if (s_values_.size() != slices_.size()) {
        invalid("got " + std::to_string(s_values_.size()) + " parameters for " + std::to_string(slices_.size()) +
                " slices");
    }
    if (s_values_.front() != -1.0 || s_values_.back() != 1.0) invalid("parameters must run from -1 to 1");
    for (std::size_t j = 1; j < s_values_.size(); ++j) {
        if (!(s_values_[j] > s_values_[j - 1])) invalid("parameters must be strictly increasing");
    }
    const std::size_t n = slices_.front().size();
    for (std::size_t j = 0; j < slices_.size(); ++j) {
        if (slices_[j].size() != n) invalid("slice " + std::to_string(j) + " has a different resolution");
    }
    if (!slices_.front().is_point_loop(kPointLoopTol) || !slices_.back().is_point_loop(kPointLoopTol)) {
        invalid("end slices must be point loops");
    }
    if (!(time_ >= 0.0)) invalid("sweepout time must be non-negative");
}

Sweepout latitude_sweepout(const ManifoldDescriptor& m, std::size_t n_slices, std::size_t n_points, int axis) {
    if (m.kind() == ManifoldKind::Torus) {
        throw Error(ErrorCode::UnsupportedManifold, "latitude sweepouts need a manifold homeomorphic to the sphere");
    }
    if (n_slices < 3) throw Error(ErrorCode::InvalidParameter, "a latitude sweepout needs at least 3 slices");
    if (axis < 0 || axis > 2) throw Error(ErrorCode::InvalidParameter, "axis must be 0, 1 or 2");

    std::array<double, 3> semi{1.0, 1.0, 1.0};
    if (const auto* e = std::get_if<Ellipsoid>(&m.shape())) semi = {e->a, e->b, e->c};

    const auto k = static_cast<std::size_t>(axis);
    const std::size_t i1 = (k + 1) % 3;
    const std::size_t i2 = (k + 2) % 3;
    const std::size_t last = n_slices - 1;
    const double pi = std::numbers::pi;

    std::vector<double> s(n_slices);
    std::vector<DiscreteLoop> slices;
    slices.reserve(n_slices);
    for (std::size_t j = 0; j < n_slices; ++j) {
        s[j] = j == last ? 1.0 : -1.0 + 2.0 * static_cast<double>(j) / static_cast<double>(last);
        // Polar angle from the +axis pole is pi (1 - j / last); this form is exact at the middle.
        const double arg = pi * (static_cast<double>(last) - 2.0 * static_cast<double>(j)) / (2.0 * static_cast<double>(last));
        const double height = j == 0 ? -1.0 : (j == last ? 1.0 : -std::sin(arg));
        const double radius = (j == 0 || j == last) ? 0.0 : std::cos(arg);

        std::vector<Vec3> pts(n_points);
        for (std::size_t i = 0; i < n_points; ++i) {
            const double th = 2.0 * pi * static_cast<double>(i) / static_cast<double>(n_points);
            std::array<double, 3> c{};
            c[k] = semi[k] * height;
            c[i1] = semi[i1] * radius * std::cos(th);
            c[i2] = semi[i2] * radius * std::sin(th);
            pts[i] = {c[0], c[1], c[2]};
        }
        DiscreteLoop loop(std::move(pts));
        require_on_manifold(loop, m);
        slices.push_back(std::move(loop));
    }
    return Sweepout(std::move(s), std::move(slices));
}

std::vector<double> slice_energies(const Sweepout& sw) {
    std::vector<double> out;
    out.reserve(sw.size());
    for (const auto& slice : sw.slices()) out.push_back(energy(slice));
    return out;
}

MaxEnergy max_energy(const Sweepout& sw) {
    MaxEnergy best{0, sw.s_values().empty() ? 0.0 : sw.s_values().front(), -1.0};
    const auto energies = slice_energies(sw);
    for (std::size_t j = 0; j < energies.size(); ++j) {
        if (energies[j] > best.energy) best = {j, sw.s_values()[j], energies[j]};
    }
    if (best.energy < 0.0) best.energy = 0.0;
    return best;
}

namespace {

TightenResult tighten_until(const Sweepout& sw, const ManifoldDescriptor& m, double target, const FlowParams& p) {
    if (!(target >= sw.time())) throw Error(ErrorCode::InvalidParameter, "tightening cannot run backwards in time");
    validate(p, sw.resolution());

    const long long k0 = std::llround(sw.time() / p.dt);
    const long long k1 = std::llround(target / p.dt);
    const auto steps = static_cast<std::size_t>(std::max(0LL, k1 - k0));

    const std::size_t n = sw.size();
    TightenResult out;
    out.reports.resize(n);
    out.displacement.assign(n, 0.0);
    std::vector<DiscreteLoop> slices(n);

    parallel_for(n, [&](std::size_t j) {
        const DiscreteLoop& slice = sw.slices()[j];
        FlowParams q = p;
        const bool endpoint = j == 0 || j + 1 == n;
        q.max_steps = endpoint ? 0 : steps;
        try {
            out.reports[j] = run_from(FlowState{slice, sw.time(), static_cast<std::size_t>(k0)}, m, q);
        } catch (const Error& e) {
            throw e.with_slice(j);
        }
        slices[j] = endpoint ? slice : out.reports[j].final_state.curve;
        out.displacement[j] = h1_distance(slice, slices[j]);
    });

    out.sweepout = Sweepout(sw.s_values(), std::move(slices), target);
    return out;
}

}  // namespace

TightenResult tighten(const Sweepout& sw, const ManifoldDescriptor& m, double duration, const FlowParams& p) {
    if (!(duration >= 0.0)) throw Error(ErrorCode::InvalidParameter, "tightening duration must be non-negative");
    return tighten_until(sw, m, sw.time() + duration, p);
}

ContinuityReport continuity_audit(const Sweepout& sw, double gap_bound) {
    const std::vector<double> zero(sw.size(), 0.0);
    return continuity_audit(sw, gap_bound, zero);
}

ContinuityReport continuity_audit(const Sweepout& sw, double gap_bound, std::span<const double> displacement) {
    if (displacement.size() != sw.size()) {
        throw Error(ErrorCode::InvalidParameter, "need one displacement per slice");
    }
    ContinuityReport out;
    for (std::size_t j = 0; j + 1 < sw.size(); ++j) {
        const double gap = h1_distance(sw.slices()[j], sw.slices()[j + 1]);
        const double bound = gap_bound + displacement[j] + displacement[j + 1];
        out.gaps.push_back(gap);
        out.bounds.push_back(bound);
        if (gap > out.max_gap) {
            out.max_gap = gap;
            out.max_gap_index = j;
        }
        if (!(gap <= bound)) out.violations.push_back(j);
    }
    out.passed = out.violations.empty();
    return out;
}

WidthReport width_estimate(const Sweepout& sw, const ManifoldDescriptor& m, std::span<const double> schedule,
                           const FlowParams& p, const WidthOptions& options) {
    for (std::size_t k = 1; k < schedule.size(); ++k) {
        if (!(schedule[k] > schedule[k - 1])) throw Error(ErrorCode::InvalidParameter, "schedule must be increasing");
    }
    if (!schedule.empty() && !(schedule.front() > 0.0)) {
        throw Error(ErrorCode::InvalidParameter, "schedule times must be positive");
    }

    WidthReport report;
    auto record = [&](const Sweepout& state, bool continuity_ok, double max_gap, double window) {
        const MaxEnergy best = max_energy(state);
        report.times.push_back(state.time());
        report.max_energies.push_back(best.energy);
        report.argmax_s.push_back(best.s);
        report.max_gaps.push_back(max_gap);
        report.continuity_passed.push_back(continuity_ok);
        report.max_window_displacement.push_back(window);
    };

    const ContinuityReport initial = continuity_audit(sw, options.gap_bound);
    record(sw, initial.passed, initial.max_gap, 0.0);

    Sweepout current = sw;
    std::vector<FlowReport> last_reports;
    for (std::size_t k = 0; k < schedule.size(); ++k) {
        if (!(schedule[k] > current.time())) continue;
        TightenResult step = tighten_until(current, m, schedule[k], p);

        std::vector<double> moved(step.sweepout.size());
        for (std::size_t j = 0; j < moved.size(); ++j) moved[j] = h1_distance(sw.slices()[j], step.sweepout.slices()[j]);
        const ContinuityReport audit = continuity_audit(step.sweepout, options.gap_bound, moved);

        double window = 0.0;
        for (const auto& r : step.reports) window = std::max(window, r.max_window_displacement);
        record(step.sweepout, audit.passed, audit.max_gap, window);

        if (options.on_checkpoint) options.on_checkpoint(step.sweepout, step, k);
        current = std::move(step.sweepout);
        last_reports = std::move(step.reports);
    }

    const std::size_t count = report.max_energies.size();
    const double tol = 1e-9 * (1.0 + report.max_energies.front());
    for (std::size_t k = 1; k < count; ++k) {
        if (report.max_energies[k] > report.max_energies[k - 1] + tol) report.non_increasing = false;
    }
    report.plateau_estimate = report.max_energies.back();
    report.plateau = count >= 2 && report.max_energies[count - 2] - report.max_energies[count - 1] < kPlateauDrop;

    if (options.catalog != nullptr) {
        report.near_max_audit = near_max_audit(current, last_reports, options.delta, *options.catalog, m);
    }
    return report;
}

}  // namespace geoflow
