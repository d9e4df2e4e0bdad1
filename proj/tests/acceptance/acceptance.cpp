// Acceptance run: one PASS/FAIL line per criterion, then details.
//
// Exit status is 0 when every failing criterion is in kKnownRed (documented in the README),
// so a regression elsewhere, or a crash, still fails ctest.

#include "geoflow/cli/presets.hpp"
#include "geoflow/geodesy.hpp"
#include "geoflow/serialize.hpp"
#include "geoflow/sweepout.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <set>
#include <string>
#include <vector>

using namespace geoflow;

namespace {

constexpr double kPi = std::numbers::pi;
const std::set<int> kKnownRed = {2, 3};

struct Outcome {
    int id;
    std::string title;
    bool pass;
    std::vector<std::string> details;
    double seconds;
};

class Stopwatch {
public:
    double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

template <class... Args>
std::string fmt(const char* f, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// Every trace that feeds the gradient-bound check, with the energy of the curve it started from at t = 0.
struct TracedRun {
    std::string group;
    std::string label;
    FlowTrace trace;
    double e0;
};
std::vector<TracedRun> g_traces;

// Slices stopped early by the velocity test keep their state to the end of the segment but
// leave no trace records there; the ratio they would reach is reported separately.
struct Stationary {
    double ratio = 0.0;
    std::string where;
};
std::vector<std::pair<std::string, Stationary>> g_stationary;

void keep(const std::string& group, const std::string& label, const FlowTrace& trace, double e0) {
    g_traces.push_back({group, label, trace, e0});
}

FlowParams latitude_params(double dt, double t_end) {
    FlowParams p;
    p.dt = dt;
    p.max_steps = static_cast<std::size_t>(std::llround(t_end / dt));
    p.stop_velocity_sup = 0.0;
    p.stop_energy = 0.0;
    p.trace_stride = 1;
    return p;
}

FlowParams sweepout_params() {
    FlowParams p;  // dt = 1e-3, semi-implicit
    p.max_steps = 1u << 30;
    p.trace_stride = 1;
    p.displacement_window = 0.01;
    return p;
}

const std::vector<double> kSchedule = {0.5, 1.0, 2.0, 5.0};

// ---------------------------------------------------------------- 1 and 2

FlowReport g_latitude_run;

Outcome criterion1() {
    const auto s = ManifoldDescriptor::sphere();
    // the oracle itself, against the closed form, before it is trusted
    double oracle_err = 0.0;
    for (double t : {0.25, 0.5, 1.0}) {
        oracle_err = std::max(oracle_err, std::abs(oracle::latitude_energy(kPi / 4, t) - kPi / (1 + std::exp(2 * t))));
    }

    Stopwatch sw;
    g_latitude_run = run(oracle::latitude(kPi / 4, 256), s, latitude_params(1e-3, 1.0));
    const double secs = sw.seconds();
    keep("latitude", "pi/4, N=256, dt=1e-3", g_latitude_run.trace, g_latitude_run.initial_energy);

    Outcome o{1, "latitude ODE oracle", true, {}, secs};
    o.details.push_back(fmt("oracle check: |RK4 - closed form| = %.1e", oracle_err));
    double worst = 0.0;
    for (double t : {0.25, 0.5, 1.0}) {
        const auto k = oracle::nearest_record(g_latitude_run.trace.time, t);
        const double e = g_latitude_run.trace.energy[k];
        const double ref = oracle::latitude_energy(kPi / 4, t);
        worst = std::max(worst, std::abs(e - ref));
        o.details.push_back(fmt("t = %.2f: E = %.7f, oracle %.7f, error %.2e", t, e, ref, std::abs(e - ref)));
    }
    o.pass = oracle_err <= 1e-10 && worst <= 1e-3 && secs < 5.0;
    o.details.push_back(fmt("max error %.2e (tol 1e-3), runtime %.2f s (limit 5 s)", worst, secs));
    return o;
}

Outcome criterion2() {
    const auto s = ManifoldDescriptor::sphere();
    Stopwatch sw;
    auto identity = [](const FlowTrace& tr) {
        const auto i1 = oracle::nearest_record(tr.time, 0.1);
        const auto i2 = oracle::nearest_record(tr.time, 1.0);
        return std::pair{energy_identity_residual(tr, i1, i2), tr.energy[i1] - tr.energy[i2]};
    };
    const auto [res, drop] = identity(g_latitude_run.trace);
    const auto fine = run(oracle::latitude(kPi / 4, 512), s, latitude_params(5e-4, 1.0));
    keep("latitude", "pi/4, N=512, dt=5e-4", fine.trace, fine.initial_energy);
    const auto [res_fine, drop_fine] = identity(fine.trace);

    Outcome o{2, "energy identity", true, {}, sw.seconds()};
    const bool bound = res <= 5e-3 * drop;
    const double ratio = res / res_fine;
    o.pass = bound && ratio >= 3.0;
    o.details.push_back(fmt("N=256 dt=1e-3: residual %.3e, drop %.6f, relative %.2e (tol 5e-3) %s", res, drop,
                            res / drop, bound ? "ok" : "exceeded"));
    o.details.push_back(fmt("N=512 dt=5e-4: residual %.3e, relative %.2e", res_fine, res_fine / drop_fine));
    o.details.push_back(fmt("refinement ratio %.3f (required >= 3): the residual is the O(dt) energy defect of the "
                            "implicit Euler step, so it halves with dt regardless of N",
                            ratio));
    return o;
}

// ---------------------------------------------------------------- 4

Outcome criterion4() {
    Stopwatch sw;
    Outcome o{4, "catalog geodesics are discrete fixed points", true, {}, 0.0};
    for (const auto& m : {ManifoldDescriptor::sphere(), ManifoldDescriptor::ellipsoid(1.0, 1.1, 1.2),
                          ManifoldDescriptor::torus(2.0, 0.5)}) {
        const auto cat = GeodesicCatalog::for_manifold(m);
        for (const auto& fam : cat.families()) {
            const auto& params = fam.seeds.front();
            const double r256 = residual(fam.generate(params, 256), m).sup;
            const double r512 = residual(fam.generate(params, 512), m).sup;
            const double order = std::log2(r256 / r512);
            const bool ok = r256 <= 1e-3 && order >= 1.9;
            o.pass = o.pass && ok;
            o.details.push_back(fmt("%-22s %-14s residual_sup(256) = %.3e, (512) = %.3e, order %.3f %s",
                                    m.name().c_str(), fam.id.c_str(), r256, r512, order, ok ? "" : "FAILED"));
        }
    }
    o.seconds = sw.seconds();
    return o;
}

// ---------------------------------------------------------------- 5, 6, 8, 10

struct WidthRun {
    WidthReport report;
    Sweepout final_state = latitude_sweepout(ManifoldDescriptor::sphere(), 3, 8);
    std::vector<double> e0;
    std::vector<std::pair<double, double>> audit_max_distance;  // (t, max distance among selected)
    double seconds = 0.0;
};

WidthRun width_run(const ManifoldDescriptor& m, const std::string& group, bool keep_traces) {
    const auto cat = GeodesicCatalog::for_manifold(m);
    const auto sw0 = latitude_sweepout(m, 65, 256);
    WidthRun out;
    out.e0 = slice_energies(sw0);
    WidthOptions opt;
    opt.catalog = &cat;
    opt.on_checkpoint = [&](const Sweepout& state, const TightenResult& t, std::size_t) {
        if (keep_traces) {
            for (std::size_t j = 0; j < t.reports.size(); ++j) {
                const auto& rep = t.reports[j];
                keep(group, fmt("slice %zu, t <= %.1f", j, state.time()), rep.trace, out.e0[j]);
                if (rep.termination == Termination::VelocityConverged && out.e0[j] > 0.0) {
                    const double ratio = rep.trace.sup_grad_sq.back() * state.time() / out.e0[j];
                    auto it = std::find_if(g_stationary.begin(), g_stationary.end(),
                                           [&](const auto& e) { return e.first == group; });
                    if (it == g_stationary.end()) {
                        g_stationary.emplace_back(group, Stationary{});
                        it = g_stationary.end() - 1;
                    }
                    if (ratio > it->second.ratio) it->second = {ratio, fmt("slice %zu held to t = %.1f", j, state.time())};
                }
            }
        }
        out.final_state = state;
        if (state.time() >= 1.0) {
            double worst = 0.0;
            for (const auto& a : near_max_audit(state, t.reports, 0.05, cat, m)) worst = std::max(worst, a.c1_distance);
            out.audit_max_distance.emplace_back(state.time(), worst);
        }
    };
    Stopwatch sw;
    out.report = width_estimate(sw0, m, kSchedule, sweepout_params(), opt);
    out.seconds = sw.seconds();
    return out;
}

WidthRun g_sphere;

Outcome criterion5() {
    setenv("GEOFLOW_THREADS", "1", 1);
    g_sphere = width_run(ManifoldDescriptor::sphere(), "sphere sweepout", true);
    const auto& r = g_sphere.report;
    const double w = r.plateau_estimate;
    Outcome o{5, "width of the round sphere", true, {}, g_sphere.seconds};
    o.pass = std::abs(w - kPi) <= 0.05 && r.non_increasing && g_sphere.seconds < 120.0;
    for (std::size_t k = 0; k < r.times.size(); ++k) {
        o.details.push_back(fmt("t = %.1f: max slice energy %.8f at s = %+.4f", r.times[k], r.max_energies[k],
                                r.argmax_s[k]));
    }
    o.details.push_back(fmt("W = %.8f, |W - pi| = %.2e (tol 0.05), non-increasing: %s, plateau: %s", w,
                            std::abs(w - kPi), r.non_increasing ? "yes" : "no", r.plateau ? "yes" : "no"));
    o.details.push_back(fmt("runtime %.1f s single-threaded (limit 120 s)", g_sphere.seconds));
    return o;
}

Outcome criterion6() {
    const auto& audits = g_sphere.report.near_max_audit;
    Outcome o{6, "good-sweepout audit at t = 5", !audits.empty(), {}, 0.0};
    const double w = g_sphere.report.plateau_estimate;
    for (const auto& a : audits) {
        const bool ok = a.energy >= w - 0.05 && a.residual_sup <= 1e-2 && a.c1_distance <= 0.05;
        o.pass = o.pass && ok;
        o.details.push_back(fmt("slice %2zu s = %+.4f E = %.6f residual_sup %.2e, C1 distance %.2e to %s%s",
                                a.slice_index, a.s, a.energy, a.residual_sup, a.c1_distance, a.match_id.c_str(),
                                ok ? "" : "  FAILED"));
    }
    o.details.push_back(fmt("%zu slices selected with delta = 0.05", audits.size()));
    // informational: the audit-monotonicity property past t = 1
    bool monotone = true;
    std::string series;
    for (std::size_t k = 0; k < g_sphere.audit_max_distance.size(); ++k) {
        const auto [t, d] = g_sphere.audit_max_distance[k];
        series += fmt(" t=%.0f: %.2e", t, d);
        if (k > 0 && d > g_sphere.audit_max_distance[k - 1].second) monotone = false;
    }
    o.details.push_back("max distance among selected slices:" + series + (monotone ? " (non-increasing)" : " (increases)"));
    return o;
}

Outcome criterion8() {
    const auto& r = g_sphere.report;
    Outcome o{8, "homotopy-preservation audit", true, {}, 0.0};
    for (std::size_t k = 0; k < r.times.size(); ++k) {
        const bool ok = r.continuity_passed[k] && r.max_window_displacement[k] <= 0.05;
        o.pass = o.pass && ok;
        o.details.push_back(fmt("t = %.1f: continuity (gap bound 0.5 + slice displacements) %s, raw max gap %.3f, "
                                "max displacement over windows <= 0.01: %.4f (tol 0.05)",
                                r.times[k], r.continuity_passed[k] ? "passed" : "FAILED", r.max_gaps[k],
                                r.max_window_displacement[k]));
    }
    return o;
}

Outcome criterion10() {
    setenv("GEOFLOW_THREADS", "4", 1);
    Stopwatch sw;
    const auto four = width_run(ManifoldDescriptor::sphere(), "", false);
    setenv("GEOFLOW_THREADS", "1", 1);
    const std::string a = io::dump(io::to_json(g_sphere.report));
    const std::string b = io::dump(io::to_json(four.report));
    Outcome o{10, "determinism across thread counts", a == b, {}, sw.seconds()};
    o.details.push_back(fmt("WidthReport JSON with 1 and 4 threads: %zu and %zu bytes, %s", a.size(), b.size(),
                            a == b ? "identical" : "DIFFERENT"));
    o.details.push_back(fmt("final sweepouts %s", four.final_state == g_sphere.final_state ? "identical" : "DIFFERENT"));
    o.details.push_back(fmt("4-thread runtime %.1f s", four.seconds));
    return o;
}

// ---------------------------------------------------------------- 7

Outcome criterion7() {
    const auto s = ManifoldDescriptor::sphere();
    Stopwatch sw;
    const std::size_t n = 256;
    const auto equator = oracle::latitude(kPi / 2, n);
    std::vector<Vec3> bumped(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double th = 2 * kPi * static_cast<double>(i) / static_cast<double>(n);
        const double z = 1e-4 * std::exp(-(th - kPi) * (th - kPi) / (2 * 0.3 * 0.3));
        bumped[i] = {std::cos(th), std::sin(th), z};
    }
    const auto perturbed = make_loop(bumped, s);
    FlowParams p = latitude_params(1e-3, 1.0);
    p.trace_stride = 10;
    const auto probe = stability_probe(equator, perturbed, s, p);
    keep("stability", "equator", run(equator, s, latitude_params(1e-3, 1.0)).trace, energy(equator));
    keep("stability", "perturbed equator", run(perturbed, s, latitude_params(1e-3, 1.0)).trace, energy(perturbed));

    std::vector<DiscreteLoop> finals;
    for (double dt : {1e-3, 5e-4, 2.5e-4}) {
        const auto rep = run(oracle::latitude(kPi / 4, n), s, latitude_params(dt, 1.0));
        keep("dt refinement", fmt("pi/4, dt=%g", dt), rep.trace, rep.initial_energy);
        finals.push_back(rep.final_state.curve);
    }
    const double d1 = h1_distance(finals[0], finals[1]);
    const double d2 = h1_distance(finals[1], finals[2]);
    const double order = std::log2(d1 / d2);

    Outcome o{7, "uniqueness and stability surrogate", probe.max_h1 <= 1e-3 && order >= 0.9, {}, sw.seconds()};
    o.details.push_back(fmt("equator vs 1e-4 bump: max H1 distance on [0,1] %.3e (tol 1e-3), initial %.3e, max L2 "
                            "growth %.3f",
                            probe.max_h1, probe.h1.front(), probe.max_growth));
    o.details.push_back(fmt("latitude pi/4 at t = 1: |u_dt - u_dt/2|_H1 = %.3e, |u_dt/2 - u_dt/4|_H1 = %.3e, order "
                            "%.3f (required >= 0.9)",
                            d1, d2, order));
    return o;
}

// ---------------------------------------------------------------- 9

Outcome criterion9() {
    const auto m = ManifoldDescriptor::ellipsoid(1.0, 1.1, 1.2);
    const auto cat = GeodesicCatalog::for_manifold(m);
    const auto run9 = width_run(m, "ellipsoid sweepout", true);
    Outcome o{9, "ellipsoid closed geodesic", false, {}, run9.seconds};
    o.details.push_back(fmt("max slice energy %.6f -> %.6f over t in [0, 5]", run9.report.max_energies.front(),
                            run9.report.max_energies.back()));
    for (const auto& a : run9.report.near_max_audit) {
        const auto& fam = cat.family(a.match_id);
        const double e_cat = energy(fam.generate(a.match_params, 256));
        const double rel = std::abs(a.energy - e_cat) / e_cat;
        const bool ok = a.match_id.starts_with("ellipse") && rel <= 0.01 && a.c1_distance <= 0.05;
        o.pass = o.pass || ok;
        o.details.push_back(fmt("slice %2zu s = %+.4f E = %.6f, %s energy %.6f (rel. diff %.2e), C1 distance %.2e%s",
                                a.slice_index, a.s, a.energy, a.match_id.c_str(), e_cat, rel, a.c1_distance,
                                ok ? "  match" : ""));
    }
    return o;
}

// ---------------------------------------------------------------- 3 (uses every run above)

Outcome criterion3() {
    Stopwatch sw;
    const auto s = ManifoldDescriptor::sphere();
    const std::size_t n = 256;
    FlowParams ex;
    ex.scheme = Scheme::Explicit;
    ex.dt = kExplicitStabilityFactor * std::pow(2 * kPi / n, 2);
    ex.max_steps = 2000;
    ex.stop_velocity_sup = 0.0;
    ex.stop_energy = 0.0;
    double worst_step = 0.0;
    std::vector<std::pair<std::string, DiscreteLoop>> starts = {{"latitude pi/4", oracle::latitude(kPi / 4, n)}};
    for (std::uint64_t seed : {1, 2, 3}) starts.emplace_back(fmt("perturbed equator seed %d", int(seed)), cli::perturbed_loop(s, n, seed, 0.2));
    for (const auto& [label, u0] : starts) {
        const auto rep = run(u0, s, ex);
        keep("explicit dt = 0.4 dth^2", label, rep.trace, rep.initial_energy);
        worst_step = std::max(worst_step, grad_bound_check(rep.trace, rep.initial_energy).max_step_increase);
    }

    struct Group {
        double worst = 0.0;
        std::string where;
        std::size_t records = 0, violations = 0;
    };
    std::vector<std::pair<std::string, Group>> groups;
    for (const auto& r : g_traces) {
        auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) { return g.first == r.group; });
        if (it == groups.end()) {
            groups.emplace_back(r.group, Group{});
            it = groups.end() - 1;
        }
        Group& g = it->second;
        for (std::size_t k = 0; k < r.trace.size(); ++k) {
            const double t = r.trace.time[k];
            if (!(t > 0.0)) continue;
            ++g.records;
            const double ratio = r.e0 > 0.0 ? r.trace.sup_grad_sq[k] * t / r.e0 : 0.0;
            if (ratio > 1.05) ++g.violations;
            if (ratio > g.worst) {
                g.worst = ratio;
                g.where = fmt("%s at t = %.3f", r.label.c_str(), t);
            }
        }
    }
    bool ratios_ok = true;
    Outcome o{3, "gradient bound", false, {}, 0.0};
    for (const auto& [name, g] : groups) {
        ratios_ok = ratios_ok && g.violations == 0;
        o.details.push_back(fmt("%-24s max sup|u_th|^2 t / E0 = %.4f (%s), %zu of %zu records above 1.05",
                                name.c_str(), g.worst, g.where.c_str(), g.violations, g.records));
    }
    for (const auto& [name, st] : g_stationary) {
        o.details.push_back(fmt("%-24s stationary slices stopped by the velocity test would reach %.4f (%s); "
                                "not trace records, not counted",
                                name.c_str(), st.ratio, st.where.c_str()));
    }
    o.details.push_back(fmt("largest single explicit-step increase of sup|u_th|^2: %.2e (tol 1e-9)", worst_step));
    o.details.push_back("on a stationary geodesic sup|u_th|^2 t / E0 = t sup|u_th|^2 / E0 grows without bound "
                        "(t / pi on a great circle), so the bound cannot hold past t = 1.05 pi");
    o.pass = ratios_ok && worst_step <= 1e-9;
    o.seconds = sw.seconds();
    return o;
}

}  // namespace

int main() {
    Stopwatch total;
    std::vector<Outcome> outcomes;
    outcomes.push_back(criterion1());
    outcomes.push_back(criterion2());
    outcomes.push_back(criterion4());
    outcomes.push_back(criterion5());
    outcomes.push_back(criterion6());
    outcomes.push_back(criterion7());
    outcomes.push_back(criterion8());
    outcomes.push_back(criterion9());
    outcomes.push_back(criterion10());
    outcomes.push_back(criterion3());
    std::sort(outcomes.begin(), outcomes.end(), [](const Outcome& a, const Outcome& b) { return a.id < b.id; });

    std::printf("acceptance summary\n");
    bool unexpected = false;
    for (const auto& o : outcomes) {
        const bool known = kKnownRed.count(o.id) > 0;
        std::printf("criterion %2d %s  %s (%.1f s)%s\n", o.id, o.pass ? "PASS" : "FAIL", o.title.c_str(), o.seconds,
                    !o.pass && known ? "  [known red, see README]" : "");
        if (!o.pass && !known) unexpected = true;
        if (o.pass && known) std::printf("             (listed as known red but now passes)\n");
    }
    std::printf("\ndetails\n");
    for (const auto& o : outcomes) {
        std::printf("criterion %d: %s\n", o.id, o.title.c_str());
        for (const auto& d : o.details) std::printf("    %s\n", d.c_str());
    }
    std::printf("\ntotal %.1f s\n", total.seconds());
    return unexpected ? 1 : 0;
}
