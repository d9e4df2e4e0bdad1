#include "geoflow/cli/commands.hpp"

#include "geoflow/cli/config.hpp"
#include "geoflow/cli/presets.hpp"
#include "geoflow/cli/svg.hpp"
#include "geoflow/error.hpp"
#include "geoflow/geodesy.hpp"
#include "geoflow/serialize.hpp"
#include "geoflow/sweepout.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <string>
#include <variant>

namespace geoflow::cli {
namespace {

namespace fs = std::filesystem;

struct Prepared {
    RunConfig config;
    ManifoldDescriptor manifold = ManifoldDescriptor::sphere();
    std::optional<DiscreteLoop> curve;
    std::optional<Sweepout> sweepout;
};

// Config-stage failure; reported with exit code 1.
struct ConfigFailure {
    std::string message;
};

DiscreteLoop build_curve(const CurvePreset& p, const RunConfig& cfg, const ManifoldDescriptor& m) {
    const std::size_t n = cfg.resolution;
    switch (p.kind) {
        case CurvePreset::Kind::Point: {
            const DiscreteLoop loop = DiscreteLoop::constant(closest_point_project(m, p.point), n);
            return loop;
        }
        case CurvePreset::Kind::GreatCircle:
            if (m.kind() != ManifoldKind::Sphere) {
                throw ConfigFailure{"initial.curve.preset: great_circle needs the sphere"};
            }
            return great_circle_loop(p.axis, n);
        case CurvePreset::Kind::Latitude:
            if (m.kind() != ManifoldKind::Sphere) throw ConfigFailure{"initial.curve.preset: latitude needs the sphere"};
            return latitude_loop(p.phi, n);
        case CurvePreset::Kind::Perturbed:
            return perturbed_loop(m, n, p.seed.value_or(cfg.seed), p.amplitude);
    }
    throw ConfigFailure{"initial.curve: unknown preset"};
}

Prepared prepare(const CommandOptions& options) {
    Prepared out;
    try {
        out.config = parse_config(options.config);
        RunConfig& cfg = out.config;
        if (options.out_dir) cfg.output_dir = *options.out_dir;
        if (options.resolution) {
            if (*options.resolution < kMinLoopPoints) throw ConfigFailure{"--resolution must be at least 8"};
            cfg.resolution = *options.resolution;
        }
        if (options.seed) cfg.seed = *options.seed;
        out.manifold = ManifoldDescriptor::from_name(cfg.manifold_kind, cfg.manifold_params);

        if (const auto* c = std::get_if<CurvePreset>(&cfg.initial)) {
            out.curve = build_curve(*c, cfg, out.manifold);
        } else if (const auto* s = std::get_if<SweepoutPreset>(&cfg.initial)) {
            out.sweepout = latitude_sweepout(out.manifold, s->n_slices, cfg.resolution, s->axis);
        } else {
            const auto& file = std::get<InputFile>(cfg.initial);
            const io::Json doc = io::read_json(file.path);
            if (doc.contains("slices")) {
                out.sweepout = io::sweepout_from_json(doc);
                for (const auto& slice : out.sweepout->slices()) require_on_manifold(slice, out.manifold);
            } else {
                out.curve = io::loop_from_json(doc);
                require_on_manifold(*out.curve, out.manifold);
            }
        }
        const std::size_t n = out.curve ? out.curve->size() : out.sweepout->resolution();
        validate(cfg.flow, n);
    } catch (const Error& e) {
        throw ConfigFailure{e.what()};
    }
    return out;
}

void write(const fs::path& dir, const std::string& name, const std::string& content) {
    io::write_file_atomic(dir / name, content);
}

std::string fixed(double v, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::vector<std::string> slice_labels(const Sweepout& sw, std::span<const std::size_t> idx) {
    std::vector<std::string> out;
    for (std::size_t j : idx) out.push_back("s = " + fixed(sw.s_values()[j], 3) + ", E = " + fixed(energy(sw.slices()[j]), 4));
    return out;
}

// About eight evenly spaced slices, endpoints included.
std::vector<std::size_t> gallery_indices(std::size_t n) {
    std::vector<std::size_t> idx;
    const std::size_t panels = std::min<std::size_t>(n, 8);
    for (std::size_t k = 0; k < panels; ++k) idx.push_back(k * (n - 1) / std::max<std::size_t>(1, panels - 1));
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    return idx;
}

int cmd_flow(const Prepared& p, std::ostream& out, bool quiet) {
    if (!p.curve) throw ConfigFailure{"flow needs a curve as initial condition"};
    const fs::path dir = p.config.output_dir;
    fs::create_directories(dir);

    const FlowReport report = run(*p.curve, p.manifold, p.config.flow);
    write(dir, "flow_report.json", io::dump(io::to_json(report)));
    write(dir, "trace.csv", io::trace_to_csv(report.trace));

    PlotSpec plot{"Energy along the flow", "t", "energy", {{"E(t)", report.trace.time, report.trace.energy}}};
    write(dir, "energy.svg", line_plot(plot));
    const std::vector<DiscreteLoop> curves{*p.curve, report.final_state.curve};
    const std::vector<std::string> labels{"t = " + fixed(0.0, 3), "t = " + fixed(report.final_state.time, 3)};
    write(dir, "curves.svg", curve_gallery(curves, labels, "Initial and final curve"));

    if (!quiet) {
        out << "termination: " << to_string(report.termination) << "\n"
            << "final time:  " << report.final_state.time << "\n"
            << "energy:      " << report.initial_energy << " -> " << report.trace.energy.back() << "\n"
            << "class:       " << to_string(classify(report)) << "\n";
    }
    return kExitOk;
}

struct TightenOutputs {
    WidthReport report;
    Sweepout final_state;
};

TightenOutputs tighten_schedule(const Prepared& p, bool with_audit, std::ostream& out, bool quiet) {
    if (!p.sweepout) throw ConfigFailure{"this command needs a sweepout as initial condition"};
    if (p.config.schedule.empty()) throw ConfigFailure{"schedule: at least one time is required"};
    const fs::path dir = p.config.output_dir;
    fs::create_directories(dir);

    const GeodesicCatalog catalog = GeodesicCatalog::for_manifold(p.manifold);
    PlotSpec energy_vs_s{"Slice energy", "s", "energy", {}};
    auto add_energy_series = [&](const Sweepout& sw) {
        energy_vs_s.series.push_back({"t = " + fixed(sw.time(), 3), sw.s_values(), slice_energies(sw)});
    };
    add_energy_series(*p.sweepout);

    Sweepout final_state = *p.sweepout;
    WidthOptions opts;
    opts.gap_bound = p.config.audit.gap_bound;
    opts.delta = p.config.audit.delta;
    opts.catalog = with_audit ? &catalog : nullptr;
    opts.on_checkpoint = [&](const Sweepout& sw, const TightenResult&, std::size_t k) {
        write(dir, "checkpoint_" + std::to_string(k) + ".json", io::dump(io::to_json(sw)));
        add_energy_series(sw);
        final_state = sw;
        if (!quiet) out << "t = " << sw.time() << "  max energy " << max_energy(sw).energy << "\n";
    };
    WidthReport report = width_estimate(*p.sweepout, p.manifold, p.config.schedule, p.config.flow, opts);

    write(dir, "sweepout.json", io::dump(io::to_json(final_state)));
    write(dir, "energy_vs_s.svg", line_plot(energy_vs_s));
    const auto idx = gallery_indices(final_state.size());
    std::vector<DiscreteLoop> curves;
    for (std::size_t j : idx) curves.push_back(final_state.slices()[j]);
    write(dir, "gallery.svg", curve_gallery(curves, slice_labels(final_state, idx), "Slices at t = " + fixed(final_state.time(), 3)));
    return {std::move(report), std::move(final_state)};
}

int cmd_tighten(const Prepared& p, std::ostream& out, bool quiet) {
    const auto result = tighten_schedule(p, false, out, quiet);
    std::vector<double> moved(result.final_state.size());
    for (std::size_t j = 0; j < moved.size(); ++j) {
        moved[j] = h1_distance(p.sweepout->slices()[j], result.final_state.slices()[j]);
    }
    const auto audit = continuity_audit(result.final_state, p.config.audit.gap_bound, moved);
    io::Json j = {{"version", std::to_string(io::kFormatMajor) + "." + std::to_string(io::kFormatMinor)},
                  {"gap_bound", p.config.audit.gap_bound},
                  {"gaps", audit.gaps},
                  {"bounds", audit.bounds},
                  {"max_gap", audit.max_gap},
                  {"max_gap_index", audit.max_gap_index},
                  {"violations", audit.violations},
                  {"passed", audit.passed}};
    write(p.config.output_dir, "continuity.json", io::dump(j));
    if (!quiet) out << "continuity audit: " << (audit.passed ? "passed" : "failed") << "\n";
    return kExitOk;
}

int cmd_width(const Prepared& p, std::ostream& out, bool quiet) {
    const auto result = tighten_schedule(p, true, out, quiet);
    const fs::path dir = p.config.output_dir;
    write(dir, "width_report.json", io::dump(io::to_json(result.report)));
    write(dir, "audit.json", io::dump(io::audits_to_json(result.report.near_max_audit)));
    write(dir, "audit.csv", io::audits_to_csv(result.report.near_max_audit));
    PlotSpec plot{"Max slice energy", "t", "max energy", {{"max_s E", result.report.times, result.report.max_energies}}};
    write(dir, "max_energy.svg", line_plot(plot));
    if (!quiet) {
        out << "width estimate: " << result.report.plateau_estimate << (result.report.plateau ? " (plateau)" : "")
            << "\n";
    }
    return kExitOk;
}

int cmd_audit(const Prepared& p, std::ostream& out, bool quiet) {
    const GeodesicCatalog catalog = GeodesicCatalog::for_manifold(p.manifold);
    std::vector<GeodesicAudit> audits;
    std::vector<DiscreteLoop> curves;
    std::vector<std::string> labels;
    if (p.sweepout) {
        audits = near_max_audit(*p.sweepout, {}, p.config.audit.delta, catalog, p.manifold);
        for (const auto& a : audits) {
            curves.push_back(p.sweepout->slices()[a.slice_index]);
            labels.push_back(a.match_id + ", d = " + fixed(a.c1_distance, 4));
        }
    } else {
        const Residual r = residual(*p.curve, p.manifold);
        const CatalogMatch match = dist_to_catalog(*p.curve, catalog, p.manifold);
        GeodesicAudit a;
        a.energy = energy(*p.curve);
        a.residual_sup = r.sup;
        a.residual_l2 = r.l2;
        a.match_id = match.entry_id;
        a.match_params = match.params;
        a.c1_distance = match.c1_distance;
        audits.push_back(a);
        curves.push_back(*p.curve);
        labels.push_back(a.match_id + ", d = " + fixed(a.c1_distance, 4));
    }
    const fs::path dir = p.config.output_dir;
    fs::create_directories(dir);
    write(dir, "audit.json", io::dump(io::audits_to_json(audits)));
    write(dir, "audit.csv", io::audits_to_csv(audits));
    write(dir, "audit_gallery.svg", curve_gallery(curves, labels, "Audited curves"));
    if (!quiet) {
        std::size_t close = 0;
        for (const auto& a : audits) close += a.c1_distance <= p.config.audit.epsilon ? 1 : 0;
        out << audits.size() << " audited, " << close << " within epsilon " << p.config.audit.epsilon << "\n";
    }
    return kExitOk;
}

}  // namespace

int run_command(std::string_view command, const CommandOptions& options, std::ostream& out, std::ostream& err) {
    Prepared p;
    try {
        if (command != "flow" && command != "tighten" && command != "width" && command != "audit" &&
            command != "validate") {
            throw ConfigFailure{"unknown command '" + std::string(command) + "'"};
        }
        p = prepare(options);
        // Input kind requirements are config errors, checked before anything is written.
        const bool needs_sweepout = command == "tighten" || command == "width";
        if (needs_sweepout && !p.sweepout) throw ConfigFailure{std::string(command) + " needs a sweepout as initial condition"};
        if (needs_sweepout && p.config.schedule.empty()) throw ConfigFailure{"schedule: at least one time is required"};
        if (command == "flow" && !p.curve) throw ConfigFailure{"flow needs a curve as initial condition"};
    } catch (const ConfigFailure& f) {
        err << "config error: " << f.message << "\n";
        return kExitConfig;
    } catch (const Error& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    if (command == "validate") {
        if (!options.quiet) {
            out << "config ok: " << p.manifold.name() << ", "
                << (p.curve ? "curve of " + std::to_string(p.curve->size()) + " points"
                            : "sweepout of " + std::to_string(p.sweepout->size()) + " slices")
                << "\n";
        }
        return kExitOk;
    }

    try {
        if (command == "flow") return cmd_flow(p, out, options.quiet);
        if (command == "tighten") return cmd_tighten(p, out, options.quiet);
        if (command == "width") return cmd_width(p, out, options.quiet);
        return cmd_audit(p, out, options.quiet);
    } catch (const ConfigFailure& f) {
        err << "config error: " << f.message << "\n";
        return kExitConfig;
    } catch (const Error& e) {
        if (!e.is_numerical()) {
            err << "error: " << e.what() << "\n";
            return kExitConfig;
        }
        err << "numerical failure (" << to_string(e.code()) << "): " << e.what() << "\n";
        return kExitNumerical;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}

}  // namespace geoflow::cli
