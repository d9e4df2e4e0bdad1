#include "geoflow/serialize.hpp"

#include "geoflow/error.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <unistd.h>

namespace geoflow::io {
namespace {

const std::string kVersion = std::to_string(kFormatMajor) + "." + std::to_string(kFormatMinor);

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::Format, what); }

// Runs a decoder, turning nlohmann's type and key errors into Format errors.
template <class F>
auto decoding(std::string_view what, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const nlohmann::json::exception& e) {
        bad("malformed " + std::string(what) + ": " + e.what());
    }
}

Json versioned() { return Json{{"version", kVersion}}; }

}  // namespace

void check_version(const Json& j, std::string_view what) {
    if (!j.is_object() || !j.contains("version") || !j["version"].is_string()) {
        bad(std::string(what) + " has no version field");
    }
    const std::string v = j["version"].get<std::string>();
    const auto dot = v.find('.');
    int major = -1;
    const auto head = v.substr(0, dot);
    const auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), major);
    if (ec != std::errc() || ptr != head.data() + head.size()) bad(std::string(what) + " has malformed version '" + v + "'");
    if (major != kFormatMajor) {
        bad(std::string(what) + " has unsupported major version " + std::to_string(major) + " (expected " +
            std::to_string(kFormatMajor) + ")");
    }
}

Json to_json(const DiscreteLoop& loop) {
    Json j = versioned();
    j["n_points"] = loop.size();
    j["ambient_dim"] = 3;
    j["points"] = std::vector<double>(loop.flat().begin(), loop.flat().end());
    return j;
}

DiscreteLoop loop_from_json(const Json& j) {
    check_version(j, "loop");
    return decoding("loop", [&] {
        const auto n = j.at("n_points").get<std::size_t>();
        if (j.at("ambient_dim").get<int>() != 3) bad("only ambient dimension 3 is supported");
        auto pts = j.at("points").get<std::vector<double>>();
        if (pts.size() != 3 * n) bad("loop has " + std::to_string(pts.size()) + " coordinates for n_points " + std::to_string(n));
        return DiscreteLoop::from_flat(std::move(pts));
    });
}

Json to_json(const Sweepout& sw) {
    Json j = versioned();
    j["s_values"] = sw.s_values();
    j["time"] = sw.time();
    Json slices = Json::array();
    for (const auto& s : sw.slices()) slices.push_back(to_json(s));
    j["slices"] = std::move(slices);
    return j;
}

Sweepout sweepout_from_json(const Json& j) {
    check_version(j, "sweepout");
    return decoding("sweepout", [&] {
        auto s = j.at("s_values").get<std::vector<double>>();
        std::vector<DiscreteLoop> slices;
        for (const auto& item : j.at("slices")) slices.push_back(loop_from_json(item));
        const double t = j.contains("time") ? j["time"].get<double>() : 0.0;
        return Sweepout(std::move(s), std::move(slices), t);
    });
}

Json to_json(const FlowParams& p) {
    return Json{{"dt", p.dt},
                {"scheme", std::string(to_string(p.scheme))},
                {"max_steps", p.max_steps},
                {"stop_velocity_sup", p.stop_velocity_sup},
                {"stop_energy", p.stop_energy},
                {"projection_tol", p.projection_tol},
                {"trace_stride", p.trace_stride},
                {"displacement_window", p.displacement_window}};
}

FlowParams flow_params_from_json(const Json& j) {
    return decoding("flow params", [&] {
        FlowParams p;
        p.dt = j.at("dt").get<double>();
        const auto scheme = parse_scheme(j.at("scheme").get<std::string>());
        if (!scheme) bad("unknown scheme '" + j.at("scheme").get<std::string>() + "'");
        p.scheme = *scheme;
        p.max_steps = j.at("max_steps").get<std::size_t>();
        p.stop_velocity_sup = j.at("stop_velocity_sup").get<double>();
        p.stop_energy = j.at("stop_energy").get<double>();
        p.projection_tol = j.at("projection_tol").get<double>();
        p.trace_stride = j.at("trace_stride").get<std::size_t>();
        p.displacement_window = j.value("displacement_window", 0.0);
        return p;
    });
}

Json to_json(const FlowTrace& t) {
    return Json{{"time", t.time},
                {"energy", t.energy},
                {"sup_grad_sq", t.sup_grad_sq},
                {"sup_vel_sq", t.sup_vel_sq},
                {"vel_l2", t.vel_l2},
                {"dissipation", t.dissipation},
                {"utt_l2", t.utt_l2},
                {"utt_time_integral", t.utt_time_integral},
                {"grad_step_increase", t.grad_step_increase},
                {"curvature_bound_sq", t.curvature_bound_sq},
                {"segment_radius", t.segment_radius}};
}

FlowTrace trace_from_json(const Json& j) {
    return decoding("trace", [&] {
        FlowTrace t;
        t.time = j.at("time").get<std::vector<double>>();
        t.energy = j.at("energy").get<std::vector<double>>();
        t.sup_grad_sq = j.at("sup_grad_sq").get<std::vector<double>>();
        t.sup_vel_sq = j.at("sup_vel_sq").get<std::vector<double>>();
        t.vel_l2 = j.at("vel_l2").get<std::vector<double>>();
        t.dissipation = j.at("dissipation").get<std::vector<double>>();
        t.utt_l2 = j.at("utt_l2").get<std::vector<double>>();
        t.utt_time_integral = j.at("utt_time_integral").get<std::vector<double>>();
        t.grad_step_increase = j.at("grad_step_increase").get<std::vector<double>>();
        t.curvature_bound_sq = j.at("curvature_bound_sq").get<double>();
        t.segment_radius = j.at("segment_radius").get<double>();
        const std::size_t n = t.time.size();
        for (const auto* col : {&t.energy, &t.sup_grad_sq, &t.sup_vel_sq, &t.vel_l2, &t.dissipation, &t.utt_l2,
                                &t.utt_time_integral, &t.grad_step_increase}) {
            if (col->size() != n) bad("trace columns have different lengths");
        }
        return t;
    });
}

Json to_json(const FlowReport& r) {
    Json j = versioned();
    j["params"] = to_json(r.params);
    j["termination"] = std::string(to_string(r.termination));
    j["final_curve"] = to_json(r.final_state.curve);
    j["final_time"] = r.final_state.time;
    j["final_step"] = r.final_state.step_index;
    j["initial_energy"] = r.initial_energy;
    j["max_energy_increase"] = r.max_energy_increase;
    j["max_window_displacement"] = r.max_window_displacement;
    j["trace"] = to_json(r.trace);
    return j;
}

FlowReport flow_report_from_json(const Json& j) {
    check_version(j, "flow report");
    return decoding("flow report", [&] {
        FlowReport r;
        r.params = flow_params_from_json(j.at("params"));
        const auto term = parse_termination(j.at("termination").get<std::string>());
        if (!term) bad("unknown termination '" + j.at("termination").get<std::string>() + "'");
        r.termination = *term;
        r.final_state.curve = loop_from_json(j.at("final_curve"));
        r.final_state.time = j.at("final_time").get<double>();
        r.final_state.step_index = j.at("final_step").get<std::size_t>();
        r.initial_energy = j.at("initial_energy").get<double>();
        r.max_energy_increase = j.at("max_energy_increase").get<double>();
        r.max_window_displacement = j.at("max_window_displacement").get<double>();
        r.trace = trace_from_json(j.at("trace"));
        return r;
    });
}

Json to_json(const GeodesicAudit& a) {
    Json j{{"slice_index", a.slice_index},   {"s", a.s},
           {"energy", a.energy},             {"residual_sup", a.residual_sup},
           {"residual_l2", a.residual_l2},   {"match_id", a.match_id},
           {"match_params", a.match_params}, {"c1_distance", a.c1_distance}};
    if (a.classification) j["classification"] = std::string(to_string(*a.classification));
    return j;
}

GeodesicAudit audit_from_json(const Json& j) {
    return decoding("audit record", [&] {
        GeodesicAudit a;
        a.slice_index = j.at("slice_index").get<std::size_t>();
        a.s = j.at("s").get<double>();
        a.energy = j.at("energy").get<double>();
        a.residual_sup = j.at("residual_sup").get<double>();
        a.residual_l2 = j.at("residual_l2").get<double>();
        a.match_id = j.at("match_id").get<std::string>();
        a.match_params = j.at("match_params").get<std::vector<double>>();
        a.c1_distance = j.at("c1_distance").get<double>();
        if (j.contains("classification")) {
            a.classification = parse_classification(j["classification"].get<std::string>());
            if (!a.classification) bad("unknown classification");
        }
        return a;
    });
}

Json audits_to_json(std::span<const GeodesicAudit> audits) {
    Json j = versioned();
    Json records = Json::array();
    for (const auto& a : audits) records.push_back(to_json(a));
    j["records"] = std::move(records);
    return j;
}

std::vector<GeodesicAudit> audits_from_json(const Json& j) {
    check_version(j, "audit");
    return decoding("audit", [&] {
        std::vector<GeodesicAudit> out;
        for (const auto& item : j.at("records")) out.push_back(audit_from_json(item));
        return out;
    });
}

Json to_json(const WidthReport& r) {
    Json j = versioned();
    j["times"] = r.times;
    j["max_energies"] = r.max_energies;
    j["argmax_s"] = r.argmax_s;
    j["max_gaps"] = r.max_gaps;
    j["continuity_passed"] = r.continuity_passed;
    j["max_window_displacement"] = r.max_window_displacement;
    j["plateau_estimate"] = r.plateau_estimate;
    j["plateau"] = r.plateau;
    j["non_increasing"] = r.non_increasing;
    Json audits = Json::array();
    for (const auto& a : r.near_max_audit) audits.push_back(to_json(a));
    j["near_max_audit"] = std::move(audits);
    return j;
}

WidthReport width_report_from_json(const Json& j) {
    check_version(j, "width report");
    return decoding("width report", [&] {
        WidthReport r;
        r.times = j.at("times").get<std::vector<double>>();
        r.max_energies = j.at("max_energies").get<std::vector<double>>();
        r.argmax_s = j.at("argmax_s").get<std::vector<double>>();
        r.max_gaps = j.at("max_gaps").get<std::vector<double>>();
        r.continuity_passed = j.at("continuity_passed").get<std::vector<bool>>();
        r.max_window_displacement = j.at("max_window_displacement").get<std::vector<double>>();
        r.plateau_estimate = j.at("plateau_estimate").get<double>();
        r.plateau = j.at("plateau").get<bool>();
        r.non_increasing = j.at("non_increasing").get<bool>();
        for (const auto& item : j.at("near_max_audit")) r.near_max_audit.push_back(audit_from_json(item));
        return r;
    });
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) return "nan";
    return std::string(buf, ptr);
}

std::string trace_to_csv(const FlowTrace& t) {
    std::string out = "t,energy,sup_grad_sq,sup_vel_sq,dissipation,utt_l2\n";
    for (std::size_t k = 0; k < t.size(); ++k) {
        out += format_double(t.time[k]) + ',' + format_double(t.energy[k]) + ',' + format_double(t.sup_grad_sq[k]) + ',' +
               format_double(t.sup_vel_sq[k]) + ',' + format_double(t.dissipation[k]) + ',' +
               format_double(t.utt_l2[k]) + '\n';
    }
    return out;
}

std::string audits_to_csv(std::span<const GeodesicAudit> audits) {
    std::string out = "s,energy,residual_sup,residual_l2,match_id,c1_dist\n";
    for (const auto& a : audits) {
        out += format_double(a.s) + ',' + format_double(a.energy) + ',' + format_double(a.residual_sup) + ',' +
               format_double(a.residual_l2) + ',' + a.match_id + ',' + format_double(a.c1_distance) + '\n';
    }
    return out;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Json read_json(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        bad(path.string() + ": " + e.what());
    }
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    auto tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::Io, "cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw Error(ErrorCode::Io, "write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error(ErrorCode::Io, "cannot move " + tmp.string() + " to " + path.string());
    }
}

}  // namespace geoflow::io
