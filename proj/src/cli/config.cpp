#include "geoflow/cli/config.hpp"

#include "geoflow/error.hpp"
#include "geoflow/manifold.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

namespace geoflow::cli {
namespace {

using Json = nlohmann::json;

class Checker {
public:
    void fail(const std::string& path, const std::string& msg) { errors_.push_back(path + ": " + msg); }
    bool ok() const { return errors_.empty(); }
    const std::vector<std::string>& errors() const { return errors_; }

    // Reports keys of `obj` outside `allowed`; for unknown objects every leaf path is named.
    void only(const Json& obj, const std::string& prefix, std::initializer_list<const char*> allowed) {
        const std::set<std::string> keys(allowed.begin(), allowed.end());
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            if (keys.count(it.key()) == 0) unknown(join(prefix, it.key()), it.value());
        }
    }

    bool object(const Json& j, const std::string& path) {
        if (j.is_object()) return true;
        fail(path, "expected an object");
        return false;
    }

    std::optional<double> number(const Json& parent, const std::string& prefix, const char* key) {
        if (!parent.contains(key)) return std::nullopt;
        const Json& v = parent[key];
        if (!v.is_number()) {
            fail(join(prefix, key), "expected a number");
            return std::nullopt;
        }
        return v.get<double>();
    }

    std::optional<std::uint64_t> count(const Json& parent, const std::string& prefix, const char* key) {
        if (!parent.contains(key)) return std::nullopt;
        const Json& v = parent[key];
        if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
            fail(join(prefix, key), "expected a non-negative integer");
            return std::nullopt;
        }
        return v.get<std::uint64_t>();
    }

    std::optional<std::string> string(const Json& parent, const std::string& prefix, const char* key) {
        if (!parent.contains(key)) return std::nullopt;
        const Json& v = parent[key];
        if (!v.is_string()) {
            fail(join(prefix, key), "expected a string");
            return std::nullopt;
        }
        return v.get<std::string>();
    }

    std::optional<std::vector<double>> numbers(const Json& parent, const std::string& prefix, const char* key) {
        if (!parent.contains(key)) return std::nullopt;
        const Json& v = parent[key];
        if (!v.is_array()) {
            fail(join(prefix, key), "expected an array of numbers");
            return std::nullopt;
        }
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number()) {
                fail(join(prefix, key) + "[" + std::to_string(i) + "]", "expected a number");
                return std::nullopt;
            }
            out.push_back(v[i].get<double>());
        }
        return out;
    }

    std::optional<Vec3> vector3(const Json& parent, const std::string& prefix, const char* key) {
        auto v = numbers(parent, prefix, key);
        if (!v) return std::nullopt;
        if (v->size() != 3) {
            fail(join(prefix, key), "expected 3 numbers");
            return std::nullopt;
        }
        return Vec3{(*v)[0], (*v)[1], (*v)[2]};
    }

    static std::string join(const std::string& prefix, const std::string& key) {
        return prefix.empty() ? key : prefix + "." + key;
    }

private:
    void unknown(const std::string& path, const Json& value) {
        if (value.is_object() && !value.empty()) {
            for (auto it = value.begin(); it != value.end(); ++it) unknown(path + "." + it.key(), it.value());
        } else {
            fail(path, "unknown key");
        }
    }

    std::vector<std::string> errors_;
};

void parse_manifold(Checker& c, const Json& doc, RunConfig& cfg) {
    if (!doc.contains("manifold")) return;
    const Json& j = doc["manifold"];
    if (!c.object(j, "manifold")) return;
    c.only(j, "manifold", {"kind", "params"});
    if (auto kind = c.string(j, "manifold", "kind")) cfg.manifold_kind = *kind;
    if (auto params = c.numbers(j, "manifold", "params")) cfg.manifold_params = *params;
}

void parse_curve(Checker& c, const Json& j, RunConfig& cfg) {
    const std::string at = "initial.curve";
    if (!c.object(j, at)) return;
    CurvePreset preset;
    const auto name = c.string(j, at, "preset");
    if (!name) {
        if (!j.contains("preset")) c.fail(at + ".preset", "required");
        return;
    }
    if (*name == "point") {
        c.only(j, at, {"preset", "point"});
        preset.kind = CurvePreset::Kind::Point;
        if (auto p = c.vector3(j, at, "point")) preset.point = *p;
    } else if (*name == "great_circle") {
        c.only(j, at, {"preset", "axis"});
        preset.kind = CurvePreset::Kind::GreatCircle;
        if (auto a = c.vector3(j, at, "axis")) {
            if (!(norm(*a) > 0.0)) c.fail(at + ".axis", "must be non-zero");
            preset.axis = *a;
        }
    } else if (*name == "latitude") {
        c.only(j, at, {"preset", "phi"});
        preset.kind = CurvePreset::Kind::Latitude;
        if (auto phi = c.number(j, at, "phi")) {
            if (!(*phi > 0.0 && *phi < std::acos(-1.0))) c.fail(at + ".phi", "must lie in (0, pi)");
            preset.phi = *phi;
        }
    } else if (*name == "perturbed") {
        c.only(j, at, {"preset", "seed", "amplitude"});
        preset.kind = CurvePreset::Kind::Perturbed;
        if (auto s = c.count(j, at, "seed")) preset.seed = *s;
        if (auto a = c.number(j, at, "amplitude")) {
            if (!(*a >= 0.0)) c.fail(at + ".amplitude", "must be non-negative");
            preset.amplitude = *a;
        }
    } else {
        c.fail(at + ".preset", "unknown curve preset '" + *name + "' (point, great_circle, latitude, perturbed)");
        return;
    }
    cfg.initial = preset;
}

void parse_sweepout(Checker& c, const Json& j, RunConfig& cfg) {
    const std::string at = "initial.sweepout";
    if (!c.object(j, at)) return;
    c.only(j, at, {"preset", "n_slices", "axis"});
    const auto name = c.string(j, at, "preset");
    if (name && *name != "latitude") c.fail(at + ".preset", "unknown sweepout preset '" + *name + "' (latitude)");
    if (!j.contains("preset")) c.fail(at + ".preset", "required");
    SweepoutPreset preset;
    if (auto n = c.count(j, at, "n_slices")) {
        if (*n < 3) c.fail(at + ".n_slices", "must be at least 3");
        preset.n_slices = static_cast<std::size_t>(*n);
    }
    if (auto a = c.count(j, at, "axis")) {
        if (*a > 2) c.fail(at + ".axis", "must be 0, 1 or 2");
        preset.axis = static_cast<int>(*a);
    }
    cfg.initial = preset;
}

void parse_initial(Checker& c, const Json& doc, RunConfig& cfg, const std::filesystem::path& base_dir) {
    if (!doc.contains("initial")) return;
    const Json& j = doc["initial"];
    if (!c.object(j, "initial")) return;
    c.only(j, "initial", {"curve", "sweepout", "file"});
    const int given = static_cast<int>(j.contains("curve")) + static_cast<int>(j.contains("sweepout")) +
                      static_cast<int>(j.contains("file"));
    if (given != 1) {
        c.fail("initial", "exactly one of curve, sweepout, file is required");
        return;
    }
    if (j.contains("curve")) parse_curve(c, j["curve"], cfg);
    if (j.contains("sweepout")) parse_sweepout(c, j["sweepout"], cfg);
    if (auto f = c.string(j, "initial", "file")) {
        std::filesystem::path p(*f);
        if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
        if (!std::filesystem::exists(p)) c.fail("initial.file", "no such file " + p.string());
        cfg.initial = InputFile{p};
    }
}

void parse_flow(Checker& c, const Json& doc, RunConfig& cfg) {
    if (!doc.contains("flow")) return;
    const Json& j = doc["flow"];
    const std::string at = "flow";
    if (!c.object(j, at)) return;
    c.only(j, at,
           {"dt", "scheme", "max_steps", "stop_velocity_sup", "stop_energy", "projection_tol", "trace_stride",
            "displacement_window"});
    FlowParams& p = cfg.flow;
    if (auto v = c.number(j, at, "dt")) {
        if (!(*v > 0.0) || !std::isfinite(*v)) c.fail("flow.dt", "must be a positive number");
        p.dt = *v;
    }
    if (auto v = c.string(j, at, "scheme")) {
        if (auto s = parse_scheme(*v)) {
            p.scheme = *s;
        } else {
            c.fail("flow.scheme", "must be explicit or semi_implicit");
        }
    }
    if (auto v = c.count(j, at, "max_steps")) p.max_steps = static_cast<std::size_t>(*v);
    if (auto v = c.number(j, at, "stop_velocity_sup")) {
        if (!(*v >= 0.0)) c.fail("flow.stop_velocity_sup", "must be non-negative");
        p.stop_velocity_sup = *v;
    }
    if (auto v = c.number(j, at, "stop_energy")) {
        if (!(*v >= 0.0)) c.fail("flow.stop_energy", "must be non-negative");
        p.stop_energy = *v;
    }
    if (auto v = c.number(j, at, "projection_tol")) {
        if (!(*v > 0.0)) c.fail("flow.projection_tol", "must be positive");
        p.projection_tol = *v;
    }
    if (auto v = c.count(j, at, "trace_stride")) {
        if (*v < 1) c.fail("flow.trace_stride", "must be at least 1");
        p.trace_stride = static_cast<std::size_t>(*v);
    }
    if (auto v = c.number(j, at, "displacement_window")) {
        if (!(*v >= 0.0)) c.fail("flow.displacement_window", "must be non-negative");
        p.displacement_window = *v;
    }
}

void parse_audit(Checker& c, const Json& doc, RunConfig& cfg) {
    if (!doc.contains("audit")) return;
    const Json& j = doc["audit"];
    if (!c.object(j, "audit")) return;
    c.only(j, "audit", {"delta", "epsilon", "gap_bound"});
    if (auto v = c.number(j, "audit", "delta")) {
        if (!(*v > 0.0)) c.fail("audit.delta", "must be positive");
        cfg.audit.delta = *v;
    }
    if (auto v = c.number(j, "audit", "epsilon")) {
        if (!(*v > 0.0)) c.fail("audit.epsilon", "must be positive");
        cfg.audit.epsilon = *v;
    }
    if (auto v = c.number(j, "audit", "gap_bound")) {
        if (!(*v > 0.0)) c.fail("audit.gap_bound", "must be positive");
        cfg.audit.gap_bound = *v;
    }
}

}  // namespace

RunConfig parse_config(const Json& doc, const std::filesystem::path& base_dir) {
    Checker c;
    RunConfig cfg;
    if (!doc.is_object()) throw Error(ErrorCode::Config, "config must be a JSON object");
    c.only(doc, "", {"manifold", "initial", "flow", "schedule", "audit", "output_dir", "resolution", "seed"});

    parse_manifold(c, doc, cfg);
    parse_initial(c, doc, cfg, base_dir);
    parse_flow(c, doc, cfg);
    parse_audit(c, doc, cfg);

    if (auto s = c.numbers(doc, "", "schedule")) {
        cfg.schedule = *s;
        for (std::size_t i = 0; i < s->size(); ++i) {
            if (!((*s)[i] > 0.0) || (i > 0 && !((*s)[i] > (*s)[i - 1]))) {
                c.fail("schedule", "times must be positive and strictly increasing");
                break;
            }
        }
    }
    if (auto o = c.string(doc, "", "output_dir")) {
        std::filesystem::path p(*o);
        if (p.empty()) c.fail("output_dir", "must be non-empty");
        if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
        cfg.output_dir = p;
    }
    if (auto n = c.count(doc, "", "resolution")) {
        if (*n < 8) c.fail("resolution", "must be at least 8");
        cfg.resolution = static_cast<std::size_t>(*n);
    }
    if (auto s = c.count(doc, "", "seed")) cfg.seed = *s;

    try {
        (void)ManifoldDescriptor::from_name(cfg.manifold_kind, cfg.manifold_params);
    } catch (const Error& e) {
        c.fail("manifold", e.what());
    }

    if (!c.ok()) {
        std::string msg = "invalid config:";
        for (const auto& e : c.errors()) msg += "\n  " + e;
        throw Error(ErrorCode::Config, msg);
    }
    return cfg;
}

RunConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Config, "cannot open config file " + path.string());
    Json doc;
    try {
        doc = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw Error(ErrorCode::Config, path.string() + ": " + e.what());
    }
    return parse_config(doc, path.parent_path());
}

}  // namespace geoflow::cli
