#include "geoflow/error.hpp"
#include "geoflow/geodesy.hpp"
#include "geoflow/serialize.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <random>
#include <sstream>
#include <string>

using namespace geoflow;
namespace fs = std::filesystem;

namespace {

// Round trip through the textual form, as the CLI does.
io::Json reparse(const io::Json& j) { return io::Json::parse(io::dump(j)); }

FlowReport sample_report() {
    FlowParams p;
    p.dt = 2.5e-3;
    p.max_steps = 40;
    p.trace_stride = 7;
    p.displacement_window = 0.01;
    return run(oracle::latitude(0.7, 32), ManifoldDescriptor::sphere(), p);
}

std::size_t count_lines(const std::string& s) {
    std::size_t n = 0;
    for (char c : s) n += c == '\n';
    return n;
}

}  // namespace

TEST_CASE("loop and sweepout round trips are exact") {
    std::mt19937_64 rng(3);
    const auto s = ManifoldDescriptor::sphere();
    std::vector<Vec3> pts(17);
    for (auto& p : pts) p = oracle::random_tube_point(s, rng, 0.0);
    const DiscreteLoop loop(pts);
    CHECK(io::loop_from_json(reparse(io::to_json(loop))) == loop);

    const auto j = io::to_json(loop);
    CHECK(j["ambient_dim"] == 3);
    CHECK(j["n_points"] == 17);

    auto sw = latitude_sweepout(ManifoldDescriptor::ellipsoid(1.0, 1.1, 1.2), 9, 16, 0);
    CHECK(io::sweepout_from_json(reparse(io::to_json(sw))) == sw);

    FlowParams p;
    p.dt = 0.01;
    p.max_steps = 1000000;
    p.stop_energy = 0.0;
    p.stop_velocity_sup = 0.0;
    const auto t = tighten(latitude_sweepout(s, 5, 16), s, 0.05, p);
    const auto back = io::sweepout_from_json(reparse(io::to_json(t.sweepout)));
    CHECK(back == t.sweepout);
    CHECK(back.time() == doctest::Approx(0.05));
}

TEST_CASE("flow params, trace and report round trips are exact") {
    FlowParams p;
    p.dt = 1.0 / 3.0;
    p.scheme = Scheme::Explicit;
    p.max_steps = 123456789;
    p.stop_velocity_sup = 0.0;
    p.displacement_window = 0.01;
    CHECK(io::flow_params_from_json(reparse(io::to_json(p))) == p);

    const auto r = sample_report();
    CHECK(io::trace_from_json(reparse(io::to_json(r.trace))) == r.trace);

    const auto back = io::flow_report_from_json(reparse(io::to_json(r)));
    CHECK(back.params == r.params);
    CHECK(back.final_state == r.final_state);
    CHECK(back.trace == r.trace);
    CHECK(back.termination == r.termination);
    CHECK(back.initial_energy == r.initial_energy);
    CHECK(back.max_energy_increase == r.max_energy_increase);
    CHECK(back.max_window_displacement == r.max_window_displacement);
}

TEST_CASE("audit and width report round trips are exact") {
    const auto s = ManifoldDescriptor::sphere();
    const auto cat = GeodesicCatalog::for_manifold(s);
    const auto sw = latitude_sweepout(s, 9, 32);
    auto audits = near_max_audit(sw, {}, 0.5, cat, s);
    REQUIRE(audits.size() >= 2);
    audits[1].classification = Classification::CollapsedToPoint;
    CHECK(io::audits_from_json(reparse(io::audits_to_json(audits))) == audits);
    CHECK(io::audit_from_json(reparse(io::to_json(audits[1]))) == audits[1]);

    FlowParams p;
    p.dt = 0.01;
    p.max_steps = 1000000;
    p.displacement_window = 0.01;
    WidthOptions opt;
    opt.gap_bound = 1.0;
    opt.catalog = &cat;
    const std::vector<double> schedule = {0.05, 0.1};
    const auto w = width_estimate(sw, s, schedule, p, opt);
    CHECK(!w.near_max_audit.empty());
    CHECK(io::width_report_from_json(reparse(io::to_json(w))) == w);
    // byte-stable
    CHECK(io::dump(io::to_json(io::width_report_from_json(io::to_json(w)))) == io::dump(io::to_json(w)));
}

TEST_CASE("version checks") {
    const auto loop = oracle::great_circle({0, 0, 1}, 16);
    auto j = io::to_json(loop);
    CHECK(j["version"].get<std::string>().starts_with(std::to_string(io::kFormatMajor) + "."));

    j["version"] = "1.7";
    CHECK_NOTHROW(io::loop_from_json(j));

    for (const char* v : {"2.0", "0.9", "x", ""}) {
        j["version"] = v;
        try {
            io::loop_from_json(j);
            FAIL("expected format error for version ", v);
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::Format);
        }
    }
    j["version"] = 1;
    CHECK_THROWS_AS(io::loop_from_json(j), Error);
    j.erase("version");
    CHECK_THROWS_AS(io::loop_from_json(j), Error);

    auto sj = io::to_json(latitude_sweepout(ManifoldDescriptor::sphere(), 5, 16));
    sj["version"] = "2.0";
    CHECK_THROWS_AS(io::sweepout_from_json(sj), Error);
}

TEST_CASE("malformed documents") {
    auto j = io::to_json(oracle::great_circle({0, 0, 1}, 16));
    auto bad_dim = j;
    bad_dim["ambient_dim"] = 4;
    CHECK_THROWS_AS(io::loop_from_json(bad_dim), Error);
    auto bad_count = j;
    bad_count["n_points"] = 15;
    CHECK_THROWS_AS(io::loop_from_json(bad_count), Error);

    auto sj = io::to_json(latitude_sweepout(ManifoldDescriptor::sphere(), 5, 16));
    auto unsorted = sj;
    std::swap(unsorted["s_values"][1], unsorted["s_values"][2]);
    CHECK_THROWS_AS(io::sweepout_from_json(unsorted), Error);
}

TEST_CASE("csv layouts") {
    const auto r = sample_report();
    const auto csv = io::trace_to_csv(r.trace);
    CHECK(csv.starts_with("t,energy,sup_grad_sq,sup_vel_sq,dissipation,utt_l2\n"));
    CHECK(count_lines(csv) == r.trace.size() + 1);

    // the first data row parses back to the first record
    std::istringstream in(csv);
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(std::stod(row.substr(row.find(',') + 1)) == r.trace.energy[0]);

    const auto s = ManifoldDescriptor::sphere();
    const auto audits = near_max_audit(latitude_sweepout(s, 9, 32), {}, 0.5, GeodesicCatalog::for_manifold(s), s);
    const auto acsv = io::audits_to_csv(audits);
    CHECK(acsv.starts_with("s,energy,residual_sup,residual_l2,match_id,c1_dist\n"));
    CHECK(count_lines(acsv) == audits.size() + 1);
    CHECK(acsv.find("great_circle") != std::string::npos);
}

TEST_CASE("format_double") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-30.0, 30.0);
    for (int i = 0; i < 2000; ++i) {
        const double v = std::ldexp(u(rng), static_cast<int>(u(rng)));
        CHECK(std::stod(io::format_double(v)) == v);
    }
    CHECK(io::format_double(0.1) == "0.1");
    CHECK(io::format_double(1.0) == "1");
    CHECK(io::format_double(-2.5e-300) == "-2.5e-300");
    const double tiny = std::numeric_limits<double>::denorm_min();
    CHECK(std::strtod(io::format_double(tiny).c_str(), nullptr) == tiny);
}

TEST_CASE("file helpers") {
    const fs::path dir = fs::temp_directory_path() / "geoflow_serialize_test";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const auto path = dir / "a.json";

    io::write_file_atomic(path, "{\"version\": \"1.0\"}");
    CHECK(io::read_file(path) == "{\"version\": \"1.0\"}");
    io::write_file_atomic(path, "second");
    CHECK(io::read_file(path) == "second");
    // no temporaries left behind
    std::size_t entries = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++entries;
    CHECK(entries == 1);

    try {
        io::read_file(dir / "missing.json");
        FAIL("expected io error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Io);
    }
    io::write_file_atomic(path, "{not json");
    CHECK_THROWS_AS(io::read_json(path), Error);
    CHECK_THROWS_AS(io::write_file_atomic(dir / "no_such_dir" / "x.json", "x"), Error);

    const auto loop = oracle::latitude(0.4, 16);
    io::write_file_atomic(path, io::dump(io::to_json(loop)));
    CHECK(io::loop_from_json(io::read_json(path)) == loop);
    fs::remove_all(dir);
}
