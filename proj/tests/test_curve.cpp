#include "geoflow/curve.hpp"
#include "geoflow/error.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace geoflow;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<Vec3> equator_samples(std::size_t n, double z = 0.0) {
    std::vector<Vec3> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n);
        out[i] = {std::cos(t), std::sin(t), z};
    }
    return out;
}

// Smooth random loop on the sphere: a great circle tilted by low Fourier modes.
DiscreteLoop random_loop(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-0.2, 0.2);
    const double c[6] = {u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
    std::vector<Vec3> pts(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n);
        const Vec3 p{std::cos(t) + c[0] * std::sin(2 * t), std::sin(t) + c[1] * std::cos(3 * t),
                     c[2] + c[3] * std::cos(t) + c[4] * std::sin(2 * t) + c[5] * std::cos(3 * t)};
        pts[i] = p / norm(p);
    }
    return DiscreteLoop(std::move(pts));
}

}  // namespace

TEST_CASE("make_loop") {
    const auto s = ManifoldDescriptor::sphere();
    const auto point = make_loop(std::vector<Vec3>(64, Vec3{1, 0, 0}), s);
    CHECK(point.size() == 64);
    CHECK(point.is_point_loop());
    CHECK(point.point(17) == Vec3{1, 0, 0});

    const auto eq = equator_samples(64);
    const auto loop = make_loop(eq, s);
    for (std::size_t i = 0; i < 64; ++i) CHECK(norm(loop.point(i) - eq[i]) <= 1e-14);

    const auto lifted = make_loop(equator_samples(64, 0.1), s);
    CHECK(lifted.max_constraint_residual(s) <= 1e-12);
    CHECK_NOTHROW(require_on_manifold(lifted, s));

    try {
        make_loop(std::vector<Vec3>(7, Vec3{1, 0, 0}), s);
        FAIL("expected too-few-points");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::TooFewPoints);
    }
    try {
        make_loop(equator_samples(16, 2.0), s);
        FAIL("expected outside-tube");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::OutsideTube);
    }
    try {
        require_on_manifold(DiscreteLoop(equator_samples(16, 0.1)), s);
        FAIL("expected off-manifold");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::OffManifold);
    }
}

TEST_CASE("energy examples") {
    CHECK(energy(DiscreteLoop::constant({0, 0, 1}, 64)) == 0.0);

    // Square through (+-1,0,0), (0,+-1,0): four chords of squared length 2, dtheta = pi/2.
    const std::vector<double> square = {1, 0, 0, 0, 1, 0, -1, 0, 0, 0, -1, 0};
    CHECK(discrete_energy(square) == doctest::Approx(8.0 / kPi).epsilon(1e-15));

    for (std::size_t n : {64, 256, 1024}) {
        const auto gc = oracle::great_circle({0, 0, 1}, n);
        CHECK(std::abs(energy(gc) - oracle::polygon_energy(n)) <= 1e-10);
    }
    CHECK(std::abs(energy(oracle::great_circle({0, 0, 1}, 256)) - 3.14143) <= 1e-5);
}

TEST_CASE("energy invariants") {
    const auto s = ManifoldDescriptor::sphere();
    const Mat3 r = rotation({0.3, -0.5, 0.8}, 1.234);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto c = random_loop(128, seed);
        CHECK(energy(c) > 0.0);
        CHECK(std::abs(energy(oracle::transform(r, c)) - energy(c)) <= 1e-12 * energy(c));
        CHECK(c.max_constraint_residual(s) <= 1e-14);
    }
}

TEST_CASE("energy refinement order on great circles") {
    std::vector<double> ns, errs;
    for (std::size_t n : {32, 64, 128, 256}) {
        const double en = energy(oracle::great_circle({1, 2, 3}, n));
        const double e2n = energy(oracle::great_circle({1, 2, 3}, 2 * n));
        ns.push_back(static_cast<double>(n));
        errs.push_back(std::abs(en - e2n));
    }
    CHECK(-oracle::loglog_slope(ns, errs) >= 1.9);
}

TEST_CASE("derivatives") {
    const auto zero = derivative(DiscreteLoop::constant({0, 1, 0}, 32));
    for (const auto& d : zero) CHECK(norm(d) == 0.0);

    const std::size_t n = 256;
    const auto gc = oracle::great_circle({0, 0, 1}, n);
    for (const auto& d : derivative(gc)) CHECK(std::abs(norm(d) - oracle::polygon_central_speed(n)) <= 1e-13);
    CHECK(oracle::polygon_central_speed(n) == doctest::Approx(0.9999).epsilon(1e-4));

    // linearity
    const auto a = random_loop(64, 3);
    const auto b = random_loop(64, 4);
    std::vector<double> sum(a.flat().size());
    for (std::size_t k = 0; k < sum.size(); ++k) sum[k] = a.flat()[k] + b.flat()[k];
    const auto ds = derivative(DiscreteLoop::from_flat(sum));
    const auto da = derivative(a);
    const auto db = derivative(b);
    for (std::size_t i = 0; i < 64; ++i) CHECK(norm(ds[i] - (da[i] + db[i])) <= 1e-12);

    // second difference of the inscribed polygon points to the centre with the chord factor
    const auto dd = second_derivative(gc);
    const double h = gc.dtheta();
    const double expect = 2.0 * (1.0 - std::cos(h)) / (h * h);
    for (std::size_t i = 0; i < n; ++i) CHECK(norm(dd[i] + expect * gc.point(i)) <= 1e-9);
}

TEST_CASE("sup_grad_sq") {
    CHECK(sup_grad_sq(DiscreteLoop::constant({0, 1, 0}, 32)) == 0.0);
    const std::size_t n = 256;
    CHECK(std::abs(sup_grad_sq(oracle::great_circle({0, 0, 1}, n)) - oracle::polygon_sup_grad_sq(n)) <= 1e-13);
    CHECK(oracle::polygon_sup_grad_sq(n) == doctest::Approx(0.99995).epsilon(1e-5));
    for (double phi : {0.3, 0.7852, 1.2}) {
        const double s = std::sin(phi);
        CHECK(std::abs(sup_grad_sq(oracle::latitude(phi, n)) - s * s * oracle::polygon_sup_grad_sq(n)) <= 1e-13);
    }
}

TEST_CASE("l2 and h1 distances") {
    const auto a = random_loop(64, 8);
    CHECK(l2_distance(a, a) == 0.0);
    CHECK(h1_distance(a, a) == 0.0);

    const Vec3 p{1, 0, 0};
    const Vec3 q{0, 0.6, 0.8};
    const auto pl = DiscreteLoop::constant(p, 64);
    const auto ql = DiscreteLoop::constant(q, 64);
    CHECK(l2_distance(pl, ql) == doctest::Approx(std::sqrt(2.0 * kPi) * norm(p - q)).epsilon(1e-14));
    CHECK(h1_distance(pl, ql) == doctest::Approx(l2_distance(pl, ql)).epsilon(1e-15));

    // coaxial circles
    const auto l1 = oracle::latitude(0.9, 128);
    const auto l2 = oracle::latitude(1.1, 128);
    CHECK(h1_distance(l1, l2) == doctest::Approx(oracle::coaxial_circle_h1(128, std::sin(0.9), std::cos(0.9),
                                                                          std::sin(1.1), std::cos(1.1)))
                                     .epsilon(1e-12));

    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto x = random_loop(96, 100 + seed);
        const auto y = random_loop(96, 200 + seed);
        const auto z = random_loop(96, 300 + seed);
        CHECK(l2_distance(x, z) <= l2_distance(x, y) + l2_distance(y, z) + 1e-14);
        CHECK(h1_distance(x, z) <= h1_distance(x, y) + h1_distance(y, z) + 1e-14);
        CHECK(h1_distance(x, y) >= l2_distance(x, y));
    }

    try {
        l2_distance(random_loop(64, 1), random_loop(65, 1));
        FAIL("expected mismatched-resolution");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MismatchedResolution);
    }
}

TEST_CASE("cyclic alignment") {
    const auto c = random_loop(128, 42);
    const auto al = align_cyclic(c, oracle::shifted(c, 37));
    CHECK(al.distance == 0.0);
    CHECK(al.shift == 37);
    CHECK(!al.reversed);

    const auto rev = align_cyclic(c, oracle::reversed(c));
    CHECK(rev.distance <= 1e-15);
    CHECK(rev.reversed);
    CHECK(c1_distance(c, oracle::reversed(c), rev.shift, true) == rev.distance);

    // equator against a latitude circle, and two generic loops, against exhaustive search
    const auto eq = oracle::great_circle({0, 0, 1}, 128);
    const auto lat = oracle::latitude(kPi / 2 - 0.1, 128);
    for (const auto& [a, b] : {std::pair{eq, lat}, std::pair{random_loop(128, 5), random_loop(128, 6)},
                               std::pair{c, oracle::reversed(oracle::shifted(random_loop(128, 7), 3))}}) {
        const auto fast = align_cyclic(a, b);
        const auto brute = oracle::brute_align(a, b);
        CHECK(fast.distance == doctest::Approx(brute.distance).epsilon(1e-14));
        CHECK(fast.shift == brute.shift);
        CHECK(fast.reversed == brute.reversed);
    }
    // latitude vs equator: |position| = 1 - sin(phi)... plus the speed mismatch
    const double phi = kPi / 2 - 0.1;
    const double pos = std::sqrt((1 - std::sin(phi)) * (1 - std::sin(phi)) + std::cos(phi) * std::cos(phi));
    const double vel = (1 - std::sin(phi)) * oracle::polygon_central_speed(128);
    CHECK(align_cyclic(eq, lat).distance == doctest::Approx(pos + vel).epsilon(1e-12));

    CHECK_THROWS_AS(align_cyclic(c, random_loop(64, 1)), Error);
}
