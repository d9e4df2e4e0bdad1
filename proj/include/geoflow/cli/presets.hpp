#pragma once

#include "geoflow/curve.hpp"
#include "geoflow/manifold.hpp"

#include <cstdint>

namespace geoflow::cli {

/// Great circle of the unit sphere in the plane orthogonal to `axis`.
DiscreteLoop great_circle_loop(const Vec3& axis, std::size_t n);

/// Latitude circle at polar angle phi from +z on the unit sphere.
DiscreteLoop latitude_loop(double phi, std::size_t n);

/// The z = 0 section of the manifold (equator, xy principal ellipse or outer torus equator)
/// moved along the surface by a random smooth bump of sup-amplitude `amplitude`: Fourier modes
/// 1..4 with coefficients drawn from mt19937_64(seed), then projected onto M.
DiscreteLoop perturbed_loop(const ManifoldDescriptor& m, std::size_t n, std::uint64_t seed, double amplitude);

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit draw.
inline double unit_double(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

}  // namespace geoflow::cli
