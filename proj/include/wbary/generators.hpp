#pragma once

#include "wbary/measures.hpp"

#include <cstdint>

namespace wbary {

// Worst-case family on the line: mu^1 = delta(0) and mu^2 = ... = mu^N =
// (delta(-1) + delta(1)) / 2 with uniform weights. Attains the a-priori
// error bounds of the approximation algorithms.
Problem gen_sharpness_instance(int n_measures, CostExponent p);

// N empirical measures with `atoms` uniform samples from the unit disk each,
// every cloud translated so its mean is exactly the origin. Pure function of
// (n_measures, atoms, seed).
Problem gen_unit_disk_cloud(int n_measures, int atoms, std::uint64_t seed);

// N elliptic rings rasterized as indicator measures on the grid
// {0,...,R-1}/R x {0,...,R-1}/R. Ring parameters (center jitter, radius,
// axis ratio in [0.3, 1], rotation) are drawn per measure; a draw whose
// raster comes out empty is retried on the next substream, at most 100
// times. Pure function of (n_measures, resolution, seed); p defaults to 2.
Problem gen_nested_ellipses(int n_measures, int resolution, std::uint64_t seed);

}  // namespace wbary
