#include "wbary/generators.hpp"

#include "wbary/rng.hpp"

#include <cmath>
#include <utility>

namespace wbary {

Problem gen_sharpness_instance(int n_measures, CostExponent p) {
  if (n_measures < 2) throw ValidationError("sharpness instance needs N >= 2");

  Matrix origin(1, 1);
  origin(0, 0) = 0.0;
  Vector one(1);
  one[0] = 1.0;

  Matrix pm(2, 1);
  pm(0, 0) = -1.0;
  pm(1, 0) = 1.0;
  Vector half(2);
  half[0] = half[1] = 0.5;

  std::vector<DiscreteMeasure> measures;
  measures.reserve(static_cast<std::size_t>(n_measures));
  measures.emplace_back(origin, one);
  for (int i = 1; i < n_measures; ++i) measures.emplace_back(pm, half);

  return make_problem(std::move(measures), Weights::uniform(n_measures), p);
}

Problem gen_unit_disk_cloud(int n_measures, int atoms, std::uint64_t seed) {
  if (n_measures < 2) throw ValidationError("unit disk cloud needs N >= 2");
  if (atoms < 1) throw ValidationError("unit disk cloud needs at least one atom per measure");

  std::vector<DiscreteMeasure> measures;
  measures.reserve(static_cast<std::size_t>(n_measures));
  for (int i = 0; i < n_measures; ++i) {
    Rng rng = Rng::substream(seed, 0x6469736bull, static_cast<std::uint64_t>(i));
    Matrix pts(atoms, 2);
    for (int k = 0; k < atoms; ++k) {
      const double radius = std::sqrt(rng.uniform());
      const double angle = rng.uniform() * 6.283185307179586476925286766559;
      pts(k, 0) = radius * std::cos(angle);
      pts(k, 1) = radius * std::sin(angle);
    }
    pts.rowwise() -= pts.colwise().mean();
    measures.emplace_back(std::move(pts),
                          Vector::Constant(atoms, 1.0 / static_cast<double>(atoms)));
  }
  return make_problem(std::move(measures), Weights::uniform(n_measures), CostExponent::p2);
}

namespace {

// One elliptic ring on the unit square raster; empty result means the draw
// was degenerate and the caller retries.
bool rasterize_ring(int resolution, Rng& rng, Matrix& pts_out, Vector& w_out) {
  const double cx = 0.5 + rng.uniform(-0.05, 0.05);
  const double cy = 0.5 + rng.uniform(-0.05, 0.05);
  const double major = rng.uniform(0.18, 0.34);
  const double ratio = rng.uniform(0.3, 1.0);
  const double minor = major * ratio;
  const double angle = rng.uniform(0.0, 3.14159265358979323846);
  const double cos_a = std::cos(angle);
  const double sin_a = std::sin(angle);
  const double thickness = 2.0 / static_cast<double>(resolution);

  std::vector<double> xs, ys;
  for (int r = 0; r < resolution; ++r) {
    for (int c = 0; c < resolution; ++c) {
      const double x = static_cast<double>(c) / resolution;
      const double y = static_cast<double>(resolution - 1 - r) / resolution;
      const double dx = x - cx;
      const double dy = y - cy;
      const double u = cos_a * dx + sin_a * dy;
      const double v = -sin_a * dx + cos_a * dy;
      const double q = std::sqrt((u / major) * (u / major) + (v / minor) * (v / minor));
      if (std::abs(q - 1.0) * minor <= 0.5 * thickness) {
        xs.push_back(x);
        ys.push_back(y);
      }
    }
  }
  if (xs.empty()) return false;

  pts_out.resize(static_cast<Index>(xs.size()), 2);
  for (std::size_t k = 0; k < xs.size(); ++k) {
    pts_out(static_cast<Index>(k), 0) = xs[k];
    pts_out(static_cast<Index>(k), 1) = ys[k];
  }
  w_out = Vector::Ones(static_cast<Index>(xs.size()));
  return true;
}

}  // namespace

Problem gen_nested_ellipses(int n_measures, int resolution, std::uint64_t seed) {
  if (n_measures < 2) throw ValidationError("ellipse data set needs N >= 2");
  if (resolution < 8) throw ValidationError("ellipse raster needs resolution >= 8");

  std::vector<DiscreteMeasure> measures;
  measures.reserve(static_cast<std::size_t>(n_measures));
  for (int i = 0; i < n_measures; ++i) {
    bool done = false;
    for (int attempt = 0; attempt < 100 && !done; ++attempt) {
      Rng rng = Rng::substream(seed, 0x656c6c69ull + static_cast<std::uint64_t>(attempt),
                               static_cast<std::uint64_t>(i));
      Matrix pts;
      Vector w;
      if (rasterize_ring(resolution, rng, pts, w)) {
        measures.emplace_back(std::move(pts), std::move(w));
        done = true;
      }
    }
    if (!done)
      throw ValidationError("ellipse raster came out empty 100 times in a row for measure " +
                            std::to_string(i));
  }
  return make_problem(std::move(measures), Weights::uniform(n_measures), CostExponent::p2);
}

}  // namespace wbary
