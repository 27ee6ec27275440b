#include "wbary/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace wbary {

namespace {

std::string fixed(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.4f", value);
  return buffer;
}

}  // namespace

std::string measure_to_svg(const DiscreteMeasure& measure) {
  if (measure.dim() != 2) throw ValidationError("SVG output needs a planar measure (d = 2)");

  const double view = 640.0;
  Vector lo = measure.points().colwise().minCoeff().transpose();
  Vector hi = measure.points().colwise().maxCoeff().transpose();
  Vector span = (hi - lo).cwiseMax(1e-9);
  lo -= 0.05 * span;
  hi += 0.05 * span;
  span = hi - lo;

  const double scale = view / std::max(span[0], span[1]);
  const double width = span[0] * scale;
  const double height = span[1] * scale;

  // Disc area proportional to mass; the heaviest atom gets a fixed radius.
  const double max_mass = measure.weights().maxCoeff();
  const double max_radius = 0.035 * std::max(width, height);

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + fixed(width) +
         "\" height=\"" + fixed(height) + "\" viewBox=\"0 0 " + fixed(width) + " " +
         fixed(height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (Index k = 0; k < measure.size(); ++k) {
    const double x = (measure.points()(k, 0) - lo[0]) * scale;
    const double y = height - (measure.points()(k, 1) - lo[1]) * scale;  // y axis up
    const double radius = max_radius * std::sqrt(measure.weights()[k] / max_mass);
    svg += "<circle cx=\"" + fixed(x) + "\" cy=\"" + fixed(y) + "\" r=\"" + fixed(radius) +
           "\" fill=\"#1f5fa8\" fill-opacity=\"0.85\"/>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace wbary
