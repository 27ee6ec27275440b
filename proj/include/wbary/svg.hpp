#pragma once

#include "wbary/measures.hpp"

#include <string>

namespace wbary {

// Plain SVG 1.1 scatter plot of a planar measure: one circle per atom, disc
// area proportional to mass, viewport fitted to the data bounding box with a
// 5% margin. Identical input yields byte-identical output.
std::string measure_to_svg(const DiscreteMeasure& measure);

}  // namespace wbary
