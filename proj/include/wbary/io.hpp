#pragma once

#include "wbary/measures.hpp"

#include <filesystem>
#include <string>

namespace wbary {

enum class MeasureFormat { Auto, Json, Csv, ImagePgm };

// Loads a measure from disk.
//
//   json  {"format": 1, "d": d, "points": [[...], ...], "weights": [...]}
//         The weights are probabilities; a sum farther than 1e-6 from one is
//         rejected as corrupt, anything closer is silently renormalized.
//   csv   one row per atom, columns x_1,...,x_d,w, optional header line.
//         The w column carries raw masses and is normalized by its sum.
//   pgm   8-bit grayscale, P2 or P5. Pixel (r, c) of an HxW image becomes
//         the atom (c/W, (H-1-r)/H) with mass proportional to intensity;
//         zero pixels are dropped.
//
// Format Auto dispatches on the file extension (.json/.csv/.pgm).
DiscreteMeasure load_measure(const std::filesystem::path& path,
                             MeasureFormat format = MeasureFormat::Auto);

void save_measure_json(const DiscreteMeasure& measure, const std::filesystem::path& path);

// Serializer for the same schema load_measure's json branch reads.
std::string measure_to_json_string(const DiscreteMeasure& measure);

DiscreteMeasure measure_from_json_string(const std::string& text, const std::string& origin);

}  // namespace wbary
