#include "wbary/io.hpp"

#include <json.hpp>

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace wbary {

namespace {

using nlohmann::json;

[[noreturn]] void reject(const std::string& origin, const std::string& why) {
  throw ValidationError(origin + ": " + why);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

DiscreteMeasure from_json(const json& doc, const std::string& origin) {
  if (!doc.is_object()) reject(origin, "expected a JSON object");
  if (!doc.contains("d") || !doc.contains("points") || !doc.contains("weights"))
    reject(origin, "missing one of the keys d/points/weights");
  const Index d = doc.at("d").get<Index>();
  if (d < 1) reject(origin, "dimension must be >= 1");
  const auto& jpoints = doc.at("points");
  const auto& jweights = doc.at("weights");
  if (!jpoints.is_array() || !jweights.is_array()) reject(origin, "points/weights must be arrays");
  const Index n = static_cast<Index>(jpoints.size());
  if (n == 0) reject(origin, "empty support");
  if (static_cast<Index>(jweights.size()) != n)
    reject(origin, "points and weights disagree in length");

  Matrix pts(n, d);
  Vector w(n);
  for (Index k = 0; k < n; ++k) {
    const auto& row = jpoints[static_cast<std::size_t>(k)];
    if (!row.is_array() || static_cast<Index>(row.size()) != d)
      reject(origin, "point " + std::to_string(k) + " does not have " + std::to_string(d) +
                         " coordinates");
    for (Index j = 0; j < d; ++j) {
      const auto& v = row[static_cast<std::size_t>(j)];
      if (!v.is_number()) reject(origin, "non-numeric coordinate in point " + std::to_string(k));
      pts(k, j) = v.get<double>();
    }
    const auto& jw = jweights[static_cast<std::size_t>(k)];
    if (!jw.is_number()) reject(origin, "non-numeric weight at atom " + std::to_string(k));
    w[k] = jw.get<double>();
  }
  if (!pts.allFinite()) reject(origin, "non-finite coordinate");
  if (!w.allFinite()) reject(origin, "non-finite weight");
  if ((w.array() < 0.0).any()) reject(origin, "negative weight");

  // JSON weights claim to be probabilities. Quantization noise is fine,
  // anything beyond 1e-6 indicates a corrupt file.
  const double total = stable_sum(w);
  if (std::abs(total - 1.0) > 1e-6)
    reject(origin, "weights sum to " + std::to_string(total) + ", expected 1 within 1e-6");

  try {
    return DiscreteMeasure(std::move(pts), std::move(w));
  } catch (const ValidationError& e) {
    reject(origin, e.what());
  }
}

DiscreteMeasure from_csv(const std::string& text, const std::string& origin) {
  std::vector<std::vector<double>> rows;
  std::istringstream lines(text);
  std::string line;
  Index line_no = 0;
  bool maybe_header = true;
  while (std::getline(lines, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    bool blank = true;
    for (char c : line)
      if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
    if (blank) continue;

    std::vector<double> values;
    std::istringstream cells(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(cells, cell, ',')) {
      try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
        if (used != cell.size()) numeric = false;
        values.push_back(v);
      } catch (const std::exception&) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (maybe_header) {
        maybe_header = false;  // tolerated header line
        continue;
      }
      reject(origin, "non-numeric cell on line " + std::to_string(line_no));
    }
    maybe_header = false;
    if (values.size() < 2)
      reject(origin, "line " + std::to_string(line_no) + " needs at least x_1 and w");
    if (!rows.empty() && values.size() != rows.front().size())
      reject(origin, "inconsistent column count on line " + std::to_string(line_no));
    rows.push_back(std::move(values));
  }
  if (rows.empty()) reject(origin, "no data rows");

  const Index n = static_cast<Index>(rows.size());
  const Index d = static_cast<Index>(rows.front().size()) - 1;
  Matrix pts(n, d);
  Vector w(n);
  for (Index k = 0; k < n; ++k) {
    for (Index j = 0; j < d; ++j) pts(k, j) = rows[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
    w[k] = rows[static_cast<std::size_t>(k)][static_cast<std::size_t>(d)];
  }
  try {
    return DiscreteMeasure(std::move(pts), std::move(w));
  } catch (const ValidationError& e) {
    reject(origin, e.what());
  }
}

// P2 (ASCII) and P5 (binary) grayscale, 8 bit.
DiscreteMeasure from_pgm(const std::string& bytes, const std::string& origin) {
  std::size_t pos = 0;
  auto skip_space_and_comments = [&] {
    for (;;) {
      while (pos < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
      if (pos < bytes.size() && bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
        continue;
      }
      return;
    }
  };
  auto next_int = [&]() -> long {
    skip_space_and_comments();
    std::size_t start = pos;
    while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) ++pos;
    if (pos == start) reject(origin, "malformed PGM header");
    return std::stol(bytes.substr(start, pos - start));
  };

  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '5'))
    reject(origin, "not a P2/P5 PGM file");
  const bool binary = bytes[1] == '5';
  pos = 2;
  const long width = next_int();
  const long height = next_int();
  const long maxval = next_int();
  if (width <= 0 || height <= 0) reject(origin, "bad PGM dimensions");
  if (maxval <= 0 || maxval > 255) reject(origin, "only 8-bit PGM supported");

  std::vector<long> pixels(static_cast<std::size_t>(width * height));
  if (binary) {
    ++pos;  // single whitespace byte after maxval
    if (bytes.size() - pos < pixels.size()) reject(origin, "truncated PGM payload");
    for (std::size_t i = 0; i < pixels.size(); ++i)
      pixels[i] = static_cast<unsigned char>(bytes[pos + i]);
  } else {
    for (auto& px : pixels) px = next_int();
  }
  for (long px : pixels)
    if (px < 0 || px > maxval) reject(origin, "pixel value out of range");

  long nonzero = 0;
  for (long px : pixels)
    if (px > 0) ++nonzero;
  if (nonzero == 0) reject(origin, "image has zero total intensity");

  // Pixel (r, c) -> (c/W, (H-1-r)/H): origin bottom-left on the unit square.
  Matrix pts(nonzero, 2);
  Vector w(nonzero);
  Index atom = 0;
  for (long r = 0; r < height; ++r) {
    for (long c = 0; c < width; ++c) {
      const long px = pixels[static_cast<std::size_t>(r * width + c)];
      if (px == 0) continue;
      pts(atom, 0) = static_cast<double>(c) / static_cast<double>(width);
      pts(atom, 1) = static_cast<double>(height - 1 - r) / static_cast<double>(height);
      w[atom] = static_cast<double>(px);
      ++atom;
    }
  }
  return DiscreteMeasure(std::move(pts), std::move(w));
}

MeasureFormat detect_format(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (ext == ".json") return MeasureFormat::Json;
  if (ext == ".csv") return MeasureFormat::Csv;
  if (ext == ".pgm") return MeasureFormat::ImagePgm;
  throw ValidationError("cannot infer measure format from '" + path.string() +
                        "' (expected .json, .csv or .pgm)");
}

}  // namespace

DiscreteMeasure load_measure(const std::filesystem::path& path, MeasureFormat format) {
  if (format == MeasureFormat::Auto) format = detect_format(path);
  const std::string text = read_file(path);
  const std::string origin = path.string();
  switch (format) {
    case MeasureFormat::Json:
      return measure_from_json_string(text, origin);
    case MeasureFormat::Csv:
      return from_csv(text, origin);
    case MeasureFormat::ImagePgm:
      return from_pgm(text, origin);
    default:
      throw ValidationError("unknown measure format");
  }
}

DiscreteMeasure measure_from_json_string(const std::string& text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(origin + ": JSON parse failure: " + e.what());
  }
  return from_json(doc, origin);
}

std::string measure_to_json_string(const DiscreteMeasure& measure) {
  json doc;
  doc["format"] = 1;
  doc["d"] = measure.dim();
  json points = json::array();
  json weights = json::array();
  for (Index k = 0; k < measure.size(); ++k) {
    json row = json::array();
    for (Index j = 0; j < measure.dim(); ++j) row.push_back(measure.points()(k, j));
    points.push_back(std::move(row));
    weights.push_back(measure.weights()[k]);
  }
  doc["points"] = std::move(points);
  doc["weights"] = std::move(weights);
  return doc.dump(2) + "\n";
}

void save_measure_json(const DiscreteMeasure& measure, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << measure_to_json_string(measure);
  if (!out) throw ValidationError("write failure on " + path.string());
}

}  // namespace wbary
