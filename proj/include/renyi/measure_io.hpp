#pragma once

// Measure persistence (JSON) and import from Netpbm graymaps (P2/P5).
//
// JSON schema: {"dim": int, "atoms": [{"x": [reals], "w": real}, ...]}

#include <cctype>
#include <cstdint>
#include <fstream>
#include <algorithm>
#include <string>
#include <vector>

#include <json.hpp>

#include "renyi/error.hpp"
#include "renyi/measure.hpp"

namespace renyi {

inline nlohmann::json to_json(const DiscreteMeasure& mu) {
  nlohmann::json atoms = nlohmann::json::array();
  for (std::size_t i = 0; i < mu.size(); ++i) {
    auto p = mu.point(i);
    atoms.push_back({{"x", std::vector<double>(p.begin(), p.end())}, {"w", mu.weight(i)}});
  }
  return {{"dim", mu.dim()}, {"atoms", std::move(atoms)}};
}

inline DiscreteMeasure measure_from_json(const nlohmann::json& j) {
  detail::require(j.is_object(), "measure JSON must be an object");
  detail::require(j.contains("dim") && j["dim"].is_number_integer(), "measure JSON needs integer 'dim'");
  detail::require(j.contains("atoms") && j["atoms"].is_array(), "measure JSON needs an 'atoms' array");
  const int dim = j["dim"].get<int>();
  detail::require(dim >= 1, "measure JSON 'dim' must be >= 1");
  detail::require(!j["atoms"].empty(), "measure JSON has no atoms");
  std::vector<double> coords;
  std::vector<double> weights;
  for (const auto& atom : j["atoms"]) {
    detail::require(atom.is_object() && atom.contains("x") && atom["x"].is_array() &&
                        atom.contains("w") && atom["w"].is_number(),
                    "each atom needs an 'x' array and a numeric 'w'");
    detail::require(atom["x"].size() == static_cast<std::size_t>(dim),
                    "atom coordinate count does not match 'dim'");
    for (const auto& c : atom["x"]) {
      detail::require(c.is_number(), "atom coordinates must be numbers");
      coords.push_back(c.get<double>());
    }
    weights.push_back(atom["w"].get<double>());
  }
  return {dim, std::move(coords), std::move(weights)};
}

inline void save_json(const DiscreteMeasure& mu, const std::string& path) {
  std::ofstream out(path);
  detail::require(static_cast<bool>(out), "cannot open '" + path + "' for writing");
  // nlohmann writes doubles round-trip exact.
  out << to_json(mu).dump(1) << '\n';
  detail::require(static_cast<bool>(out), "failed writing '" + path + "'");
}

inline DiscreteMeasure load_json(const std::string& path) {
  std::ifstream in(path);
  detail::require(static_cast<bool>(in), "cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("malformed JSON in '" + path + "': " + e.what());
  }
  return measure_from_json(j);
}

namespace detail {

/// Next whitespace-delimited header token, skipping '#' comments.
inline std::string pgm_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {}
      if (!tok.empty()) break;
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  return tok;
}

inline long pgm_number(std::istream& in, const char* what) {
  const std::string tok = pgm_token(in);
  require(!tok.empty() && tok.find_first_not_of("0123456789") == std::string::npos,
          std::string("malformed PGM header: bad ") + what);
  return std::stol(tok);
}

}  // namespace detail

/// One atom per nonzero pixel at ((col+0.5), (row+0.5)) / max(width, height),
/// weighted by intensity / total intensity.
inline DiscreteMeasure from_pgm_image(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  detail::require(static_cast<bool>(in), "cannot open '" + path + "'");
  const std::string magic = detail::pgm_token(in);
  detail::require(magic == "P2" || magic == "P5", "not a PGM file (expected P2 or P5)");
  const long width = detail::pgm_number(in, "width");
  const long height = detail::pgm_number(in, "height");
  const long maxval = detail::pgm_number(in, "maxval");
  detail::require(width >= 1 && height >= 1, "malformed PGM header: empty image");
  detail::require(maxval >= 1 && maxval <= 65535, "malformed PGM header: maxval out of range");

  const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  std::vector<std::uint32_t> pixels(count);
  if (magic == "P2") {
    for (auto& v : pixels) {
      const long value = detail::pgm_number(in, "pixel");
      detail::require(value <= maxval, "PGM pixel exceeds maxval");
      v = static_cast<std::uint32_t>(value);
    }
  } else {
    // The single whitespace byte after maxval was consumed by pgm_token.
    const bool wide = maxval > 255;
    for (auto& v : pixels) {
      unsigned char b[2] = {0, 0};
      in.read(reinterpret_cast<char*>(b), wide ? 2 : 1);
      detail::require(static_cast<bool>(in), "PGM raster is truncated");
      v = wide ? (static_cast<std::uint32_t>(b[0]) << 8) | b[1] : b[0];
      detail::require(v <= static_cast<std::uint32_t>(maxval), "PGM pixel exceeds maxval");
    }
  }

  double total = 0.0;
  for (auto v : pixels) total += v;
  detail::require(total > 0.0, "PGM image is entirely zero");
  const double side = static_cast<double>(std::max(width, height));
  std::vector<double> coords;
  std::vector<double> weights;
  for (long row = 0; row < height; ++row) {
    for (long col = 0; col < width; ++col) {
      const auto v = pixels[static_cast<std::size_t>(row * width + col)];
      if (v == 0) continue;
      coords.push_back((col + 0.5) / side);
      coords.push_back((row + 0.5) / side);
      weights.push_back(v / total);
    }
  }
  return {2, std::move(coords), std::move(weights)};
}

}  // namespace renyi
