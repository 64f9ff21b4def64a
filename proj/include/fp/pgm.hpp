#pragma once

#include <string>

#include "fp/raster.hpp"

namespace fp {

enum class PgmFormat { P2, P5 };

// Reads an 8-bit PGM (ASCII P2 or binary P5). Values are scaled linearly to
// [0, 255] when the file's maxval is below 255. Throws IoError if the file
// cannot be opened and ParseError on malformed or 16-bit content.
GrayImage read_pgm(const std::string& path);

// Writes an 8-bit PGM with maxval 255. Pixels are clamped to [0, 255] and
// rounded to nearest. Output bytes are deterministic for a given image.
void write_pgm(const std::string& path, const GrayImage& image,
               PgmFormat format = PgmFormat::P5);

} // namespace fp
