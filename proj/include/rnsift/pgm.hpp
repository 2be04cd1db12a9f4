#pragma once

#include <string>

#include "rnsift/image.hpp"

namespace rnsift {

/// Read an 8-bit PGM image (P2 ASCII or P5 binary). Throws std::runtime_error
/// on malformed input or unsupported format.
Image read_pgm(const std::string& path);

/// Write a binary (P5) 8-bit PGM. Pixel values are clamped to [0,255] and
/// rounded to the nearest integer.
void write_pgm(const Image& image, const std::string& path);

} // namespace rnsift
