#pragma once

#include <string>

#include "shadowroad/image.hpp"

namespace shadowroad {

/// Loads an 8-bit image as PNG, PPM (P6) or PGM (P5); format is sniffed
/// from the file content. Gray files expand to three equal channels.
/// Throws Error with "unreadable file:" / "unsupported format:" prefixes.
RgbImage load_image(const std::string& path);

/// Writes 8-bit output; format chosen by extension (.png, .ppm).
void save_image(const RgbImage& img, const std::string& path);

/// Masks are 8-bit PGM or PNG holding exactly 0 and 255.
void save_mask(const BinaryMask& mask, const std::string& path);
BinaryMask load_mask(const std::string& path);

/// Debug helper: affine-maps [lo, hi] to 0..255 and writes a PGM.
void save_gray(const GrayMap& map, double lo, double hi, const std::string& path);

}  // namespace shadowroad
