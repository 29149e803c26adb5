#pragma once

#include <string>

#include "vgrid/frame.hpp"

namespace vgrid {

// 8- or 16-bit PNG, grayscale or RGB, intensities mapped linearly to [0, 1].
Frame load_frame(const std::string& path);
void save_frame(const std::string& path, const Frame& frame, int bit_depth = 16);

// Single-channel PFM ("Pf"), bit-exact float round trip. Writes the
// little-endian variant (negative scale); reads either endianness. Depths
// must be finite and positive; violations are reported with the pixel.
DepthMap load_depth(const std::string& path);
void save_depth(const std::string& path, const DepthMap& depth);

}  // namespace vgrid
