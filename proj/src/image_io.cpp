#include "vgrid/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace vgrid {

namespace {

struct FileCloser {
  void operator()(FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;

[[noreturn]] void png_error_thrower(png_structp png, png_const_charp msg) {
  (void)png;
  throw std::runtime_error(std::string("png: ") + msg);
}

void png_warning_sink(png_structp, png_const_charp) {}

bool host_is_little_endian() {
  uint16_t probe = 1;
  uint8_t byte;
  std::memcpy(&byte, &probe, 1);
  return byte == 1;
}

}  // namespace

Frame load_frame(const std::string& path) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) throw std::runtime_error("png: cannot open '" + path + "'");

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_thrower,
                                           png_warning_sink);
  if (!png) throw std::runtime_error("png: allocation failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw std::runtime_error("png: allocation failed");
  }

  try {
    png_init_io(png, file.get());
    png_read_info(png, info);

    png_uint_32 width = png_get_image_width(png, info);
    png_uint_32 height = png_get_image_height(png, info);
    int bit_depth = png_get_bit_depth(png, info);
    int color_type = png_get_color_type(png, info);

    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    png_read_update_info(png, info);

    bit_depth = png_get_bit_depth(png, info);
    color_type = png_get_color_type(png, info);
    if (bit_depth != 8 && bit_depth != 16) {
      throw std::runtime_error("png: unsupported bit depth in '" + path + "'");
    }
    int channels;
    if (color_type == PNG_COLOR_TYPE_GRAY) {
      channels = 1;
    } else if (color_type == PNG_COLOR_TYPE_RGB) {
      channels = 3;
    } else {
      throw std::runtime_error("png: unsupported color type in '" + path + "'");
    }

    Frame frame(static_cast<int>(height), static_cast<int>(width), channels);
    size_t row_bytes = png_get_rowbytes(png, info);
    std::vector<uint8_t> row(row_bytes);
    const float denom = bit_depth == 8 ? 255.0f : 65535.0f;
    for (png_uint_32 y = 0; y < height; ++y) {
      png_read_row(png, row.data(), nullptr);
      for (png_uint_32 x = 0; x < width; ++x) {
        for (int c = 0; c < channels; ++c) {
          uint32_t v;
          if (bit_depth == 8) {
            v = row[x * channels + c];
          } else {
            size_t o = (x * channels + c) * 2;  // network byte order
            v = static_cast<uint32_t>(row[o]) << 8 | row[o + 1];
          }
          frame.at(static_cast<int>(y), static_cast<int>(x), c) = static_cast<float>(v) / denom;
        }
      }
    }
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return frame;
  } catch (...) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw;
  }
}

void save_frame(const std::string& path, const Frame& frame, int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16) {
    throw std::invalid_argument("png: bit depth must be 8 or 16");
  }
  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) throw std::runtime_error("png: cannot create '" + path + "'");

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_thrower,
                                            png_warning_sink);
  if (!png) throw std::runtime_error("png: allocation failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw std::runtime_error("png: allocation failed");
  }

  try {
    png_init_io(png, file.get());
    int color_type = frame.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB;
    png_set_IHDR(png, info, frame.width, frame.height, bit_depth, color_type, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    const long maxval = bit_depth == 8 ? 255 : 65535;
    std::vector<uint8_t> row(static_cast<size_t>(frame.width) * frame.channels *
                             (bit_depth == 8 ? 1 : 2));
    for (int y = 0; y < frame.height; ++y) {
      for (int x = 0; x < frame.width; ++x) {
        for (int c = 0; c < frame.channels; ++c) {
          float v = std::clamp(frame.at(y, x, c), 0.0f, 1.0f);
          long q = std::lround(static_cast<double>(v) * maxval);
          if (bit_depth == 8) {
            row[x * frame.channels + c] = static_cast<uint8_t>(q);
          } else {
            size_t o = (static_cast<size_t>(x) * frame.channels + c) * 2;
            row[o] = static_cast<uint8_t>(q >> 8);
            row[o + 1] = static_cast<uint8_t>(q & 0xff);
          }
        }
      }
      png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
  } catch (...) {
    png_destroy_write_struct(&png, &info);
    throw;
  }
}

DepthMap load_depth(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("pfm: cannot open '" + path + "'");

  std::string magic;
  in >> magic;
  if (magic == "PF") throw std::runtime_error("pfm: '" + path + "' is 3-channel, expected 'Pf'");
  if (magic != "Pf") throw std::runtime_error("pfm: bad header in '" + path + "'");
  int width = 0, height = 0;
  double scale = 0.0;
  in >> width >> height >> scale;
  if (!in || width <= 0 || height <= 0 || scale == 0.0) {
    throw std::runtime_error("pfm: malformed header in '" + path + "'");
  }
  in.get();  // single whitespace byte after the scale

  const bool file_little = scale < 0.0;
  const double factor = std::fabs(scale);
  std::vector<float> raw(static_cast<size_t>(width) * height);
  in.read(reinterpret_cast<char*>(raw.data()), raw.size() * sizeof(float));
  if (!in) throw std::runtime_error("pfm: truncated data in '" + path + "'");

  if (file_little != host_is_little_endian()) {
    for (float& v : raw) {
      uint32_t bits;
      std::memcpy(&bits, &v, 4);
      bits = __builtin_bswap32(bits);
      std::memcpy(&v, &bits, 4);
    }
  }

  DepthMap depth(height, width);
  for (int y = 0; y < height; ++y) {
    // PFM stores rows bottom to top.
    const float* src = raw.data() + static_cast<size_t>(height - 1 - y) * width;
    for (int x = 0; x < width; ++x) {
      float v = factor == 1.0 ? src[x] : static_cast<float>(src[x] * factor);
      if (!std::isfinite(v) || !(v > 0.0f)) {
        throw std::runtime_error("pfm: non-positive depth at pixel (" + std::to_string(x) + ", " +
                                 std::to_string(y) + ") in '" + path + "'");
      }
      depth.at(y, x) = v;
    }
  }
  return depth;
}

void save_depth(const std::string& path, const DepthMap& depth) {
  for (int y = 0; y < depth.height; ++y) {
    for (int x = 0; x < depth.width; ++x) {
      float v = depth.at(y, x);
      if (!std::isfinite(v) || !(v > 0.0f)) {
        throw std::invalid_argument("pfm: refusing to write non-positive depth at pixel (" +
                                    std::to_string(x) + ", " + std::to_string(y) + ")");
      }
    }
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("pfm: cannot create '" + path + "'");
  const char* scale = host_is_little_endian() ? "-1.0" : "1.0";
  out << "Pf\n" << depth.width << " " << depth.height << "\n" << scale << "\n";
  for (int y = depth.height - 1; y >= 0; --y) {
    out.write(reinterpret_cast<const char*>(depth.data.data() + static_cast<size_t>(y) * depth.width),
              static_cast<std::streamsize>(depth.width) * sizeof(float));
  }
  if (!out) throw std::runtime_error("pfm: write failed for '" + path + "'");
}

}  // namespace vgrid
