#pragma once

// Test-only helpers: decoding through libjpeg as an independent oracle.

#include <csetjmp>
#include <cstdio>

#include <jerror.h>
#include <jpeglib.h>

#include "cropsig/util.hpp"

namespace cropsig::testutil {

struct DecodedImage {
  uint32_t width = 0, height = 0;
  int channels = 0;
  Bytes pixels;  // row-major, channels bytes per pixel

  uint8_t at(uint32_t x, uint32_t y, int c) const {
    return pixels[(size_t(y) * width + x) * channels + c];
  }
};

namespace detail {
struct ErrorTrap {
  jpeg_error_mgr mgr;
  std::jmp_buf jump;
};
inline void on_error(j_common_ptr cinfo) {
  std::longjmp(reinterpret_cast<ErrorTrap*>(cinfo->err)->jump, 1);
}
}  // namespace detail

// Decodes with libjpeg; throws std::runtime_error on any decode failure.
inline DecodedImage libjpeg_decode(std::span<const uint8_t> bytes) {
  jpeg_decompress_struct cinfo{};
  detail::ErrorTrap trap{};
  cinfo.err = jpeg_std_error(&trap.mgr);
  trap.mgr.error_exit = detail::on_error;
  if (setjmp(trap.jump)) {
    jpeg_destroy_decompress(&cinfo);
    throw std::runtime_error("libjpeg failed to decode");
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  jpeg_start_decompress(&cinfo);

  DecodedImage out;
  out.width = cinfo.output_width;
  out.height = cinfo.output_height;
  out.channels = cinfo.output_components;
  out.pixels.resize(size_t(out.width) * out.height * out.channels);
  size_t stride = size_t(out.width) * out.channels;
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = out.pixels.data() + cinfo.output_scanline * stride;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return out;
}

inline double mean_abs_error(const DecodedImage& a, std::span<const uint8_t> rgb) {
  double total = 0;
  size_t n = a.pixels.size();
  for (size_t i = 0; i < n; ++i) total += std::abs(int(a.pixels[i]) - int(rgb[i]));
  return total / double(n);
}

}  // namespace cropsig::testutil
