#include "doctest.h"

#include "cropsig/jpeg.hpp"
#include "jpeg_testutil.hpp"

using namespace cropsig;
using namespace cropsig::jpeg;

namespace {

Bytes make_jpeg(uint32_t w, uint32_t h, uint64_t seed, const EncodeOptions& opts) {
  return encode_jpeg(w, h, generate_test_rgb(w, h, seed), opts);
}

}  // namespace

TEST_CASE("8x8 grayscale is one MCU with one block") {
  EncodeOptions opts;
  opts.grayscale = true;
  Bytes file = make_jpeg(8, 8, 1, opts);
  JpegImage img = parse_jpeg(file);
  CHECK(img.width == 8);
  CHECK(img.height == 8);
  CHECK(img.components.size() == 1);
  CHECK(img.mcus_per_row() == 1);
  CHECK(img.mcus_per_col() == 1);
  REQUIRE(img.coeffs.size() == 1);
  CHECK(img.coeffs[0].blocks.size() == 1);
}

TEST_CASE("16x16 4:2:0 color is one MCU with 4+1+1 blocks") {
  Bytes file = make_jpeg(16, 16, 2, {});
  JpegImage img = parse_jpeg(file);
  CHECK(img.components.size() == 3);
  CHECK(img.mcu_width_px() == 16);
  CHECK(img.mcu_height_px() == 16);
  CHECK(img.mcus_per_row() == 1);
  CHECK(img.mcus_per_col() == 1);
  REQUIRE(img.coeffs.size() == 3);
  CHECK(img.coeffs[0].blocks.size() == 4);
  CHECK(img.coeffs[1].blocks.size() == 1);
  CHECK(img.coeffs[2].blocks.size() == 1);
}

TEST_CASE("4:4:4 color uses 8px MCUs") {
  EncodeOptions opts;
  opts.subsample_420 = false;
  Bytes file = make_jpeg(24, 16, 3, opts);
  JpegImage img = parse_jpeg(file);
  CHECK(img.mcu_width_px() == 8);
  CHECK(img.mcus_per_row() == 3);
  CHECK(img.mcus_per_col() == 2);
  for (const auto& cc : img.coeffs) CHECK(cc.blocks.size() == 6);
}

TEST_CASE("parse followed by serialize is byte-identical") {
  for (auto [w, h] : {std::pair{8u, 8u}, {17u, 9u}, {64u, 48u}, {33u, 70u}}) {
    for (bool gray : {false, true}) {
      EncodeOptions opts;
      opts.grayscale = gray;
      opts.quality = gray ? 60 : 85;
      Bytes file = make_jpeg(w, h, w * 1000 + h, opts);
      JpegImage img = parse_jpeg(file);
      CHECK(serialize_jpeg(img) == file);
    }
  }
}

TEST_CASE("odd dimensions pad to full MCUs") {
  Bytes file = make_jpeg(33, 21, 4, {});
  JpegImage img = parse_jpeg(file);
  CHECK(img.width == 33);
  CHECK(img.height == 21);
  CHECK(img.mcus_per_row() == 3);   // ceil(33/16)
  CHECK(img.mcus_per_col() == 2);   // ceil(21/16)
  CHECK(img.coeffs[0].blocks_w == 6);
  CHECK(img.coeffs[0].blocks_h == 4);
}

TEST_CASE("reencode_scan preserves coefficients, dims and qtables") {
  Bytes file = make_jpeg(40, 24, 5, {});
  JpegImage img = parse_jpeg(file);
  JpegImage copy = img;
  reencode_scan(copy);
  JpegImage again = parse_jpeg(serialize_jpeg(copy));
  CHECK(again.width == img.width);
  CHECK(again.height == img.height);
  REQUIRE(again.coeffs.size() == img.coeffs.size());
  for (size_t c = 0; c < img.coeffs.size(); ++c)
    CHECK(again.coeffs[c].blocks == img.coeffs[c].blocks);
  for (int t = 0; t < 4; ++t) {
    CHECK(again.qtables[t].has_value() == img.qtables[t].has_value());
    if (img.qtables[t]) CHECK(again.qtables[t]->q == img.qtables[t]->q);
  }
}

TEST_CASE("libjpeg decodes our encoder output with matching content") {
  uint32_t w = 96, h = 64;
  Bytes rgb = generate_test_rgb(w, h, 6);
  EncodeOptions opts;
  opts.quality = 90;
  Bytes file = encode_jpeg(w, h, rgb, opts);
  auto dec = testutil::libjpeg_decode(file);
  CHECK(dec.width == w);
  CHECK(dec.height == h);
  CHECK(dec.channels == 3);
  CHECK(testutil::mean_abs_error(dec, rgb) < 16.0);
}

TEST_CASE("libjpeg and our parser agree after a scan rewrite") {
  Bytes file = make_jpeg(48, 48, 7, {});
  auto before = testutil::libjpeg_decode(file);
  JpegImage img = parse_jpeg(file);
  reencode_scan(img);
  auto after = testutil::libjpeg_decode(serialize_jpeg(img));
  CHECK(before.pixels == after.pixels);
}

TEST_CASE("malformed input throws ParseError with an offset") {
  Bytes file = make_jpeg(16, 16, 8, {});
  Bytes truncated(file.begin(), file.begin() + file.size() / 2);
  CHECK_THROWS_AS(parse_jpeg(truncated), ParseError);
  CHECK_THROWS_AS(parse_jpeg(Bytes{0x12, 0x34}), ParseError);
  try {
    parse_jpeg(Bytes{0x12, 0x34});
    FAIL("expected throw");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 0);
  }
}

TEST_CASE("progressive files are rejected as unsupported") {
  Bytes file = make_jpeg(16, 16, 9, {});
  // Rewrite the SOF0 marker to SOF2 (progressive DCT).
  for (size_t i = 0; i + 1 < file.size(); ++i)
    if (file[i] == 0xFF && file[i + 1] == 0xC0) {
      file[i + 1] = 0xC2;
      break;
    }
  CHECK_THROWS_AS(parse_jpeg(file), UnsupportedFormat);
}

TEST_CASE("encoder validates its arguments") {
  CHECK_THROWS_AS(encode_jpeg(0, 8, Bytes{}, {}), std::invalid_argument);
  CHECK_THROWS_AS(encode_jpeg(8, 8, Bytes(10), {}), std::invalid_argument);
}

TEST_CASE("generate_test_rgb is deterministic and seed-sensitive") {
  CHECK(generate_test_rgb(32, 32, 1) == generate_test_rgb(32, 32, 1));
  CHECK(generate_test_rgb(32, 32, 1) != generate_test_rgb(32, 32, 2));
}
