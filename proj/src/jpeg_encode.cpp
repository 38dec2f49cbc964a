#include <cmath>
#include <cstring>

#include "cropsig/jpeg.hpp"

namespace cropsig::jpeg {

namespace {

constexpr uint8_t kSOS = 0xDA, kDHT = 0xC4, kDRI = 0xDD, kSOF0 = 0xC0, kDQT = 0xDB,
                  kAPP0 = 0xE0;

// zigzag index -> natural (row-major) index
constexpr int kZigzag[64] = {
    0,  1,  8,  16, 9,  2,  3,  10, 17, 24, 32, 25, 18, 11, 4,  5,
    12, 19, 26, 33, 40, 48, 41, 34, 27, 20, 13, 6,  7,  14, 21, 28,
    35, 42, 49, 56, 57, 50, 43, 36, 29, 22, 15, 23, 30, 37, 44, 51,
    58, 59, 52, 45, 38, 31, 39, 46, 53, 60, 61, 54, 47, 55, 62, 63};

// Standard Huffman table specs (JPEG Annex K).
const uint8_t kDcLumaBits[16] = {0, 1, 5, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0};
const uint8_t kDcLumaVals[12] = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
const uint8_t kDcChromaBits[16] = {0, 3, 1, 1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0};
const uint8_t kDcChromaVals[12] = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};

const uint8_t kAcLumaBits[16] = {0, 2, 1, 3, 3, 2, 4, 3, 5, 5, 4, 4, 0, 0, 1, 0x7d};
const uint8_t kAcLumaVals[162] = {
    0x01, 0x02, 0x03, 0x00, 0x04, 0x11, 0x05, 0x12, 0x21, 0x31, 0x41, 0x06, 0x13, 0x51,
    0x61, 0x07, 0x22, 0x71, 0x14, 0x32, 0x81, 0x91, 0xa1, 0x08, 0x23, 0x42, 0xb1, 0xc1,
    0x15, 0x52, 0xd1, 0xf0, 0x24, 0x33, 0x62, 0x72, 0x82, 0x09, 0x0a, 0x16, 0x17, 0x18,
    0x19, 0x1a, 0x25, 0x26, 0x27, 0x28, 0x29, 0x2a, 0x34, 0x35, 0x36, 0x37, 0x38, 0x39,
    0x3a, 0x43, 0x44, 0x45, 0x46, 0x47, 0x48, 0x49, 0x4a, 0x53, 0x54, 0x55, 0x56, 0x57,
    0x58, 0x59, 0x5a, 0x63, 0x64, 0x65, 0x66, 0x67, 0x68, 0x69, 0x6a, 0x73, 0x74, 0x75,
    0x76, 0x77, 0x78, 0x79, 0x7a, 0x83, 0x84, 0x85, 0x86, 0x87, 0x88, 0x89, 0x8a, 0x92,
    0x93, 0x94, 0x95, 0x96, 0x97, 0x98, 0x99, 0x9a, 0xa2, 0xa3, 0xa4, 0xa5, 0xa6, 0xa7,
    0xa8, 0xa9, 0xaa, 0xb2, 0xb3, 0xb4, 0xb5, 0xb6, 0xb7, 0xb8, 0xb9, 0xba, 0xc2, 0xc3,
    0xc4, 0xc5, 0xc6, 0xc7, 0xc8, 0xc9, 0xca, 0xd2, 0xd3, 0xd4, 0xd5, 0xd6, 0xd7, 0xd8,
    0xd9, 0xda, 0xe1, 0xe2, 0xe3, 0xe4, 0xe5, 0xe6, 0xe7, 0xe8, 0xe9, 0xea, 0xf1, 0xf2,
    0xf3, 0xf4, 0xf5, 0xf6, 0xf7, 0xf8, 0xf9, 0xfa};
const uint8_t kAcChromaBits[16] = {0, 2, 1, 2, 4, 4, 3, 4, 7, 5, 4, 4, 0, 1, 2, 0x77};
const uint8_t kAcChromaVals[162] = {
    0x00, 0x01, 0x02, 0x03, 0x11, 0x04, 0x05, 0x21, 0x31, 0x06, 0x12, 0x41, 0x51, 0x07,
    0x61, 0x71, 0x13, 0x22, 0x32, 0x81, 0x08, 0x14, 0x42, 0x91, 0xa1, 0xb1, 0xc1, 0x09,
    0x23, 0x33, 0x52, 0xf0, 0x15, 0x62, 0x72, 0xd1, 0x0a, 0x16, 0x24, 0x34, 0xe1, 0x25,
    0xf1, 0x17, 0x18, 0x19, 0x1a, 0x26, 0x27, 0x28, 0x29, 0x2a, 0x35, 0x36, 0x37, 0x38,
    0x39, 0x3a, 0x43, 0x44, 0x45, 0x46, 0x47, 0x48, 0x49, 0x4a, 0x53, 0x54, 0x55, 0x56,
    0x57, 0x58, 0x59, 0x5a, 0x63, 0x64, 0x65, 0x66, 0x67, 0x68, 0x69, 0x6a, 0x73, 0x74,
    0x75, 0x76, 0x77, 0x78, 0x79, 0x7a, 0x82, 0x83, 0x84, 0x85, 0x86, 0x87, 0x88, 0x89,
    0x8a, 0x92, 0x93, 0x94, 0x95, 0x96, 0x97, 0x98, 0x99, 0x9a, 0xa2, 0xa3, 0xa4, 0xa5,
    0xa6, 0xa7, 0xa8, 0xa9, 0xaa, 0xb2, 0xb3, 0xb4, 0xb5, 0xb6, 0xb7, 0xb8, 0xb9, 0xba,
    0xc2, 0xc3, 0xc4, 0xc5, 0xc6, 0xc7, 0xc8, 0xc9, 0xca, 0xd2, 0xd3, 0xd4, 0xd5, 0xd6,
    0xd7, 0xd8, 0xd9, 0xda, 0xe2, 0xe3, 0xe4, 0xe5, 0xe6, 0xe7, 0xe8, 0xe9, 0xea, 0xf2,
    0xf3, 0xf4, 0xf5, 0xf6, 0xf7, 0xf8, 0xf9, 0xfa};

// Base quantization tables (Annex K), natural order.
const uint16_t kLumaQuant[64] = {
    16, 11, 10, 16, 24,  40,  51,  61,  12, 12, 14, 19, 26,  58,  60,  55,
    14, 13, 16, 24, 40,  57,  69,  56,  14, 17, 22, 29, 51,  87,  80,  62,
    18, 22, 37, 56, 68,  109, 103, 77,  24, 35, 55, 64, 81,  104, 113, 92,
    49, 64, 78, 87, 103, 121, 120, 101, 72, 92, 95, 98, 112, 100, 103, 99};
const uint16_t kChromaQuant[64] = {
    17, 18, 24, 47, 99, 99, 99, 99, 18, 21, 26, 66, 99, 99, 99, 99,
    24, 26, 56, 99, 99, 99, 99, 99, 47, 66, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99};

// Canonical code assignment for an encoding table.
struct HuffEncoder {
  std::array<uint16_t, 256> code{};
  std::array<uint8_t, 256> size{};

  void build(const uint8_t bits[16], const uint8_t* vals, size_t nvals) {
    uint16_t c = 0;
    size_t k = 0;
    for (int len = 1; len <= 16; ++len) {
      for (int n = 0; n < bits[len - 1]; ++n) {
        code[vals[k]] = c++;
        size[vals[k]] = uint8_t(len);
        ++k;
      }
      c <<= 1;
    }
    (void)nvals;
  }
};

struct StdTables {
  HuffEncoder dc_luma, ac_luma, dc_chroma, ac_chroma;
};

const StdTables& std_tables() {
  static const StdTables t = [] {
    StdTables s;
    s.dc_luma.build(kDcLumaBits, kDcLumaVals, 12);
    s.ac_luma.build(kAcLumaBits, kAcLumaVals, 162);
    s.dc_chroma.build(kDcChromaBits, kDcChromaVals, 12);
    s.ac_chroma.build(kAcChromaBits, kAcChromaVals, 162);
    return s;
  }();
  return t;
}

class BitWriter {
 public:
  explicit BitWriter(Bytes& out) : out_(out) {}

  void put(uint32_t bits, int nbits) {
    for (int i = nbits - 1; i >= 0; --i) {
      acc_ = uint8_t(acc_ << 1 | ((bits >> i) & 1));
      if (++nacc_ == 8) {
        out_.push_back(acc_);
        if (acc_ == 0xFF) out_.push_back(0x00);
        acc_ = 0;
        nacc_ = 0;
      }
    }
  }

  void flush() {
    while (nacc_ != 0) put(1, 1);  // pad with 1-bits
  }

 private:
  Bytes& out_;
  uint8_t acc_ = 0;
  int nacc_ = 0;
};

int bit_length(int32_t v) {
  if (v < 0) v = -v;
  int n = 0;
  while (v) {
    ++n;
    v >>= 1;
  }
  return n;
}

void emit_coded_value(BitWriter& bw, const HuffEncoder& table, int run, int32_t v) {
  int ssss = bit_length(v);
  int sym = run << 4 | ssss;
  bw.put(table.code[sym], table.size[sym]);
  if (ssss) {
    int32_t bits = v < 0 ? v + (1 << ssss) - 1 : v;
    bw.put(uint32_t(bits), ssss);
  }
}

void encode_block(BitWriter& bw, const CoeffBlock& blk, int32_t& dc_pred,
                  const HuffEncoder& dc, const HuffEncoder& ac) {
  int32_t diff = int32_t(blk[0]) - dc_pred;
  dc_pred = blk[0];
  emit_coded_value(bw, dc, 0, diff);

  int run = 0;
  for (int k = 1; k < 64; ++k) {
    if (blk[k] == 0) {
      ++run;
      continue;
    }
    while (run > 15) {
      bw.put(ac.code[0xF0], ac.size[0xF0]);  // ZRL
      run -= 16;
    }
    emit_coded_value(bw, ac, run, blk[k]);
    run = 0;
  }
  if (run > 0) bw.put(ac.code[0x00], ac.size[0x00]);  // EOB
}

Bytes build_dht_payload(bool color) {
  auto emit = [](Bytes& out, uint8_t tc_th, const uint8_t bits[16], const uint8_t* vals) {
    out.push_back(tc_th);
    size_t n = 0;
    for (int i = 0; i < 16; ++i) {
      out.push_back(bits[i]);
      n += bits[i];
    }
    out.insert(out.end(), vals, vals + n);
  };
  Bytes out;
  emit(out, 0x00, kDcLumaBits, kDcLumaVals);
  emit(out, 0x10, kAcLumaBits, kAcLumaVals);
  if (color) {
    emit(out, 0x01, kDcChromaBits, kDcChromaVals);
    emit(out, 0x11, kAcChromaBits, kAcChromaVals);
  }
  return out;
}

Bytes encode_scan_data(const JpegImage& img) {
  const StdTables& t = std_tables();
  Bytes out;
  BitWriter bw(out);
  std::vector<int32_t> dc_pred(img.components.size(), 0);
  uint32_t mcus_x = img.mcus_per_row();
  uint32_t mcus_y = img.mcus_per_col();
  for (uint32_t my = 0; my < mcus_y; ++my)
    for (uint32_t mx = 0; mx < mcus_x; ++mx)
      for (size_t c = 0; c < img.components.size(); ++c) {
        const HuffEncoder& dc = c == 0 ? t.dc_luma : t.dc_chroma;
        const HuffEncoder& ac = c == 0 ? t.ac_luma : t.ac_chroma;
        uint8_t bh = img.comp_h(c), bv = img.comp_v(c);
        for (uint8_t by = 0; by < bv; ++by)
          for (uint8_t bx = 0; bx < bh; ++bx)
            encode_block(bw, img.coeffs[c].at(mx * bh + bx, my * bv + by), dc_pred[c],
                         dc, ac);
      }
  bw.flush();
  return out;
}

Bytes build_sos_payload(const JpegImage& img) {
  Bytes out;
  out.push_back(uint8_t(img.components.size()));
  for (size_t c = 0; c < img.components.size(); ++c) {
    out.push_back(img.components[c].id);
    uint8_t table = c == 0 ? 0x00 : 0x11;
    out.push_back(table);
  }
  out.push_back(0);
  out.push_back(63);
  out.push_back(0);
  return out;
}

}  // namespace

void reencode_scan(JpegImage& img) {
  bool color = img.components.size() > 1;

  // Drop old entropy-coding segments; the rewritten scan uses the standard
  // tables and no restart markers.
  std::vector<Segment> kept;
  bool placed = false;
  for (auto& seg : img.segments) {
    if (seg.marker == kDHT || seg.marker == kDRI) continue;
    if (seg.marker == kSOS) {
      if (placed) throw std::logic_error("multiple SOS segments");
      kept.push_back({kDHT, build_dht_payload(color)});
      kept.push_back({kSOS, build_sos_payload(img)});
      placed = true;
      continue;
    }
    kept.push_back(std::move(seg));
  }
  if (!placed) {
    kept.push_back({kDHT, build_dht_payload(color)});
    kept.push_back({kSOS, build_sos_payload(img)});
  }
  img.segments = std::move(kept);
  img.scan_data = encode_scan_data(img);
}

// ---------------------------------------------------------------- encoder

namespace {

uint16_t scale_quant(uint16_t base, int quality) {
  int scale = quality < 50 ? 5000 / quality : 200 - 2 * quality;
  int v = (base * scale + 50) / 100;
  return uint16_t(std::clamp(v, 1, 255));
}

void fdct_quantize(const std::vector<double>& plane, uint32_t plane_w, uint32_t bx,
                   uint32_t by, const QuantTable& qt, CoeffBlock& out) {
  static const std::array<std::array<double, 8>, 8> cos_table = [] {
    std::array<std::array<double, 8>, 8> t{};
    for (int u = 0; u < 8; ++u)
      for (int x = 0; x < 8; ++x) t[u][x] = std::cos((2 * x + 1) * u * M_PI / 16.0);
    return t;
  }();
  double block[8][8];
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x)
      block[y][x] = plane[size_t(by * 8 + y) * plane_w + bx * 8 + x] - 128.0;
  for (int v = 0; v < 8; ++v)
    for (int u = 0; u < 8; ++u) {
      double sum = 0;
      for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) sum += block[y][x] * cos_table[u][x] * cos_table[v][y];
      double cu = u == 0 ? M_SQRT1_2 : 1.0;
      double cv = v == 0 ? M_SQRT1_2 : 1.0;
      double coef = 0.25 * cu * cv * sum;
      int zz = -1;
      for (int k = 0; k < 64; ++k)
        if (kZigzag[k] == v * 8 + u) zz = k;
      int32_t q = int32_t(std::lround(coef / qt.q[zz]));
      out[zz] = int16_t(std::clamp(q, -1023, 1023));
    }
}

Bytes build_dqt_payload(const QuantTable& qt, uint8_t id) {
  Bytes out;
  out.push_back(id);  // 8-bit precision
  for (int k = 0; k < 64; ++k) out.push_back(uint8_t(qt.q[k]));
  return out;
}

}  // namespace

Bytes encode_jpeg(uint32_t width, uint32_t height, std::span<const uint8_t> rgb,
                  const EncodeOptions& opts) {
  if (width == 0 || height == 0) throw std::invalid_argument("empty image");
  if (rgb.size() != size_t(width) * height * 3)
    throw std::invalid_argument("rgb buffer size mismatch");
  int quality = std::clamp(opts.quality, 1, 100);

  JpegImage img;
  img.width = uint16_t(width);
  img.height = uint16_t(height);
  img.precision = 8;

  QuantTable luma_qt, chroma_qt;
  luma_qt.precision = 0;
  chroma_qt.precision = 0;
  for (int k = 0; k < 64; ++k) {
    luma_qt.q[k] = scale_quant(kLumaQuant[kZigzag[k]], quality);
    chroma_qt.q[k] = scale_quant(kChromaQuant[kZigzag[k]], quality);
  }
  img.qtables[0] = luma_qt;

  if (opts.grayscale) {
    img.components.push_back({1, 1, 1, 0});
  } else {
    uint8_t s = opts.subsample_420 ? 2 : 1;
    img.components.push_back({1, s, s, 0});
    img.components.push_back({2, 1, 1, 1});
    img.components.push_back({3, 1, 1, 1});
    img.qtables[1] = chroma_qt;
  }

  // Full-resolution YCbCr planes (BT.601 as in JFIF).
  size_t npx = size_t(width) * height;
  std::vector<double> yp(npx), cb(npx), cr(npx);
  for (size_t i = 0; i < npx; ++i) {
    double r = rgb[3 * i], g = rgb[3 * i + 1], b = rgb[3 * i + 2];
    yp[i] = 0.299 * r + 0.587 * g + 0.114 * b;
    cb[i] = 128.0 - 0.168736 * r - 0.331264 * g + 0.5 * b;
    cr[i] = 128.0 + 0.5 * r - 0.418688 * g - 0.081312 * b;
  }

  uint32_t mcus_x = img.mcus_per_row();
  uint32_t mcus_y = img.mcus_per_col();
  img.coeffs.resize(img.components.size());
  const std::vector<double>* sources[3] = {&yp, &cb, &cr};
  for (size_t c = 0; c < img.components.size(); ++c) {
    auto& cc = img.coeffs[c];
    cc.blocks_w = mcus_x * img.comp_h(c);
    cc.blocks_h = mcus_y * img.comp_v(c);
    cc.blocks.assign(size_t(cc.blocks_w) * cc.blocks_h, CoeffBlock{});

    // Sampled and edge-padded plane for this component.
    uint32_t sx = img.components.size() == 1 ? 1 : img.hmax() / img.components[c].h;
    uint32_t sy = img.components.size() == 1 ? 1 : img.vmax() / img.components[c].v;
    uint32_t pw = cc.blocks_w * 8, ph = cc.blocks_h * 8;
    std::vector<double> plane(size_t(pw) * ph);
    const std::vector<double>& src = *sources[c];
    for (uint32_t y = 0; y < ph; ++y)
      for (uint32_t x = 0; x < pw; ++x) {
        double acc = 0;
        for (uint32_t dy = 0; dy < sy; ++dy)
          for (uint32_t dx = 0; dx < sx; ++dx) {
            uint32_t ox = std::min(x * sx + dx, width - 1);
            uint32_t oy = std::min(y * sy + dy, height - 1);
            acc += src[size_t(oy) * width + ox];
          }
        plane[size_t(y) * pw + x] = acc / (sx * sy);
      }

    const QuantTable& qt = *img.qtables[img.components[c].tq];
    for (uint32_t by = 0; by < cc.blocks_h; ++by)
      for (uint32_t bx = 0; bx < cc.blocks_w; ++bx)
        fdct_quantize(plane, pw, bx, by, qt, cc.at(bx, by));
  }

  // JFIF APP0
  Bytes app0 = {'J', 'F', 'I', 'F', 0, 1, 1, 0, 0, 1, 0, 1, 0, 0};
  img.segments.push_back({kAPP0, app0});

  img.segments.push_back({kDQT, build_dqt_payload(luma_qt, 0)});
  if (!opts.grayscale) img.segments.push_back({kDQT, build_dqt_payload(chroma_qt, 1)});

  Bytes sof;
  sof.push_back(8);
  put_u16be(sof, img.height);
  put_u16be(sof, img.width);
  sof.push_back(uint8_t(img.components.size()));
  for (const auto& c : img.components) {
    sof.push_back(c.id);
    sof.push_back(uint8_t(c.h << 4 | c.v));
    sof.push_back(c.tq);
  }
  img.segments.push_back({kSOF0, sof});

  reencode_scan(img);
  return serialize_jpeg(img);
}

Bytes generate_test_rgb(uint32_t width, uint32_t height, uint64_t seed) {
  Bytes rgb(size_t(width) * height * 3);
  uint64_t s = seed * 0x9E3779B97F4A7C15ull + 1;
  auto next = [&s]() {
    s ^= s << 13;
    s ^= s >> 7;
    s ^= s << 17;
    return uint8_t(s >> 33);
  };
  for (uint32_t y = 0; y < height; ++y)
    for (uint32_t x = 0; x < width; ++x) {
      size_t i = (size_t(y) * width + x) * 3;
      double gx = 255.0 * x / std::max(1u, width - 1);
      double gy = 255.0 * y / std::max(1u, height - 1);
      double wave = 60.0 * std::sin(x * 0.07) * std::cos(y * 0.05);
      int noise = (int(next()) - 128) / 4;
      rgb[i] = uint8_t(std::clamp(int(gx * 0.7 + wave * 0.3) + noise, 0, 255));
      rgb[i + 1] = uint8_t(std::clamp(int(gy * 0.7 + wave * 0.5) + noise, 0, 255));
      rgb[i + 2] = uint8_t(std::clamp(int((gx + gy) * 0.25 + wave) + noise, 0, 255));
    }
  return rgb;
}

}  // namespace cropsig::jpeg
