#include <cstring>

#include "cropsig/jpeg.hpp"

namespace cropsig::jpeg {

namespace {

constexpr uint8_t kSOI = 0xD8, kEOI = 0xD9, kSOS = 0xDA, kDQT = 0xDB, kDHT = 0xC4,
                  kDRI = 0xDD, kSOF0 = 0xC0;

bool is_sof_marker(uint8_t m) {
  // C0..CF minus DHT (C4), JPG (C8), DAC (CC)
  return m >= 0xC0 && m <= 0xCF && m != 0xC4 && m != 0xC8 && m != 0xCC;
}

bool is_rst(uint8_t m) { return m >= 0xD0 && m <= 0xD7; }

// Derived Huffman decoding table (JPEG Annex F canonical form).
struct HuffDecoder {
  std::array<int32_t, 17> mincode{}, maxcode{};
  std::array<int32_t, 17> valptr{};
  std::vector<uint8_t> values;
  bool present = false;

  void build(const uint8_t counts[16], const uint8_t* vals, size_t nvals) {
    values.assign(vals, vals + nvals);
    int32_t code = 0;
    size_t k = 0;
    for (int len = 1; len <= 16; ++len) {
      valptr[len] = int32_t(k);
      mincode[len] = code;
      code += counts[len - 1];
      k += counts[len - 1];
      maxcode[len] = code - 1;
      if (counts[len - 1] == 0) maxcode[len] = -1;
      code <<= 1;
    }
    present = true;
  }
};

class BitReader {
 public:
  BitReader(std::span<const uint8_t> data, size_t base_offset)
      : data_(data), base_(base_offset) {}

  // Returns next bit; throws on marker or end of data.
  int bit() {
    if (nbits_ == 0) {
      fill_byte();
      nbits_ = 8;
    }
    --nbits_;
    return (cur_ >> nbits_) & 1;
  }

  int32_t bits(int n) {
    int32_t v = 0;
    for (int i = 0; i < n; ++i) v = v << 1 | bit();
    return v;
  }

  // Consumes padding bits and an expected restart marker.
  void restart(int expected_index) {
    nbits_ = 0;
    if (pos_ + 2 > data_.size() || data_[pos_] != 0xFF || !is_rst(data_[pos_ + 1]))
      throw ParseError("expected restart marker", base_ + pos_);
    if ((data_[pos_ + 1] & 7) != expected_index)
      throw ParseError("restart marker out of sequence", base_ + pos_);
    pos_ += 2;
  }

  size_t consumed() {
    // Byte position after the current partially-read byte.
    return pos_;
  }

 private:
  void fill_byte() {
    if (pos_ >= data_.size()) throw ParseError("entropy data truncated", base_ + pos_);
    uint8_t b = data_[pos_++];
    if (b == 0xFF) {
      if (pos_ >= data_.size()) throw ParseError("entropy data truncated", base_ + pos_);
      uint8_t next = data_[pos_];
      if (next == 0x00) {
        ++pos_;  // byte stuffing
      } else {
        throw ParseError("unexpected marker inside entropy data", base_ + pos_);
      }
    }
    cur_ = b;
  }

  std::span<const uint8_t> data_;
  size_t base_;
  size_t pos_ = 0;
  uint8_t cur_ = 0;
  int nbits_ = 0;
};

int decode_symbol(BitReader& br, const HuffDecoder& t, size_t offset_hint) {
  int32_t code = br.bit();
  for (int len = 1; len <= 16; ++len) {
    if (t.maxcode[len] >= 0 && code <= t.maxcode[len])
      return t.values[size_t(t.valptr[len] + code - t.mincode[len])];
    code = code << 1 | br.bit();
  }
  throw ParseError("invalid Huffman code", offset_hint);
}

// EXTEND procedure: map magnitude bits to signed value.
int32_t extend(int32_t v, int size) {
  if (size == 0) return 0;
  if (v < (1 << (size - 1))) return v - (1 << size) + 1;
  return v;
}

struct ScanComponentSpec {
  size_t comp_index;
  uint8_t dc_table, ac_table;
};

}  // namespace

uint8_t JpegImage::hmax() const {
  uint8_t m = 1;
  for (const auto& c : components) m = std::max(m, c.h);
  return m;
}

uint8_t JpegImage::vmax() const {
  uint8_t m = 1;
  for (const auto& c : components) m = std::max(m, c.v);
  return m;
}

JpegImage parse_jpeg(std::span<const uint8_t> bytes) {
  JpegImage img;
  size_t pos = 0;
  auto need = [&](size_t n, const char* what) {
    if (pos + n > bytes.size()) throw ParseError(std::string("truncated: ") + what, pos);
  };

  need(2, "SOI");
  if (bytes[0] != 0xFF || bytes[1] != kSOI) throw ParseError("missing SOI marker", 0);
  pos = 2;

  std::array<HuffDecoder, 4> dc_tables, ac_tables;
  uint16_t restart_interval = 0;
  bool have_frame = false;

  while (true) {
    need(2, "marker");
    if (bytes[pos] != 0xFF) throw ParseError("expected marker", pos);
    uint8_t marker = bytes[pos + 1];
    pos += 2;

    if (marker == kEOI) {
      if (!have_frame) throw ParseError("EOI before any scan", pos - 2);
      throw ParseError("EOI before scan data", pos - 2);
    }
    if (is_rst(marker) || marker == 0x01)
      throw ParseError("stray restart/TEM marker between segments", pos - 2);

    need(2, "segment length");
    uint16_t seglen = get_u16be(bytes.data() + pos);
    if (seglen < 2) throw ParseError("segment length below 2", pos);
    need(seglen, "segment body");
    const uint8_t* body = bytes.data() + pos + 2;
    size_t body_len = seglen - 2;
    size_t body_off = pos + 2;
    pos += seglen;

    Segment seg{marker, Bytes(body, body + body_len)};
    img.segments.push_back(seg);

    if (is_sof_marker(marker)) {
      if (marker != kSOF0) {
        if (marker == 0xC2)
          throw UnsupportedFormat("progressive JPEG is not supported");
        if (marker >= 0xC9)
          throw UnsupportedFormat("arithmetic-coded JPEG is not supported");
        throw UnsupportedFormat("only baseline sequential (SOF0) JPEG is supported");
      }
      if (have_frame) throw ParseError("multiple frame headers", body_off);
      if (body_len < 6) throw ParseError("frame header too short", body_off);
      img.precision = body[0];
      if (img.precision != 8) throw UnsupportedFormat("only 8-bit precision is supported");
      img.height = get_u16be(body + 1);
      img.width = get_u16be(body + 3);
      if (img.width == 0 || img.height == 0)
        throw UnsupportedFormat("DNL-deferred dimensions are not supported");
      uint8_t nc = body[5];
      if (nc == 0 || nc > 4) throw ParseError("bad component count", body_off);
      if (body_len != size_t(6 + 3 * nc)) throw ParseError("bad frame header length", body_off);
      for (uint8_t c = 0; c < nc; ++c) {
        Component comp;
        comp.id = body[6 + 3 * c];
        comp.h = body[7 + 3 * c] >> 4;
        comp.v = body[7 + 3 * c] & 0xF;
        comp.tq = body[8 + 3 * c];
        if (comp.h < 1 || comp.h > 4 || comp.v < 1 || comp.v > 4 || comp.tq > 3)
          throw ParseError("bad component descriptor", body_off);
        img.components.push_back(comp);
      }
      have_frame = true;
    } else if (marker == kDQT) {
      size_t off = 0;
      while (off < body_len) {
        uint8_t pq = body[off] >> 4, tq = body[off] & 0xF;
        if (pq > 1 || tq > 3) throw ParseError("bad DQT header", body_off + off);
        ++off;
        size_t entry = pq ? 2 : 1;
        if (off + 64 * entry > body_len) throw ParseError("truncated DQT", body_off + off);
        QuantTable t;
        t.precision = pq;
        for (int k = 0; k < 64; ++k) {
          t.q[k] = pq ? get_u16be(body + off + 2 * k) : body[off + k];
          if (t.q[k] == 0) throw ParseError("zero quantizer step", body_off + off);
        }
        off += 64 * entry;
        img.qtables[tq] = t;
      }
    } else if (marker == kDHT) {
      size_t off = 0;
      while (off < body_len) {
        if (off + 17 > body_len) throw ParseError("truncated DHT", body_off + off);
        uint8_t tc = body[off] >> 4, th = body[off] & 0xF;
        if (tc > 1 || th > 3) throw ParseError("bad DHT header", body_off + off);
        size_t nvals = 0;
        for (int k = 0; k < 16; ++k) nvals += body[off + 1 + k];
        if (off + 17 + nvals > body_len) throw ParseError("truncated DHT values", body_off + off);
        auto& table = tc == 0 ? dc_tables[th] : ac_tables[th];
        table.build(body + off + 1, body + off + 17, nvals);
        off += 17 + nvals;
      }
    } else if (marker == kDRI) {
      if (body_len != 2) throw ParseError("bad DRI length", body_off);
      restart_interval = get_u16be(body);
    } else if (marker == kSOS) {
      if (!have_frame) throw ParseError("scan before frame header", body_off);
      if (!img.scan_data.empty() || !img.coeffs.empty())
        throw UnsupportedFormat("multi-scan JPEG is not supported");
      if (body_len < 4) throw ParseError("scan header too short", body_off);
      uint8_t ns = body[0];
      if (body_len != size_t(4 + 2 * ns)) throw ParseError("bad scan header length", body_off);
      if (ns != img.components.size())
        throw UnsupportedFormat("partial-component scans are not supported");
      std::vector<ScanComponentSpec> scan;
      for (uint8_t s = 0; s < ns; ++s) {
        uint8_t cs = body[1 + 2 * s];
        uint8_t td = body[2 + 2 * s] >> 4, ta = body[2 + 2 * s] & 0xF;
        size_t ci = img.components.size();
        for (size_t c = 0; c < img.components.size(); ++c)
          if (img.components[c].id == cs) ci = c;
        if (ci == img.components.size())
          throw ParseError("scan references unknown component", body_off);
        if (td > 3 || ta > 3) throw ParseError("bad entropy table selector", body_off);
        scan.push_back({ci, td, ta});
      }
      // spectral selection / approximation bytes must be baseline values
      if (body[1 + 2 * ns] != 0 || body[2 + 2 * ns] != 63 || body[3 + 2 * ns] != 0)
        throw UnsupportedFormat("non-baseline spectral selection in scan header");

      // Allocate coefficient storage.
      uint32_t mcus_x = img.mcus_per_row();
      uint32_t mcus_y = img.mcus_per_col();
      img.coeffs.resize(img.components.size());
      for (size_t c = 0; c < img.components.size(); ++c) {
        img.coeffs[c].blocks_w = mcus_x * img.comp_h(c);
        img.coeffs[c].blocks_h = mcus_y * img.comp_v(c);
        img.coeffs[c].blocks.assign(size_t(img.coeffs[c].blocks_w) * img.coeffs[c].blocks_h,
                                    CoeffBlock{});
      }

      // Locate the end of the entropy-coded data: scan for a marker that is
      // not byte stuffing and not a restart.
      size_t scan_start = pos;
      size_t p = pos;
      while (true) {
        if (p + 1 >= bytes.size()) throw ParseError("scan data truncated", p);
        if (bytes[p] == 0xFF) {
          uint8_t m = bytes[p + 1];
          if (m == 0x00 || is_rst(m)) {
            p += 2;
            continue;
          }
          break;
        }
        ++p;
      }
      img.scan_data.assign(bytes.begin() + scan_start, bytes.begin() + p);
      pos = p;

      // Entropy-decode all MCUs.
      BitReader br(img.scan_data, scan_start);
      std::vector<int32_t> dc_pred(img.components.size(), 0);
      uint32_t mcus_total = mcus_x * mcus_y;
      uint32_t since_restart = 0;
      int restart_index = 0;
      for (uint32_t mcu = 0; mcu < mcus_total; ++mcu) {
        if (restart_interval && since_restart == restart_interval) {
          br.restart(restart_index);
          restart_index = (restart_index + 1) & 7;
          since_restart = 0;
          std::fill(dc_pred.begin(), dc_pred.end(), 0);
        }
        uint32_t mx = mcu % mcus_x, my = mcu / mcus_x;
        for (const auto& sc : scan) {
          const auto& dct = dc_tables[sc.dc_table];
          const auto& act = ac_tables[sc.ac_table];
          if (!dct.present || !act.present)
            throw ParseError("scan uses undefined Huffman table", scan_start);
          uint8_t bh = img.comp_h(sc.comp_index), bv = img.comp_v(sc.comp_index);
          for (uint8_t by = 0; by < bv; ++by)
            for (uint8_t bx = 0; bx < bh; ++bx) {
              CoeffBlock blk{};
              int t = decode_symbol(br, dct, scan_start);
              if (t > 11) throw ParseError("bad DC category", scan_start);
              int32_t diff = extend(br.bits(t), t);
              dc_pred[sc.comp_index] += diff;
              blk[0] = int16_t(dc_pred[sc.comp_index]);
              int k = 1;
              while (k < 64) {
                int rs = decode_symbol(br, act, scan_start);
                int r = rs >> 4, ssss = rs & 0xF;
                if (ssss == 0) {
                  if (r == 15) {
                    k += 16;
                    continue;
                  }
                  break;  // EOB
                }
                k += r;
                if (k > 63) throw ParseError("AC run past end of block", scan_start);
                blk[k] = int16_t(extend(br.bits(ssss), ssss));
                ++k;
              }
              img.coeffs[sc.comp_index].at(mx * bh + bx, my * bv + by) = blk;
            }
        }
        ++since_restart;
      }
    } else {
      // APPn / COM / other metadata: preserved verbatim in img.segments.
    }

    if (marker == kSOS) {
      // After scan data, expect EOI.
      need(2, "EOI");
      if (bytes[pos] != 0xFF || bytes[pos + 1] != kEOI)
        throw ParseError("expected EOI after scan", pos);
      pos += 2;
      img.trailing.assign(bytes.begin() + pos, bytes.end());
      break;
    }
  }

  if (img.coeffs.empty()) throw ParseError("no scan found", pos);
  for (const auto& c : img.components)
    if (!img.qtables[c.tq]) throw ParseError("component references missing DQT", 0);
  return img;
}

Bytes serialize_jpeg(const JpegImage& img) {
  Bytes out;
  out.push_back(0xFF);
  out.push_back(kSOI);
  for (const auto& seg : img.segments) {
    out.push_back(0xFF);
    out.push_back(seg.marker);
    size_t len = seg.payload.size() + 2;
    if (len > 0xFFFF) throw std::logic_error("segment too long");
    put_u16be(out, uint16_t(len));
    append(out, seg.payload);
    if (seg.marker == kSOS) append(out, img.scan_data);
  }
  out.push_back(0xFF);
  out.push_back(kEOI);
  append(out, img.trailing);
  return out;
}

}  // namespace cropsig::jpeg
