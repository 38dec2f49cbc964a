#pragma once

// Baseline JPEG container support: lossless segment/coefficient parsing,
// MCU-aligned cropping, block-grid extraction for the signature schemes,
// and signature payload embedding in Comments (COM) segments.

#include <array>
#include <memory>
#include <optional>
#include <stdexcept>

#include "cropsig/scheme.hpp"
#include "cropsig/util.hpp"

namespace cropsig::jpeg {

// ---------------------------------------------------------------- errors

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, size_t offset)
      : std::runtime_error(what + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}
  size_t offset() const { return offset_; }

 private:
  size_t offset_;
};

class UnsupportedFormat : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PayloadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------- model

// Marker segment as stored in the file (marker byte after 0xFF; payload
// excludes the 2-byte length field).
struct Segment {
  uint8_t marker = 0;
  Bytes payload;
};

struct Component {
  uint8_t id = 0;
  uint8_t h = 1, v = 1;  // sampling factors
  uint8_t tq = 0;        // quantization table id
};

struct QuantTable {
  uint8_t precision = 0;  // 0: 8-bit entries, 1: 16-bit entries
  std::array<uint16_t, 64> q{};  // zigzag order
};

// 64 quantized DCT coefficients in zigzag order; DC is stored as its
// absolute value (differential prediction already undone).
using CoeffBlock = std::array<int16_t, 64>;

struct ComponentCoeffs {
  uint32_t blocks_w = 0, blocks_h = 0;  // padded to the MCU grid
  std::vector<CoeffBlock> blocks;       // raster order

  CoeffBlock& at(uint32_t bx, uint32_t by) { return blocks[size_t(by) * blocks_w + bx]; }
  const CoeffBlock& at(uint32_t bx, uint32_t by) const {
    return blocks[size_t(by) * blocks_w + bx];
  }
};

struct JpegImage {
  std::vector<Segment> segments;  // file order; SOS header is segments[i] with
                                  // the entropy-coded data in scan_data
  Bytes scan_data;                // raw entropy-coded bytes as stored
  Bytes trailing;                 // bytes after EOI, preserved verbatim

  uint16_t width = 0, height = 0;
  uint8_t precision = 8;
  std::vector<Component> components;
  std::array<std::optional<QuantTable>, 4> qtables;
  std::vector<ComponentCoeffs> coeffs;  // parallel to components

  uint8_t hmax() const;
  uint8_t vmax() const;
  uint32_t mcu_width_px() const { return components.size() == 1 ? 8 : 8u * hmax(); }
  uint32_t mcu_height_px() const { return components.size() == 1 ? 8 : 8u * vmax(); }
  uint32_t mcus_per_row() const { return (width + mcu_width_px() - 1) / mcu_width_px(); }
  uint32_t mcus_per_col() const { return (height + mcu_height_px() - 1) / mcu_height_px(); }
  // Blocks of one component inside one MCU.
  uint8_t comp_h(size_t c) const { return components.size() == 1 ? 1 : components[c].h; }
  uint8_t comp_v(size_t c) const { return components.size() == 1 ? 1 : components[c].v; }
};

// ---------------------------------------------------------------- codec

// Accepts baseline sequential Huffman JPEG (SOF0) with a single scan.
// Throws ParseError on malformed input and UnsupportedFormat on
// progressive/arithmetic/multi-scan files.
JpegImage parse_jpeg(std::span<const uint8_t> bytes);

// Reassembles the file from the segment model. parse followed by
// serialize with no modifications is byte-identical.
Bytes serialize_jpeg(const JpegImage& img);

// Re-encodes the entropy-coded scan from the stored coefficients using the
// standard Huffman tables, replacing scan_data and the DHT/SOS segments.
// Coefficients and quantization tables are untouched.
void reencode_scan(JpegImage& img);

// ---------------------------------------------------------------- encoder

struct EncodeOptions {
  int quality = 75;           // 1..100, IJG-style scaling
  bool subsample_420 = true;  // false: 4:4:4
  bool grayscale = false;
};

// Baseline encoder used for synthesized test/bench imagery. rgb is
// 3 bytes per pixel, row-major.
Bytes encode_jpeg(uint32_t width, uint32_t height, std::span<const uint8_t> rgb,
                  const EncodeOptions& opts);

// Procedural test image (noise + gradients), deterministic per seed.
Bytes generate_test_rgb(uint32_t width, uint32_t height, uint64_t seed);

// ---------------------------------------------------------------- grid & crop

struct GranularityConfig {
  uint32_t g = 1;  // signature cell = g x g MCUs
};

uint32_t grid_width_cells(const JpegImage& img, const GranularityConfig& cfg);
uint32_t grid_height_cells(const JpegImage& img, const GranularityConfig& cfg);

// Digest binding everything outside the blocks that affects their meaning:
// pixel dimensions, component descriptors, sampling, quantization tables
// and the granularity.
Digest32 context_digest(const JpegImage& img, const GranularityConfig& cfg);
Digest32 context_digest_with_dims(const JpegImage& img, const GranularityConfig& cfg,
                                  uint32_t px_w, uint32_t px_h);

// Grid over a full image; cell bytes are the canonical serialization of
// all coefficient blocks of the covered MCUs.
BlockGrid extract_block_grid(const JpegImage& img, const GranularityConfig& cfg);

// Grid view over a cropped file, addressed by ORIGINAL cell indices. The
// original pixel dimensions come from the signature payload; the view
// reproduces the original context digest, so lying about the dimensions
// makes verification fail. Throws std::invalid_argument when the cropped
// file's geometry cannot correspond to rect within the claimed original.
BlockGrid cropped_grid_view(const JpegImage& cropped, const GranularityConfig& cfg,
                            const CropRect& rect, uint32_t orig_px_w, uint32_t orig_px_h);

// Extracts the covered MCUs into a standalone JPEG with bit-identical
// coefficients (DC differences recomputed for the new topology).
JpegImage lossless_crop(const JpegImage& img, const CropRect& cell_rect,
                        const GranularityConfig& cfg);

// ---------------------------------------------------------------- payload

enum class SchemeId : uint8_t { croppable = 0x01, baseline = 0x02 };
enum class PayloadKind : uint8_t { full = 0x01, cropped = 0x02 };

// Container embedded in COM segments. Wire format:
//   "CRSIGJPG" | version 0x01 | scheme | kind | suite | g u16 |
//   body_len u32 | body | cert_len u16 | cert
// chunked across COM segments of at most 65533 payload bytes, each chunk
// prefixed "CRSG" | chunk_index u8 | total_chunks u8.
// For kind == cropped the body starts with the original pixel dimensions
// (two u32) followed by the serialized cropped signature.
struct SignaturePayload {
  uint8_t version = 0x01;
  SchemeId scheme = SchemeId::croppable;
  PayloadKind kind = PayloadKind::full;
  uint8_t suite_id = kSuiteBls12381Ed25519;
  uint16_t granularity = 1;
  Bytes body;
  Bytes certificate;

  Bytes serialize() const;
  // Throws PayloadError on malformed container bytes.
  static SignaturePayload parse(std::span<const uint8_t> in);
};

size_t payload_chunk_count(size_t payload_size);

JpegImage embed_payload(const JpegImage& img, const SignaturePayload& payload);
// nullopt when the file carries no payload; throws PayloadError on
// missing/duplicate chunks or multiple payloads.
std::optional<SignaturePayload> extract_payload(const JpegImage& img);
JpegImage strip_payload(const JpegImage& img);

}  // namespace cropsig::jpeg
