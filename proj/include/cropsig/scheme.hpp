#pragma once

// Croppable signature scheme over an abstract block grid: the signer
// produces one aggregatable block signature per cell under a per-image
// ephemeral key, the cropper sums the covered cells into a single group
// element, and the verifier checks two pairings plus the outer signature.

#include <functional>
#include <optional>
#include <vector>

#include "cropsig/bls12_381.hpp"
#include "cropsig/outer_sig.hpp"
#include "cropsig/suite.hpp"

namespace cropsig {

// Abstract w x h matrix of independently serialized block data, indexed
// 1-based (i = row in [1,h], j = column in [1,w]). A view over a cropped
// image keeps the original dimensions and digest and only needs to supply
// bytes for the covered cells.
struct BlockGrid {
  uint32_t width_blocks = 0;
  uint32_t height_blocks = 0;
  Digest32 context_digest{};
  std::function<Bytes(uint32_t i, uint32_t j)> block_bytes;
};

struct CropRect {
  uint32_t i1 = 0, i2 = 0, j1 = 0, j2 = 0;  // 1-based, inclusive

  bool valid_within(uint32_t w, uint32_t h) const {
    return 1 <= i1 && i1 <= i2 && i2 <= h && 1 <= j1 && j1 <= j2 && j2 <= w;
  }
  uint64_t cell_count() const { return uint64_t(i2 - i1 + 1) * (j2 - j1 + 1); }
  bool contains(uint32_t i, uint32_t j) const {
    return i1 <= i && i <= i2 && j1 <= j && j <= j2;
  }
  bool operator==(const CropRect&) const = default;
};

struct FullSignature {
  uint8_t suite_id = kSuiteBls12381Ed25519;
  uint32_t width_blocks = 0;
  uint32_t height_blocks = 0;
  Digest32 context_digest{};
  bls::G2Point ephemeral_pk;
  OuterSignature outer_sig;
  std::vector<bls::G1Point> block_sigs;  // row-major, h*w entries

  const bls::G1Point& sig_at(uint32_t i, uint32_t j) const {
    return block_sigs[size_t(i - 1) * width_blocks + (j - 1)];
  }

  Bytes serialize() const;
  static std::optional<FullSignature> deserialize(std::span<const uint8_t> in);
};

struct CroppedSignature {
  uint8_t suite_id = kSuiteBls12381Ed25519;
  uint32_t width_blocks = 0;
  uint32_t height_blocks = 0;
  Digest32 context_digest{};
  CropRect rect;
  bls::G2Point ephemeral_pk;
  OuterSignature outer_sig;
  bls::G1Point aggregate;

  Bytes serialize() const;
  static std::optional<CroppedSignature> deserialize(std::span<const uint8_t> in);
};

// Fixed-layout message signed by the outer key: binds dimensions, the
// ephemeral public key (or the baseline's image id) and the context digest.
Bytes header_message(uint8_t suite_id, uint32_t w, uint32_t h,
                     std::span<const uint8_t> pk_bytes, const Digest32& context_digest);

// Injective framing of one block's identity and payload.
Bytes block_message(uint32_t i, uint32_t j, std::span<const uint8_t> block);

// Hash of one block onto G1 (the per-block BLS message point).
bls::G1Point block_hash_point(uint32_t i, uint32_t j, std::span<const uint8_t> block);

FullSignature sign_full(const OuterKeyPair& key, const BlockGrid& grid,
                        EntropySource& entropy);

// Aggregates the covered block signatures; needs no key material.
// Throws std::out_of_range when rect does not fit the signed grid.
CroppedSignature crop_signature(const FullSignature& full, const CropRect& rect);

bool verify_cropped(std::span<const uint8_t> signer_pk, const CroppedSignature& sig,
                    const BlockGrid& sub_grid);

// Whole-grid verification used by the cropper to validate its input. When
// bad_cells is given, every cell is checked individually and failing (i, j)
// pairs are reported; otherwise a single aggregate check is used.
bool verify_full(std::span<const uint8_t> signer_pk, const FullSignature& full,
                 const BlockGrid& grid,
                 std::vector<std::pair<uint32_t, uint32_t>>* bad_cells = nullptr);

}  // namespace cropsig
