#pragma once

// Comparison baseline: the trivial redactable construction with one
// standard (Ed25519) signature per block. Cropping selects signatures
// verbatim, so the cropped signature grows linearly with the rect. A
// random per-image id takes the ephemeral key's anti-splicing role.

#include <optional>
#include <vector>

#include "cropsig/outer_sig.hpp"
#include "cropsig/scheme.hpp"

namespace cropsig {

inline constexpr size_t kImageIdSize = 16;

struct BaselineFullSignature {
  std::array<uint8_t, kImageIdSize> image_id{};
  uint32_t width_blocks = 0;
  uint32_t height_blocks = 0;
  Digest32 context_digest{};
  OuterSignature outer_sig;
  std::vector<OuterSignature> block_sigs;  // row-major, h*w entries

  const OuterSignature& sig_at(uint32_t i, uint32_t j) const {
    return block_sigs[size_t(i - 1) * width_blocks + (j - 1)];
  }

  Bytes serialize() const;
  static std::optional<BaselineFullSignature> deserialize(std::span<const uint8_t> in);
};

struct BaselineCroppedSignature {
  std::array<uint8_t, kImageIdSize> image_id{};
  uint32_t width_blocks = 0;
  uint32_t height_blocks = 0;
  Digest32 context_digest{};
  CropRect rect;
  OuterSignature outer_sig;
  std::vector<OuterSignature> block_sigs;  // row-major over rect cells

  Bytes serialize() const;
  static std::optional<BaselineCroppedSignature> deserialize(std::span<const uint8_t> in);
};

// Message signed per block: image id followed by the standard block framing.
Bytes baseline_block_message(const std::array<uint8_t, kImageIdSize>& image_id, uint32_t i,
                             uint32_t j, std::span<const uint8_t> block);

BaselineFullSignature baseline_sign_full(const OuterKeyPair& key, const BlockGrid& grid,
                                         EntropySource& entropy);

BaselineCroppedSignature baseline_crop(const BaselineFullSignature& full,
                                       const CropRect& rect);

bool baseline_verify(std::span<const uint8_t> signer_pk,
                     const BaselineCroppedSignature& cropped, const BlockGrid& sub_grid);

bool baseline_verify_full(std::span<const uint8_t> signer_pk,
                          const BaselineFullSignature& full, const BlockGrid& grid);

}  // namespace cropsig
