#include "cropsig/baseline.hpp"

#include <cstring>
#include <stdexcept>

namespace cropsig {

namespace {
constexpr std::string_view kBaselineBlockTag = "cropsig:baseline-block:v1";
}

Bytes baseline_block_message(const std::array<uint8_t, kImageIdSize>& image_id, uint32_t i,
                             uint32_t j, std::span<const uint8_t> block) {
  Bytes m;
  append(m, kBaselineBlockTag);
  append(m, image_id);
  append(m, block_message(i, j, block));
  return m;
}

Bytes BaselineFullSignature::serialize() const {
  Bytes out;
  append(out, image_id);
  put_u32be(out, width_blocks);
  put_u32be(out, height_blocks);
  append(out, context_digest);
  append(out, outer_sig.bytes);
  for (const auto& s : block_sigs) {
    if (s.bytes.size() != kOuterSignatureSize)
      throw std::logic_error("block signature has wrong length");
    append(out, s.bytes);
  }
  return out;
}

std::optional<BaselineFullSignature> BaselineFullSignature::deserialize(
    std::span<const uint8_t> in) {
  constexpr size_t fixed = kImageIdSize + 4 + 4 + 32 + kOuterSignatureSize;
  if (in.size() < fixed) return std::nullopt;
  BaselineFullSignature s;
  size_t off = 0;
  std::memcpy(s.image_id.data(), in.data(), kImageIdSize);
  off += kImageIdSize;
  s.width_blocks = get_u32be(in.data() + off);
  off += 4;
  s.height_blocks = get_u32be(in.data() + off);
  off += 4;
  std::memcpy(s.context_digest.data(), in.data() + off, 32);
  off += 32;
  s.outer_sig.bytes.assign(in.begin() + off, in.begin() + off + kOuterSignatureSize);
  off += kOuterSignatureSize;
  uint64_t n = uint64_t(s.width_blocks) * s.height_blocks;
  if (n == 0 || in.size() - off != n * kOuterSignatureSize) return std::nullopt;
  s.block_sigs.reserve(n);
  for (uint64_t k = 0; k < n; ++k) {
    OuterSignature b;
    b.bytes.assign(in.begin() + off, in.begin() + off + kOuterSignatureSize);
    s.block_sigs.push_back(std::move(b));
    off += kOuterSignatureSize;
  }
  return s;
}

Bytes BaselineCroppedSignature::serialize() const {
  Bytes out;
  append(out, image_id);
  put_u32be(out, width_blocks);
  put_u32be(out, height_blocks);
  append(out, context_digest);
  put_u32be(out, rect.i1);
  put_u32be(out, rect.i2);
  put_u32be(out, rect.j1);
  put_u32be(out, rect.j2);
  append(out, outer_sig.bytes);
  for (const auto& s : block_sigs) {
    if (s.bytes.size() != kOuterSignatureSize)
      throw std::logic_error("block signature has wrong length");
    append(out, s.bytes);
  }
  return out;
}

std::optional<BaselineCroppedSignature> BaselineCroppedSignature::deserialize(
    std::span<const uint8_t> in) {
  constexpr size_t fixed = kImageIdSize + 4 + 4 + 32 + 16 + kOuterSignatureSize;
  if (in.size() < fixed) return std::nullopt;
  BaselineCroppedSignature s;
  size_t off = 0;
  std::memcpy(s.image_id.data(), in.data(), kImageIdSize);
  off += kImageIdSize;
  s.width_blocks = get_u32be(in.data() + off);
  off += 4;
  s.height_blocks = get_u32be(in.data() + off);
  off += 4;
  std::memcpy(s.context_digest.data(), in.data() + off, 32);
  off += 32;
  s.rect.i1 = get_u32be(in.data() + off);
  s.rect.i2 = get_u32be(in.data() + off + 4);
  s.rect.j1 = get_u32be(in.data() + off + 8);
  s.rect.j2 = get_u32be(in.data() + off + 12);
  off += 16;
  s.outer_sig.bytes.assign(in.begin() + off, in.begin() + off + kOuterSignatureSize);
  off += kOuterSignatureSize;
  if (!s.rect.valid_within(s.width_blocks, s.height_blocks)) return std::nullopt;
  uint64_t n = s.rect.cell_count();
  if (in.size() - off != n * kOuterSignatureSize) return std::nullopt;
  s.block_sigs.reserve(n);
  for (uint64_t k = 0; k < n; ++k) {
    OuterSignature b;
    b.bytes.assign(in.begin() + off, in.begin() + off + kOuterSignatureSize);
    s.block_sigs.push_back(std::move(b));
    off += kOuterSignatureSize;
  }
  return s;
}

BaselineFullSignature baseline_sign_full(const OuterKeyPair& key, const BlockGrid& grid,
                                         EntropySource& entropy) {
  if (grid.width_blocks == 0 || grid.height_blocks == 0)
    throw std::invalid_argument("empty block grid");
  if (!grid.block_bytes) throw std::invalid_argument("grid has no block provider");

  BaselineFullSignature full;
  entropy.fill(full.image_id);
  full.width_blocks = grid.width_blocks;
  full.height_blocks = grid.height_blocks;
  full.context_digest = grid.context_digest;

  Bytes header = header_message(kSuiteBls12381Ed25519, full.width_blocks,
                                full.height_blocks, full.image_id, full.context_digest);
  full.outer_sig = outer_sign(key, header);

  full.block_sigs.reserve(size_t(grid.width_blocks) * grid.height_blocks);
  for (uint32_t i = 1; i <= grid.height_blocks; ++i)
    for (uint32_t j = 1; j <= grid.width_blocks; ++j) {
      Bytes m = baseline_block_message(full.image_id, i, j, grid.block_bytes(i, j));
      full.block_sigs.push_back(outer_sign(key, m));
    }
  return full;
}

BaselineCroppedSignature baseline_crop(const BaselineFullSignature& full,
                                       const CropRect& rect) {
  if (!rect.valid_within(full.width_blocks, full.height_blocks))
    throw std::out_of_range("crop rect outside the signed grid");
  BaselineCroppedSignature out;
  out.image_id = full.image_id;
  out.width_blocks = full.width_blocks;
  out.height_blocks = full.height_blocks;
  out.context_digest = full.context_digest;
  out.rect = rect;
  out.outer_sig = full.outer_sig;
  for (uint32_t i = rect.i1; i <= rect.i2; ++i)
    for (uint32_t j = rect.j1; j <= rect.j2; ++j) out.block_sigs.push_back(full.sig_at(i, j));
  return out;
}

bool baseline_verify(std::span<const uint8_t> signer_pk,
                     const BaselineCroppedSignature& cropped, const BlockGrid& sub_grid) {
  if (!cropped.rect.valid_within(cropped.width_blocks, cropped.height_blocks)) return false;
  if (sub_grid.width_blocks != cropped.width_blocks ||
      sub_grid.height_blocks != cropped.height_blocks)
    return false;
  if (sub_grid.context_digest != cropped.context_digest) return false;
  if (cropped.block_sigs.size() != cropped.rect.cell_count()) return false;
  if (!sub_grid.block_bytes) return false;

  Bytes header = header_message(kSuiteBls12381Ed25519, cropped.width_blocks,
                                cropped.height_blocks, cropped.image_id,
                                cropped.context_digest);
  if (!outer_verify(signer_pk, cropped.outer_sig, header)) return false;

  size_t idx = 0;
  for (uint32_t i = cropped.rect.i1; i <= cropped.rect.i2; ++i)
    for (uint32_t j = cropped.rect.j1; j <= cropped.rect.j2; ++j) {
      Bytes m = baseline_block_message(cropped.image_id, i, j, sub_grid.block_bytes(i, j));
      if (!outer_verify(signer_pk, cropped.block_sigs[idx++], m)) return false;
    }
  return true;
}

bool baseline_verify_full(std::span<const uint8_t> signer_pk,
                          const BaselineFullSignature& full, const BlockGrid& grid) {
  BaselineCroppedSignature whole;
  whole.image_id = full.image_id;
  whole.width_blocks = full.width_blocks;
  whole.height_blocks = full.height_blocks;
  whole.context_digest = full.context_digest;
  whole.rect = {1, full.height_blocks, 1, full.width_blocks};
  whole.outer_sig = full.outer_sig;
  whole.block_sigs = full.block_sigs;
  return baseline_verify(signer_pk, whole, grid);
}

}  // namespace cropsig
