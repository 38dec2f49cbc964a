#include "cropsig/scheme.hpp"

#include <cstring>
#include <stdexcept>

namespace cropsig {

namespace {

constexpr std::string_view kHeaderTag = "cropsig:header:v1";
constexpr std::string_view kBlockTag = "cropsig:block:v1";
constexpr std::string_view kHashDomain = "cropsig:g1:v1";

std::span<const uint8_t> sv_bytes(std::string_view s) {
  return {reinterpret_cast<const uint8_t*>(s.data()), s.size()};
}

}  // namespace

const PairingSuite& default_suite() {
  static const PairingSuite s{
      kSuiteBls12381Ed25519,
      128,
      bls::g1_generator(),
      bls::g2_generator(),
      bls::group_order(),
      bls::kG1CompressedSize,
      bls::kG2CompressedSize,
      kOuterSignatureSize,
      kOuterPublicKeySize,
  };
  return s;
}

Bytes header_message(uint8_t suite_id, uint32_t w, uint32_t h,
                     std::span<const uint8_t> pk_bytes, const Digest32& context_digest) {
  Bytes m;
  append(m, kHeaderTag);
  m.push_back(suite_id);
  put_u32be(m, w);
  put_u32be(m, h);
  put_u16be(m, uint16_t(pk_bytes.size()));
  append(m, pk_bytes);
  append(m, context_digest);
  return m;
}

Bytes block_message(uint32_t i, uint32_t j, std::span<const uint8_t> block) {
  Bytes m;
  append(m, kBlockTag);
  put_u32be(m, i);
  put_u32be(m, j);
  put_u64be(m, block.size());
  append(m, block);
  return m;
}

bls::G1Point block_hash_point(uint32_t i, uint32_t j, std::span<const uint8_t> block) {
  return bls::hash_to_g1(sv_bytes(kHashDomain), block_message(i, j, block));
}

// ---------------------------------------------------------------- serialization

Bytes FullSignature::serialize() const {
  Bytes out;
  out.push_back(suite_id);
  put_u32be(out, width_blocks);
  put_u32be(out, height_blocks);
  append(out, context_digest);
  append(out, bls::g2_encode(ephemeral_pk));
  if (outer_sig.bytes.size() != kOuterSignatureSize)
    throw std::logic_error("outer signature has wrong length");
  append(out, outer_sig.bytes);
  for (const auto& s : block_sigs) append(out, bls::g1_encode(s));
  return out;
}

std::optional<FullSignature> FullSignature::deserialize(std::span<const uint8_t> in) {
  constexpr size_t fixed = 1 + 4 + 4 + 32 + bls::kG2CompressedSize + kOuterSignatureSize;
  if (in.size() < fixed) return std::nullopt;
  FullSignature s;
  size_t off = 0;
  s.suite_id = in[off++];
  if (s.suite_id != kSuiteBls12381Ed25519) return std::nullopt;
  s.width_blocks = get_u32be(in.data() + off);
  off += 4;
  s.height_blocks = get_u32be(in.data() + off);
  off += 4;
  std::memcpy(s.context_digest.data(), in.data() + off, 32);
  off += 32;
  auto pk = bls::g2_decode(in.subspan(off, bls::kG2CompressedSize));
  if (!pk) return std::nullopt;
  s.ephemeral_pk = *pk;
  off += bls::kG2CompressedSize;
  s.outer_sig.bytes.assign(in.begin() + off, in.begin() + off + kOuterSignatureSize);
  off += kOuterSignatureSize;
  uint64_t n = uint64_t(s.width_blocks) * s.height_blocks;
  if (n == 0 || in.size() - off != n * bls::kG1CompressedSize) return std::nullopt;
  s.block_sigs.reserve(n);
  for (uint64_t k = 0; k < n; ++k) {
    auto p = bls::g1_decode(in.subspan(off, bls::kG1CompressedSize));
    if (!p) return std::nullopt;
    s.block_sigs.push_back(*p);
    off += bls::kG1CompressedSize;
  }
  return s;
}

Bytes CroppedSignature::serialize() const {
  Bytes out;
  out.push_back(suite_id);
  put_u32be(out, width_blocks);
  put_u32be(out, height_blocks);
  append(out, context_digest);
  put_u32be(out, rect.i1);
  put_u32be(out, rect.i2);
  put_u32be(out, rect.j1);
  put_u32be(out, rect.j2);
  append(out, bls::g2_encode(ephemeral_pk));
  if (outer_sig.bytes.size() != kOuterSignatureSize)
    throw std::logic_error("outer signature has wrong length");
  append(out, outer_sig.bytes);
  append(out, bls::g1_encode(aggregate));
  return out;
}

std::optional<CroppedSignature> CroppedSignature::deserialize(std::span<const uint8_t> in) {
  constexpr size_t expected = 1 + 4 + 4 + 32 + 16 + bls::kG2CompressedSize +
                              kOuterSignatureSize + bls::kG1CompressedSize;
  if (in.size() != expected) return std::nullopt;
  CroppedSignature s;
  size_t off = 0;
  s.suite_id = in[off++];
  if (s.suite_id != kSuiteBls12381Ed25519) return std::nullopt;
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
  auto pk = bls::g2_decode(in.subspan(off, bls::kG2CompressedSize));
  if (!pk) return std::nullopt;
  s.ephemeral_pk = *pk;
  off += bls::kG2CompressedSize;
  s.outer_sig.bytes.assign(in.begin() + off, in.begin() + off + kOuterSignatureSize);
  off += kOuterSignatureSize;
  auto agg = bls::g1_decode(in.subspan(off, bls::kG1CompressedSize));
  if (!agg) return std::nullopt;
  s.aggregate = *agg;
  if (!s.rect.valid_within(s.width_blocks, s.height_blocks)) return std::nullopt;
  return s;
}

// ---------------------------------------------------------------- operations

FullSignature sign_full(const OuterKeyPair& key, const BlockGrid& grid,
                        EntropySource& entropy) {
  if (grid.width_blocks == 0 || grid.height_blocks == 0)
    throw std::invalid_argument("empty block grid");
  if (!grid.block_bytes) throw std::invalid_argument("grid has no block provider");

  bls::Scalar k = bls::random_scalar(entropy);
  FullSignature full;
  full.width_blocks = grid.width_blocks;
  full.height_blocks = grid.height_blocks;
  full.context_digest = grid.context_digest;
  full.ephemeral_pk = bls::g2_scalar_mul(k, bls::g2_generator());

  Bytes header = header_message(full.suite_id, full.width_blocks, full.height_blocks,
                                bls::g2_encode(full.ephemeral_pk), full.context_digest);
  full.outer_sig = outer_sign(key, header);

  full.block_sigs.reserve(size_t(grid.width_blocks) * grid.height_blocks);
  for (uint32_t i = 1; i <= grid.height_blocks; ++i)
    for (uint32_t j = 1; j <= grid.width_blocks; ++j) {
      Bytes data = grid.block_bytes(i, j);
      full.block_sigs.push_back(bls::g1_scalar_mul(k, block_hash_point(i, j, data)));
    }
  return full;
}

CroppedSignature crop_signature(const FullSignature& full, const CropRect& rect) {
  if (!rect.valid_within(full.width_blocks, full.height_blocks))
    throw std::out_of_range("crop rect outside the signed grid");
  CroppedSignature out;
  out.suite_id = full.suite_id;
  out.width_blocks = full.width_blocks;
  out.height_blocks = full.height_blocks;
  out.context_digest = full.context_digest;
  out.rect = rect;
  out.ephemeral_pk = full.ephemeral_pk;
  out.outer_sig = full.outer_sig;
  bls::G1Point agg = bls::G1Point::identity();
  for (uint32_t i = rect.i1; i <= rect.i2; ++i)
    for (uint32_t j = rect.j1; j <= rect.j2; ++j) agg = bls::g1_add(agg, full.sig_at(i, j));
  out.aggregate = agg;
  return out;
}

namespace {

bool check_header(std::span<const uint8_t> signer_pk, uint8_t suite_id, uint32_t w,
                  uint32_t h, const bls::G2Point& pk, const Digest32& digest,
                  const OuterSignature& outer) {
  Bytes header = header_message(suite_id, w, h, bls::g2_encode(pk), digest);
  return outer_verify(signer_pk, outer, header);
}

// e(S, P2) == e(sum of block hash points, pk) -- exactly two pairings.
bool check_aggregate(const bls::G1Point& aggregate, const bls::G2Point& pk,
                     const bls::G1Point& hash_sum) {
  return pairing(aggregate, bls::g2_generator()) == pairing(hash_sum, pk);
}

}  // namespace

bool verify_cropped(std::span<const uint8_t> signer_pk, const CroppedSignature& sig,
                    const BlockGrid& sub_grid) {
  if (sig.suite_id != kSuiteBls12381Ed25519) return false;
  if (!sig.rect.valid_within(sig.width_blocks, sig.height_blocks)) return false;
  if (sub_grid.width_blocks != sig.width_blocks ||
      sub_grid.height_blocks != sig.height_blocks)
    return false;
  if (sub_grid.context_digest != sig.context_digest) return false;
  if (!sub_grid.block_bytes) return false;
  if (!check_header(signer_pk, sig.suite_id, sig.width_blocks, sig.height_blocks,
                    sig.ephemeral_pk, sig.context_digest, sig.outer_sig))
    return false;

  bls::G1Point hash_sum = bls::G1Point::identity();
  for (uint32_t i = sig.rect.i1; i <= sig.rect.i2; ++i)
    for (uint32_t j = sig.rect.j1; j <= sig.rect.j2; ++j) {
      Bytes data;
      try {
        data = sub_grid.block_bytes(i, j);
      } catch (const std::exception&) {
        return false;
      }
      hash_sum = bls::g1_add(hash_sum, block_hash_point(i, j, data));
    }
  return check_aggregate(sig.aggregate, sig.ephemeral_pk, hash_sum);
}

bool verify_full(std::span<const uint8_t> signer_pk, const FullSignature& full,
                 const BlockGrid& grid,
                 std::vector<std::pair<uint32_t, uint32_t>>* bad_cells) {
  if (full.suite_id != kSuiteBls12381Ed25519) return false;
  if (grid.width_blocks != full.width_blocks || grid.height_blocks != full.height_blocks)
    return false;
  if (grid.context_digest != full.context_digest) return false;
  if (full.block_sigs.size() != size_t(full.width_blocks) * full.height_blocks)
    return false;
  if (!grid.block_bytes) return false;
  if (!check_header(signer_pk, full.suite_id, full.width_blocks, full.height_blocks,
                    full.ephemeral_pk, full.context_digest, full.outer_sig))
    return false;

  if (bad_cells) {
    bad_cells->clear();
    for (uint32_t i = 1; i <= full.height_blocks; ++i)
      for (uint32_t j = 1; j <= full.width_blocks; ++j) {
        bls::G1Point h = block_hash_point(i, j, grid.block_bytes(i, j));
        if (!check_aggregate(full.sig_at(i, j), full.ephemeral_pk, h))
          bad_cells->emplace_back(i, j);
      }
    return bad_cells->empty();
  }

  bls::G1Point agg = bls::G1Point::identity();
  bls::G1Point hash_sum = bls::G1Point::identity();
  for (uint32_t i = 1; i <= full.height_blocks; ++i)
    for (uint32_t j = 1; j <= full.width_blocks; ++j) {
      agg = bls::g1_add(agg, full.sig_at(i, j));
      hash_sum = bls::g1_add(hash_sum, block_hash_point(i, j, grid.block_bytes(i, j)));
    }
  return check_aggregate(agg, full.ephemeral_pk, hash_sum);
}

}  // namespace cropsig
