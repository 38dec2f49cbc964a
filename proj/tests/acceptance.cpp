// Acceptance gate: one pass/fail line per criterion, nonzero exit when
// any criterion fails. Runs real signing over both abstract grids and
// synthesized JPEG files; libjpeg acts as the independent decoder.

#include <chrono>
#include <cstdio>
#include <map>
#include <vector>

#include "cropsig/baseline.hpp"
#include "cropsig/jpeg.hpp"
#include "cropsig/scheme.hpp"
#include "jpeg_testutil.hpp"

using namespace cropsig;
namespace cj = cropsig::jpeg;

namespace {

DeterministicEntropy g_rng(0xacce97);

BlockGrid make_grid(uint32_t w, uint32_t h, size_t block_len = 6) {
  auto blocks = std::make_shared<std::map<std::pair<uint32_t, uint32_t>, Bytes>>();
  for (uint32_t i = 1; i <= h; ++i)
    for (uint32_t j = 1; j <= w; ++j) {
      Bytes b(block_len);
      g_rng.fill(b);
      (*blocks)[{i, j}] = b;
    }
  BlockGrid g;
  g.width_blocks = w;
  g.height_blocks = h;
  Bytes seed(8);
  g_rng.fill(seed);
  g.context_digest = sha256(seed);
  g.block_bytes = [blocks](uint32_t i, uint32_t j) { return blocks->at({i, j}); };
  return g;
}

const OuterKeyPair& keypair() {
  static const OuterKeyPair kp = outer_keygen(g_rng);
  return kp;
}

uint32_t rand_in(uint32_t lo, uint32_t hi) {
  uint8_t b[4];
  g_rng.fill(b);
  return lo + get_u32be(b) % (hi - lo + 1);
}

// Payload assembly mirroring the CLI: cropped bodies carry the original
// pixel dimensions ahead of the signature.
cj::SignaturePayload wrap(cj::SchemeId scheme, cj::PayloadKind kind, uint32_t g,
                          Bytes body, Bytes cert = {}) {
  cj::SignaturePayload p;
  p.scheme = scheme;
  p.kind = kind;
  p.granularity = uint16_t(g);
  p.body = std::move(body);
  p.certificate = std::move(cert);
  return p;
}

Bytes cropped_body(uint32_t ow, uint32_t oh, const Bytes& sig) {
  Bytes b;
  put_u32be(b, ow);
  put_u32be(b, oh);
  append(b, sig);
  return b;
}

cj::JpegImage synth(uint32_t w, uint32_t h, uint64_t seed, int quality = 75,
                    bool gray = false, bool sub420 = true) {
  cj::EncodeOptions opts;
  opts.quality = quality;
  opts.grayscale = gray;
  opts.subsample_420 = sub420;
  return cj::parse_jpeg(cj::encode_jpeg(w, h, cj::generate_test_rgb(w, h, seed), opts));
}

// ------------------------------------------------------------- criterion 1

bool criterion1_correctness() {
  auto t0 = std::chrono::steady_clock::now();
  // every grid size up to 8x8: sign, then verify full rect + 2 random rects
  for (uint32_t h = 1; h <= 8; ++h)
    for (uint32_t w = 1; w <= 8; ++w) {
      BlockGrid g = make_grid(w, h);
      FullSignature full = sign_full(keypair(), g, g_rng);
      std::vector<CropRect> rects{{1, h, 1, w}};
      for (int t = 0; t < 2; ++t) {
        uint32_t i1 = rand_in(1, h), i2 = rand_in(i1, h);
        uint32_t j1 = rand_in(1, w), j2 = rand_in(j1, w);
        rects.push_back({i1, i2, j1, j2});
      }
      for (const CropRect& r : rects)
        if (!verify_cropped(keypair().public_key, crop_signature(full, r), g)) {
          std::printf("  %ux%u rect %u,%u,%u,%u failed\n", w, h, r.i1, r.i2, r.j1,
                      r.j2);
          return false;
        }
    }
  // all O(n^4) rects of a 4x4 grid
  BlockGrid g = make_grid(4, 4);
  FullSignature full = sign_full(keypair(), g, g_rng);
  for (uint32_t i1 = 1; i1 <= 4; ++i1)
    for (uint32_t i2 = i1; i2 <= 4; ++i2)
      for (uint32_t j1 = 1; j1 <= 4; ++j1)
        for (uint32_t j2 = j1; j2 <= 4; ++j2)
          if (!verify_cropped(keypair().public_key,
                              crop_signature(full, {i1, i2, j1, j2}), g))
            return false;
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs >= 60.0) {
    std::printf("  correctness suite took %.1fs (budget 60s)\n", secs);
    return false;
  }
  return true;
}

// ------------------------------------------------------------- criterion 2

bool criterion2_tamper() {
  BlockGrid g = make_grid(2, 2, 3);
  FullSignature full = sign_full(keypair(), g, g_rng);
  CroppedSignature cropped = crop_signature(full, {1, 2, 1, 2});
  if (!verify_cropped(keypair().public_key, cropped, g)) return false;  // control

  size_t false_accepts = 0;
  // every single-bit flip of every covered block's bytes
  for (uint32_t i = 1; i <= 2; ++i)
    for (uint32_t j = 1; j <= 2; ++j) {
      Bytes orig = g.block_bytes(i, j);
      for (size_t byte = 0; byte < orig.size(); ++byte)
        for (int bit = 0; bit < 8; ++bit) {
          Bytes bad = orig;
          bad[byte] ^= uint8_t(1u << bit);
          BlockGrid tampered = g;
          auto inner = g.block_bytes;
          tampered.block_bytes = [=](uint32_t a, uint32_t b) {
            return (a == i && b == j) ? bad : inner(a, b);
          };
          if (verify_cropped(keypair().public_key, cropped, tampered)) ++false_accepts;
        }
    }
  // every single-bit flip of the serialized signature (covers S', S'',
  // pk, w, h, rect and context_digest); a flip must fail to deserialize
  // or fail to verify
  Bytes ser = cropped.serialize();
  for (size_t byte = 0; byte < ser.size(); ++byte)
    for (int bit = 0; bit < 8; ++bit) {
      Bytes bad = ser;
      bad[byte] ^= uint8_t(1u << bit);
      auto sig = CroppedSignature::deserialize(bad);
      if (sig && verify_cropped(keypair().public_key, *sig, g)) ++false_accepts;
    }
  if (false_accepts) std::printf("  %zu false accepts\n", false_accepts);
  return false_accepts == 0;
}

// ------------------------------------------------------------- criterion 3

bool criterion3_constant_size() {
  cj::JpegImage img = synth(160, 112, 301);  // 10x7 cells at g=1
  cj::GranularityConfig cfg{1};
  BlockGrid grid = cj::extract_block_grid(img, cfg);
  FullSignature full = sign_full(keypair(), grid, g_rng);
  BaselineFullSignature bfull = baseline_sign_full(keypair(), grid, g_rng);

  std::vector<CropRect> rects = {{1, 1, 1, 1}, {1, 2, 1, 2}, {1, 3, 1, 3}};  // 1, 4, 9
  std::vector<size_t> csize, bsize;
  for (const CropRect& r : rects) {
    csize.push_back(wrap(cj::SchemeId::croppable, cj::PayloadKind::cropped, 1,
                         cropped_body(img.width, img.height,
                                      crop_signature(full, r).serialize()))
                        .serialize()
                        .size());
    bsize.push_back(wrap(cj::SchemeId::baseline, cj::PayloadKind::cropped, 1,
                         cropped_body(img.width, img.height,
                                      baseline_crop(bfull, r).serialize()))
                        .serialize()
                        .size());
  }
  bool constant = csize[0] == csize[1] && csize[1] == csize[2];
  bool increasing = bsize[0] < bsize[1] && bsize[1] < bsize[2];
  // exact affine fit over cell counts 1, 4, 9: equal per-cell increments
  size_t d1 = (bsize[1] - bsize[0]) / 3, d2 = (bsize[2] - bsize[1]) / 5;
  bool affine = (bsize[1] - bsize[0]) % 3 == 0 && (bsize[2] - bsize[1]) % 5 == 0 &&
                d1 == d2;
  if (!(constant && increasing && affine))
    std::printf("  croppable %zu/%zu/%zu baseline %zu/%zu/%zu\n", csize[0], csize[1],
                csize[2], bsize[0], bsize[1], bsize[2]);
  return constant && increasing && affine;
}

// ------------------------------------------------------------- criterion 4

bool criterion4_size_trend() {
  cj::JpegImage img = synth(1024, 768, 401, 75);
  Bytes unsigned_file = cj::serialize_jpeg(img);

  std::vector<size_t> payload_c, payload_b, signed_c, signed_b;
  for (uint32_t g = 1; g <= 6; ++g) {
    cj::GranularityConfig cfg{g};
    BlockGrid grid = cj::extract_block_grid(img, cfg);
    cj::SignaturePayload pc =
        wrap(cj::SchemeId::croppable, cj::PayloadKind::full, g,
             sign_full(keypair(), grid, g_rng).serialize());
    cj::SignaturePayload pb =
        wrap(cj::SchemeId::baseline, cj::PayloadKind::full, g,
             baseline_sign_full(keypair(), grid, g_rng).serialize());
    payload_c.push_back(pc.serialize().size());
    payload_b.push_back(pb.serialize().size());
    signed_c.push_back(cj::serialize_jpeg(cj::embed_payload(img, pc)).size());
    signed_b.push_back(cj::serialize_jpeg(cj::embed_payload(img, pb)).size());
  }

  bool smaller123 = payload_c[0] < payload_b[0] && payload_c[1] < payload_b[1] &&
                    payload_c[2] < payload_b[2];
  bool monotone = true;
  double prev_gap = 1e18;
  for (size_t k = 0; k < 6; ++k) {
    double gap = double(signed_b[k]) - double(signed_c[k]);
    double rel = gap / double(signed_c[k]);
    if (rel >= prev_gap) monotone = false;
    prev_gap = rel;
  }
  double gap6 = double(signed_b[5]) - double(signed_c[5]);
  bool negligible = gap6 < 0.01 * double(unsigned_file.size());
  if (!(smaller123 && monotone && negligible))
    std::printf("  payloads c/b at g=1: %zu/%zu, gap at g=6: %.0fB vs file %zuB\n",
                payload_c[0], payload_b[0], gap6, unsigned_file.size());
  return smaller123 && monotone && negligible;
}

// ------------------------------------------------------------- criterion 5

bool criterion5_analytical_size() {
  struct Case {
    uint32_t w, h;
    int quality;
    bool gray;
  };
  Case cases[] = {{96, 64, 75, false}, {129, 80, 85, false}, {64, 64, 60, true}};
  Bytes cert(137);
  g_rng.fill(cert);
  for (const Case& c : cases) {
    cj::JpegImage img = synth(c.w, c.h, c.w * 7 + c.h, c.quality, c.gray);
    uint32_t mcu = c.gray ? 8 : 16;
    uint32_t mcus_x = (c.w + mcu - 1) / mcu;
    uint32_t mcus_y = (c.h + mcu - 1) / mcu;
    for (uint32_t g : {1u, 2u, 4u}) {
      BlockGrid grid = cj::extract_block_grid(img, {g});
      size_t n = size_t((mcus_x + g - 1) / g) * ((mcus_y + g - 1) / g);
      size_t measured =
          wrap(cj::SchemeId::croppable, cj::PayloadKind::full, g,
               sign_full(keypair(), grid, g_rng).serialize(), cert)
              .serialize()
              .size();
      // container(20) + body header(1+4+4+32) + |pk|(96) + |S'|(64) + 48n + cert
      size_t formula = 20 + 41 + 96 + 64 + 48 * n + cert.size();
      if (measured != formula) {
        std::printf("  %ux%u g=%u: measured %zu, formula %zu\n", c.w, c.h, g, measured,
                    formula);
        return false;
      }
    }
  }
  return true;
}

// ------------------------------------------------------------- criterion 6

bool criterion6_lossless_crop() {
  for (int trial = 0; trial < 20; ++trial) {
    uint32_t w = rand_in(33, 200), h = rand_in(33, 200);
    bool gray = trial % 5 == 4;
    bool sub420 = trial % 3 != 2;
    int quality = int(rand_in(50, 92));
    cj::JpegImage img = synth(w, h, 600 + trial, quality, gray, sub420);
    uint32_t g = std::array{1u, 2u, 4u}[trial % 3];
    cj::GranularityConfig cfg{g};
    BlockGrid grid = cj::extract_block_grid(img, cfg);
    uint32_t gw = grid.width_blocks, gh = grid.height_blocks;
    uint32_t i1 = rand_in(1, gh), i2 = rand_in(i1, gh);
    uint32_t j1 = rand_in(1, gw), j2 = rand_in(j1, gw);
    CropRect rect{i1, i2, j1, j2};

    cj::JpegImage cropped =
        cj::parse_jpeg(cj::serialize_jpeg(cj::lossless_crop(img, rect, cfg)));
    BlockGrid view = cj::cropped_grid_view(cropped, cfg, rect, w, h);
    if (view.context_digest != grid.context_digest) {
      std::printf("  trial %d: context digest diverged\n", trial);
      return false;
    }
    for (uint32_t i = i1; i <= i2; ++i)
      for (uint32_t j = j1; j <= j2; ++j)
        if (view.block_bytes(i, j) != grid.block_bytes(i, j)) {
          std::printf("  trial %d: cell (%u,%u) bytes diverged\n", trial, i, j);
          return false;
        }

    // a signed cropped file must decode in an independent decoder
    FullSignature full = sign_full(keypair(), grid, g_rng);
    cj::SignaturePayload payload =
        wrap(cj::SchemeId::croppable, cj::PayloadKind::cropped, g,
             cropped_body(w, h, crop_signature(full, rect).serialize()));
    Bytes signed_file = cj::serialize_jpeg(cj::embed_payload(cropped, payload));
    try {
      auto dec = testutil::libjpeg_decode(signed_file);
      if (dec.width != cropped.width || dec.height != cropped.height) return false;
    } catch (const std::exception& e) {
      std::printf("  trial %d: third-party decode failed: %s\n", trial, e.what());
      return false;
    }
  }
  return true;
}

// ------------------------------------------------------------- criterion 7

bool criterion7_crypto_properties() {
  using namespace bls;
  const G1Point& P = g1_generator();
  const G2Point& Q = g2_generator();
  const GtElement base = pairing(P, Q);
  const mpz_class& r = group_order();

  // encoding round trips
  for (int t = 0; t < 1000; ++t) {
    Scalar a = random_scalar(g_rng);
    auto s2 = Scalar::decode(a.encode());
    if (!s2 || !(*s2 == a)) return false;
    G1Point p = g1_scalar_mul(a, P);
    auto p2 = g1_decode(g1_encode(p));
    if (!p2 || !(*p2 == p)) return false;
    if (t % 10 == 0) {  // G2 ops are ~4x the cost; sample
      G2Point q = g2_scalar_mul(a, Q);
      auto q2 = g2_decode(g2_encode(q));
      if (!q2 || !(*q2 == q)) return false;
    }
  }

  // scalar distributivity: (a+b)P = aP + bP
  for (int t = 0; t < 1000; ++t) {
    Scalar a = random_scalar(g_rng), b = random_scalar(g_rng);
    if (!(g1_scalar_mul(a + b, P) == g1_add(g1_scalar_mul(a, P), g1_scalar_mul(b, P))))
      return false;
  }

  // aggregate equals naive sum (via crop_signature on random instances)
  for (int t = 0; t < 1000; ++t) {
    uint32_t w = rand_in(1, 3), h = rand_in(1, 3);
    BlockGrid g = make_grid(w, h, 4);
    FullSignature full;
    full.width_blocks = w;
    full.height_blocks = h;
    for (uint32_t k = 0; k < w * h; ++k)
      full.block_sigs.push_back(hash_to_g1(Bytes{'a'}, Bytes{uint8_t(t), uint8_t(k)}));
    full.outer_sig.bytes.assign(kOuterSignatureSize, 0);
    uint32_t i1 = rand_in(1, h), i2 = rand_in(i1, h);
    uint32_t j1 = rand_in(1, w), j2 = rand_in(j1, w);
    G1Point naive = G1Point::identity();
    for (uint32_t i = i1; i <= i2; ++i)
      for (uint32_t j = j1; j <= j2; ++j) naive = g1_add(naive, full.sig_at(i, j));
    if (!(crop_signature(full, {i1, i2, j1, j2}).aggregate == naive)) return false;
  }

  // bilinearity: e(aP, bQ) = e(P, Q)^(ab)
  for (int t = 0; t < 1000; ++t) {
    Scalar a = random_scalar(g_rng), b = random_scalar(g_rng);
    GtElement lhs = pairing(g1_scalar_mul(a, P), g2_scalar_mul(b, Q));
    GtElement rhs = base.pow(a.v * b.v % r);
    if (!(lhs == rhs)) return false;
  }
  return true;
}

// ------------------------------------------------------------- criterion 8

bool criterion8_two_pairings() {
  BlockGrid g = make_grid(3, 3);
  FullSignature full = sign_full(keypair(), g, g_rng);
  for (CropRect r : {CropRect{1, 1, 1, 1}, {1, 2, 1, 2}, {1, 3, 1, 3}}) {
    CroppedSignature c = crop_signature(full, r);
    bls::reset_pairing_call_count();
    if (!verify_cropped(keypair().public_key, c, g)) return false;
    if (bls::pairing_call_count() != 2) {
      std::printf("  rect of %llu cells used %llu pairings\n",
                  (unsigned long long)r.cell_count(),
                  (unsigned long long)bls::pairing_call_count());
      return false;
    }
  }
  return true;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    bool (*fn)();
  };
  Criterion criteria[] = {
      {"1 correctness: sign->crop->verify on grids to 8x8 + all 4x4 rects, <60s",
       criterion1_correctness},
      {"2 tamper: every single-bit flip rejected, zero false accepts",
       criterion2_tamper},
      {"3 sizes: croppable cropped constant; baseline affine in cells",
       criterion3_constant_size},
      {"4 trend: croppable < baseline at g=1..3; gap monotone; <1% at g=6",
       criterion4_size_trend},
      {"5 analytical croppable full payload size formula exact",
       criterion5_analytical_size},
      {"6 lossless crop: cell bytes stable; third-party decode ok (20 images)",
       criterion6_lossless_crop},
      {"7 crypto properties: >=1000 exact trials each", criterion7_crypto_properties},
      {"8 verify_cropped uses exactly 2 pairings", criterion8_two_pairings},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    bool ok = false;
    try {
      ok = c.fn();
    } catch (const std::exception& e) {
      std::printf("  exception: %s\n", e.what());
    }
    std::printf("%s criterion %s\n", ok ? "PASS" : "FAIL", c.name);
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
