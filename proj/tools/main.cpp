// cropsig: sign JPEG images with croppable signatures, crop them without
// breaking the signature, and verify the result.
//
// Exit codes: 0 success / verified, 1 verification failed, 2 usage or
// format error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cropsig/baseline.hpp"
#include "cropsig/jpeg.hpp"
#include "cropsig/scheme.hpp"

using namespace cropsig;
namespace cj = cropsig::jpeg;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fingerprint(std::span<const uint8_t> pk) {
  Digest32 d = sha256(pk);
  return to_hex(std::span(d).first(8));
}

OuterKeyPair load_secret_key(const std::string& path) {
  Bytes sk = read_file(path);
  if (sk.size() != kOuterSecretKeySize)
    throw UsageError("secret key file must be exactly 64 bytes: " + path);
  OuterKeyPair kp;
  kp.private_key = sk;
  kp.public_key.assign(sk.begin() + 32, sk.end());
  return kp;
}

Bytes load_public_key(const std::string& path) {
  Bytes pk = read_file(path);
  if (pk.size() != kOuterPublicKeySize)
    throw UsageError("public key file must be exactly 32 bytes: " + path);
  return pk;
}

cj::JpegImage load_jpeg(const std::string& path) {
  try {
    return cj::parse_jpeg(read_file(path));
  } catch (const cj::ParseError& e) {
    throw UsageError(path + ": malformed JPEG: " + e.what());
  } catch (const cj::UnsupportedFormat& e) {
    throw UsageError(path + ": unsupported JPEG: " + e.what());
  }
}

std::unique_ptr<EntropySource> make_entropy(std::optional<uint64_t> insecure_seed) {
  if (insecure_seed) {
    std::cerr << "warning: deterministic entropy seed in use; "
                 "for benchmarks and tests only\n";
    return std::make_unique<DeterministicEntropy>(*insecure_seed);
  }
  return std::make_unique<SystemEntropy>();
}

CropRect parse_rect(const std::string& spec) {
  CropRect r;
  char c1, c2, c3;
  std::istringstream in(spec);
  if (!(in >> r.i1 >> c1 >> r.i2 >> c2 >> r.j1 >> c3 >> r.j2) || c1 != ',' ||
      c2 != ',' || c3 != ',' || !in.eof())
    throw UsageError("--rect expects i1,i2,j1,j2 (1-based inclusive cell rows/cols)");
  return r;
}

// Cropped payload bodies carry the original pixel dimensions ahead of the
// serialized signature so the verifier can rebuild the context digest.
Bytes cropped_body(uint32_t orig_w, uint32_t orig_h, const Bytes& sig) {
  Bytes body;
  put_u32be(body, orig_w);
  put_u32be(body, orig_h);
  append(body, sig);
  return body;
}

// ------------------------------------------------------------------ keygen

int cmd_keygen(const std::string& out_prefix, std::optional<uint64_t> seed) {
  auto entropy = make_entropy(seed);
  OuterKeyPair kp = outer_keygen(*entropy);
  write_file(out_prefix + ".sec", kp.private_key);
  write_file(out_prefix + ".pub", kp.public_key);
  std::cout << "public key:  " << to_hex(kp.public_key) << "\n"
            << "fingerprint: " << fingerprint(kp.public_key) << "\n"
            << "wrote " << out_prefix << ".sec and " << out_prefix << ".pub\n";
  return kExitOk;
}

// -------------------------------------------------------------------- sign

int cmd_sign(const std::string& key_path, const std::string& in_path,
             const std::string& out_path, uint32_t g, const std::string& scheme,
             const std::string& cert_path, std::optional<uint64_t> seed) {
  if (g == 0) throw UsageError("--granularity must be at least 1");
  OuterKeyPair kp = load_secret_key(key_path);
  cj::JpegImage img = load_jpeg(in_path);
  if (cj::extract_payload(img))
    throw UsageError(in_path + ": already carries a signature payload");

  auto entropy = make_entropy(seed);
  cj::GranularityConfig cfg{g};
  BlockGrid grid = cj::extract_block_grid(img, cfg);

  cj::SignaturePayload payload;
  payload.kind = cj::PayloadKind::full;
  payload.granularity = uint16_t(g);
  if (!cert_path.empty()) payload.certificate = read_file(cert_path);
  if (scheme == "croppable") {
    payload.scheme = cj::SchemeId::croppable;
    payload.body = sign_full(kp, grid, *entropy).serialize();
  } else if (scheme == "baseline") {
    payload.scheme = cj::SchemeId::baseline;
    payload.body = baseline_sign_full(kp, grid, *entropy).serialize();
  } else {
    throw UsageError("--scheme must be croppable or baseline");
  }

  write_file(out_path, cj::serialize_jpeg(cj::embed_payload(img, payload)));
  std::cout << "signed " << in_path << " -> " << out_path << " (scheme " << scheme
            << ", g=" << g << ", grid " << grid.width_blocks << "x"
            << grid.height_blocks << ", payload " << payload.serialize().size()
            << " bytes)\n";
  return kExitOk;
}

// -------------------------------------------------------------------- crop

int cmd_crop(const std::string& in_path, const std::string& out_path,
             const std::string& rect_spec) {
  CropRect rect = parse_rect(rect_spec);
  cj::JpegImage img = load_jpeg(in_path);
  std::optional<cj::SignaturePayload> payload;
  try {
    payload = cj::extract_payload(img);
  } catch (const cj::PayloadError& e) {
    throw UsageError(in_path + ": " + e.what());
  }
  if (!payload) throw UsageError(in_path + ": no signature payload to crop");
  if (payload->kind == cj::PayloadKind::cropped)
    throw UsageError(in_path + ": already cropped; serial cropping is unsupported");

  cj::GranularityConfig cfg{payload->granularity};
  cj::JpegImage stripped = cj::strip_payload(img);

  cj::SignaturePayload out_payload = *payload;
  out_payload.kind = cj::PayloadKind::cropped;
  try {
    if (payload->scheme == cj::SchemeId::croppable) {
      auto full = FullSignature::deserialize(payload->body);
      if (!full) throw UsageError(in_path + ": malformed full-signature body");
      CroppedSignature cs = crop_signature(*full, rect);
      out_payload.body = cropped_body(img.width, img.height, cs.serialize());
    } else {
      auto full = BaselineFullSignature::deserialize(payload->body);
      if (!full) throw UsageError(in_path + ": malformed full-signature body");
      BaselineCroppedSignature cs = baseline_crop(*full, rect);
      out_payload.body = cropped_body(img.width, img.height, cs.serialize());
    }
  } catch (const std::out_of_range&) {
    throw UsageError("--rect does not fit the signed grid");
  }

  cj::JpegImage cropped = cj::lossless_crop(stripped, rect, cfg);
  write_file(out_path, cj::serialize_jpeg(cj::embed_payload(cropped, out_payload)));
  std::cout << "cropped " << in_path << " -> " << out_path << " (cells " << rect.i1
            << "," << rect.i2 << "," << rect.j1 << "," << rect.j2 << "; "
            << cropped.width << "x" << cropped.height << " px; payload "
            << out_payload.serialize().size() << " bytes)\n";
  return kExitOk;
}

// ------------------------------------------------------------------ verify

struct VerifyOutcome {
  bool ok = false;
  std::string detail;  // failure reason or success report
};

VerifyOutcome verify_croppable(std::span<const uint8_t> pk,
                               const cj::SignaturePayload& payload,
                               const cj::JpegImage& img) {
  cj::GranularityConfig cfg{payload.granularity};
  if (payload.kind == cj::PayloadKind::full) {
    auto sig = FullSignature::deserialize(payload.body);
    if (!sig) return {false, "malformed payload: bad full-signature body"};
    BlockGrid grid = cj::extract_block_grid(img, cfg);
    if (sig->width_blocks != grid.width_blocks ||
        sig->height_blocks != grid.height_blocks)
      return {false, "grid dimension mismatch"};
    if (sig->context_digest != grid.context_digest)
      return {false, "context digest mismatch"};
    if (!outer_verify(pk, sig->outer_sig,
                      header_message(sig->suite_id, sig->width_blocks,
                                     sig->height_blocks,
                                     bls::g2_encode(sig->ephemeral_pk),
                                     sig->context_digest)))
      return {false, "outer signature failure"};
    if (!verify_full(pk, *sig, grid)) return {false, "block signature check failed"};
    std::ostringstream r;
    r << "scheme croppable, kind full, g=" << payload.granularity << ", grid "
      << grid.width_blocks << "x" << grid.height_blocks;
    return {true, r.str()};
  }

  if (payload.body.size() < 8) return {false, "malformed payload: truncated body"};
  uint32_t ow = get_u32be(payload.body.data());
  uint32_t oh = get_u32be(payload.body.data() + 4);
  auto sig = CroppedSignature::deserialize(
      std::span(payload.body).subspan(8));
  if (!sig) return {false, "malformed payload: bad cropped-signature body"};
  BlockGrid view;
  try {
    view = cj::cropped_grid_view(img, cfg, sig->rect, ow, oh);
  } catch (const std::invalid_argument& e) {
    return {false, std::string("geometry mismatch: ") + e.what()};
  }
  if (sig->width_blocks != view.width_blocks || sig->height_blocks != view.height_blocks)
    return {false, "grid dimension mismatch"};
  if (sig->context_digest != view.context_digest)
    return {false, "context digest mismatch"};
  if (!outer_verify(pk, sig->outer_sig,
                    header_message(sig->suite_id, sig->width_blocks, sig->height_blocks,
                                   bls::g2_encode(sig->ephemeral_pk),
                                   sig->context_digest)))
    return {false, "outer signature failure"};
  if (!verify_cropped(pk, *sig, view)) return {false, "aggregate check failed"};
  std::ostringstream r;
  r << "scheme croppable, kind cropped, g=" << payload.granularity << ", original grid "
    << view.width_blocks << "x" << view.height_blocks << " (" << ow << "x" << oh
    << " px), rect " << sig->rect.i1 << "," << sig->rect.i2 << "," << sig->rect.j1 << ","
    << sig->rect.j2;
  return {true, r.str()};
}

VerifyOutcome verify_baseline(std::span<const uint8_t> pk,
                              const cj::SignaturePayload& payload,
                              const cj::JpegImage& img) {
  cj::GranularityConfig cfg{payload.granularity};
  if (payload.kind == cj::PayloadKind::full) {
    auto sig = BaselineFullSignature::deserialize(payload.body);
    if (!sig) return {false, "malformed payload: bad full-signature body"};
    BlockGrid grid = cj::extract_block_grid(img, cfg);
    if (sig->width_blocks != grid.width_blocks ||
        sig->height_blocks != grid.height_blocks)
      return {false, "grid dimension mismatch"};
    if (sig->context_digest != grid.context_digest)
      return {false, "context digest mismatch"};
    if (!outer_verify(pk, sig->outer_sig,
                      header_message(kSuiteBls12381Ed25519, sig->width_blocks,
                                     sig->height_blocks, sig->image_id,
                                     sig->context_digest)))
      return {false, "outer signature failure"};
    if (!baseline_verify_full(pk, *sig, grid))
      return {false, "block signature check failed"};
    std::ostringstream r;
    r << "scheme baseline, kind full, g=" << payload.granularity << ", grid "
      << grid.width_blocks << "x" << grid.height_blocks;
    return {true, r.str()};
  }

  if (payload.body.size() < 8) return {false, "malformed payload: truncated body"};
  uint32_t ow = get_u32be(payload.body.data());
  uint32_t oh = get_u32be(payload.body.data() + 4);
  auto sig = BaselineCroppedSignature::deserialize(std::span(payload.body).subspan(8));
  if (!sig) return {false, "malformed payload: bad cropped-signature body"};
  BlockGrid view;
  try {
    view = cj::cropped_grid_view(img, cfg, sig->rect, ow, oh);
  } catch (const std::invalid_argument& e) {
    return {false, std::string("geometry mismatch: ") + e.what()};
  }
  if (sig->width_blocks != view.width_blocks || sig->height_blocks != view.height_blocks)
    return {false, "grid dimension mismatch"};
  if (sig->context_digest != view.context_digest)
    return {false, "context digest mismatch"};
  if (!outer_verify(pk, sig->outer_sig,
                    header_message(kSuiteBls12381Ed25519, sig->width_blocks,
                                   sig->height_blocks, sig->image_id,
                                   sig->context_digest)))
    return {false, "outer signature failure"};
  if (!baseline_verify(pk, *sig, view)) return {false, "block signature check failed"};
  std::ostringstream r;
  r << "scheme baseline, kind cropped, g=" << payload.granularity << ", original grid "
    << view.width_blocks << "x" << view.height_blocks << " (" << ow << "x" << oh
    << " px), rect " << sig->rect.i1 << "," << sig->rect.i2 << "," << sig->rect.j1 << ","
    << sig->rect.j2;
  return {true, r.str()};
}

int cmd_verify(const std::string& pk_path, const std::string& in_path) {
  Bytes pk = load_public_key(pk_path);
  cj::JpegImage img = load_jpeg(in_path);
  std::optional<cj::SignaturePayload> payload;
  try {
    payload = cj::extract_payload(img);
  } catch (const cj::PayloadError& e) {
    std::cout << "FAIL: malformed payload: " << e.what() << "\n";
    return kExitUsage;
  }
  if (!payload) {
    std::cout << "FAIL: no signature payload\n";
    return kExitUsage;
  }

  VerifyOutcome out = payload->scheme == cj::SchemeId::croppable
                          ? verify_croppable(pk, *payload, img)
                          : verify_baseline(pk, *payload, img);
  if (!out.ok) {
    std::cout << "FAIL: " << out.detail << "\n";
    return kExitVerifyFailed;
  }
  std::cout << "OK: " << out.detail << ", signer " << fingerprint(pk) << "\n";
  return kExitOk;
}

// ----------------------------------------------------------------- inspect

int cmd_inspect(const std::string& in_path) {
  cj::JpegImage img = load_jpeg(in_path);
  std::cout << in_path << ": " << img.width << "x" << img.height << " px, "
            << img.components.size() << " component(s), " << img.mcus_per_row() << "x"
            << img.mcus_per_col() << " MCUs\n";
  size_t chunks = 0;
  for (const auto& seg : img.segments)
    if (seg.marker == 0xFE && seg.payload.size() >= 4 &&
        std::equal(seg.payload.begin(), seg.payload.begin() + 4, "CRSG"))
      ++chunks;
  std::optional<cj::SignaturePayload> payload;
  try {
    payload = cj::extract_payload(img);
  } catch (const cj::PayloadError& e) {
    std::cout << "payload: malformed (" << e.what() << "), " << chunks << " chunk(s)\n";
    return kExitUsage;
  }
  if (!payload) {
    std::cout << "payload: none\n";
    return kExitOk;
  }
  std::cout << "payload: scheme="
            << (payload->scheme == cj::SchemeId::croppable ? "croppable" : "baseline")
            << " kind=" << (payload->kind == cj::PayloadKind::full ? "full" : "cropped")
            << " suite=" << int(payload->suite_id) << " g=" << payload->granularity
            << " body=" << payload->body.size() << "B cert="
            << payload->certificate.size() << "B chunks=" << chunks << "\n";
  if (payload->kind == cj::PayloadKind::cropped && payload->body.size() >= 8)
    std::cout << "original dimensions: " << get_u32be(payload->body.data()) << "x"
              << get_u32be(payload->body.data() + 4) << " px\n";
  return kExitOk;
}

// ------------------------------------------------------------------- bench

struct BenchRecord {
  std::string image;
  uint32_t px_w = 0, px_h = 0;
  size_t unsigned_bytes = 0;
  std::string scheme;
  uint32_t g = 0;
  std::string kind;
  size_t signed_bytes = 0;
  size_t payload_bytes = 0;
};

void write_csv(std::ostream& out, const std::vector<BenchRecord>& records) {
  out << "image,px_width,px_height,unsigned_bytes,scheme,g,kind,signed_bytes,"
         "payload_bytes\n";
  for (const auto& r : records)
    out << r.image << "," << r.px_w << "," << r.px_h << "," << r.unsigned_bytes << ","
        << r.scheme << "," << r.g << "," << r.kind << "," << r.signed_bytes << ","
        << r.payload_bytes << "\n";
}

struct BenchImage {
  std::string name;
  Bytes file;
};

BenchImage synthesize(const std::string& spec, uint64_t seed) {
  // WxH:quality, e.g. 1024x768:75
  uint32_t w = 0, h = 0;
  int q = 75;
  char x, colon;
  std::istringstream in(spec);
  if (!(in >> w >> x >> h) || x != 'x' || w == 0 || h == 0)
    throw UsageError("--synthesize expects WxH[:quality]");
  if (in >> colon) {
    if (colon != ':' || !(in >> q) || q < 1 || q > 100)
      throw UsageError("--synthesize expects WxH[:quality]");
  }
  cj::EncodeOptions opts;
  opts.quality = q;
  BenchImage img;
  img.name = "synth-" + std::to_string(w) + "x" + std::to_string(h) + "-q" +
             std::to_string(q);
  img.file = cj::encode_jpeg(w, h, cj::generate_test_rgb(w, h, seed), opts);
  return img;
}

int cmd_bench(const std::vector<std::string>& image_paths,
              const std::vector<std::string>& synth_specs, const std::string& gran_spec,
              const std::string& out_csv, uint64_t seed) {
  std::vector<uint32_t> grans;
  {
    std::istringstream in(gran_spec);
    std::string tok;
    while (std::getline(in, tok, ',')) {
      int g = std::stoi(tok);
      if (g < 1) throw UsageError("granularities must be >= 1");
      grans.push_back(uint32_t(g));
    }
    if (grans.empty()) throw UsageError("--granularities must name at least one value");
  }

  std::vector<BenchImage> images;
  uint64_t synth_seed = seed;
  for (const auto& spec : synth_specs) images.push_back(synthesize(spec, ++synth_seed));
  for (const auto& path : image_paths) images.push_back({path, read_file(path)});
  if (images.empty()) throw UsageError("no images: pass files or --synthesize");

  DeterministicEntropy entropy(seed);
  OuterKeyPair kp = outer_keygen(entropy);
  std::vector<BenchRecord> records;
  for (const auto& bench_img : images) {
    try {
      cj::JpegImage img = cj::parse_jpeg(bench_img.file);
      for (uint32_t g : grans) {
        cj::GranularityConfig cfg{g};
        BlockGrid grid = cj::extract_block_grid(img, cfg);
        uint32_t gw = grid.width_blocks, gh = grid.height_blocks;
        CropRect quarter{1, (gh + 1) / 2, 1, (gw + 1) / 2};  // top-left quarter

        for (const std::string& scheme : {"croppable", "baseline"}) {
          cj::SignaturePayload payload;
          payload.granularity = uint16_t(g);
          Bytes cropped_sig;
          if (scheme == "croppable") {
            payload.scheme = cj::SchemeId::croppable;
            FullSignature full = sign_full(kp, grid, entropy);
            payload.body = full.serialize();
            cropped_sig = crop_signature(full, quarter).serialize();
          } else {
            payload.scheme = cj::SchemeId::baseline;
            BaselineFullSignature full = baseline_sign_full(kp, grid, entropy);
            payload.body = full.serialize();
            cropped_sig = baseline_crop(full, quarter).serialize();
          }

          BenchRecord rec;
          rec.image = bench_img.name;
          rec.px_w = img.width;
          rec.px_h = img.height;
          rec.unsigned_bytes = bench_img.file.size();
          rec.scheme = scheme;
          rec.g = g;
          rec.kind = "full";
          rec.signed_bytes =
              cj::serialize_jpeg(cj::embed_payload(img, payload)).size();
          rec.payload_bytes = payload.serialize().size();
          records.push_back(rec);

          cj::SignaturePayload cp = payload;
          cp.kind = cj::PayloadKind::cropped;
          cp.body = cropped_body(img.width, img.height, cropped_sig);
          cj::JpegImage cropped = cj::lossless_crop(img, quarter, cfg);
          rec.kind = "cropped";
          Bytes cropped_signed = cj::serialize_jpeg(cj::embed_payload(cropped, cp));
          rec.signed_bytes = cropped_signed.size();
          rec.payload_bytes = cp.serialize().size();
          rec.unsigned_bytes = cj::serialize_jpeg(cropped).size();
          records.push_back(rec);
        }
      }
    } catch (const std::exception& e) {
      std::cerr << "bench: skipping " << bench_img.name << ": " << e.what() << "\n";
    }
  }

  if (out_csv == "-") {
    write_csv(std::cout, records);
  } else {
    std::ofstream out(out_csv);
    if (!out) throw UsageError("cannot write " + out_csv);
    write_csv(out, records);
    std::cout << "wrote " << records.size() << " records to " << out_csv << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"croppable JPEG signatures"};
  app.require_subcommand(1);

  std::optional<uint64_t> seed;

  auto* keygen = app.add_subcommand("keygen", "generate a signer keypair");
  std::string out_prefix;
  keygen->add_option("--out", out_prefix, "output path prefix")->required();
  keygen->add_option("--insecure-seed", seed,
                     "deterministic entropy seed (tests/benchmarks only)");

  auto* sign = app.add_subcommand("sign", "sign a JPEG");
  std::string key_path, in_path, out_path, scheme = "croppable", cert_path;
  uint32_t g = 1;
  sign->add_option("--key", key_path, "secret key file (.sec)")->required();
  sign->add_option("--in", in_path, "input JPEG")->required();
  sign->add_option("--out", out_path, "output signed JPEG")->required();
  sign->add_option("--granularity", g, "signature cell side in MCUs (default 1)");
  sign->add_option("--scheme", scheme, "croppable | baseline");
  sign->add_option("--cert", cert_path, "certificate blob to embed (opaque)");
  sign->add_option("--insecure-seed", seed,
                   "deterministic entropy seed (tests/benchmarks only)");

  auto* crop = app.add_subcommand("crop", "crop a signed JPEG");
  std::string rect_spec;
  crop->add_option("--in", in_path, "signed input JPEG")->required();
  crop->add_option("--out", out_path, "output cropped JPEG")->required();
  crop->add_option("--rect", rect_spec, "i1,i2,j1,j2 cell rectangle (1-based)")
      ->required();

  auto* verify = app.add_subcommand("verify", "verify a signed JPEG");
  std::string pk_path;
  verify->add_option("--pubkey", pk_path, "public key file (.pub)")->required();
  verify->add_option("--in", in_path, "signed JPEG")->required();

  auto* inspect = app.add_subcommand("inspect", "dump payload metadata");
  inspect->add_option("--in", in_path, "JPEG file")->required();

  auto* bench = app.add_subcommand("bench", "size benchmark, CSV output");
  std::vector<std::string> bench_images, synth_specs;
  std::string gran_spec = "1,2,3,4,5,6", csv_path = "-";
  uint64_t bench_seed = 1;
  bench->add_option("images", bench_images, "JPEG files to benchmark");
  bench->add_option("--synthesize", synth_specs, "generate WxH[:quality] test images");
  bench->add_option("--granularities", gran_spec, "comma-separated g values");
  bench->add_option("--out", csv_path, "CSV output path ('-' for stdout)");
  bench->add_option("--seed", bench_seed, "deterministic seed for keys and nonces");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*keygen) return cmd_keygen(out_prefix, seed);
    if (*sign) return cmd_sign(key_path, in_path, out_path, g, scheme, cert_path, seed);
    if (*crop) return cmd_crop(in_path, out_path, rect_spec);
    if (*verify) return cmd_verify(pk_path, in_path);
    if (*inspect) return cmd_inspect(in_path);
    if (*bench)
      return cmd_bench(bench_images, synth_specs, gran_spec, csv_path, bench_seed);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
