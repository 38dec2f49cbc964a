#include <map>

#include "cropsig/jpeg.hpp"

namespace cropsig::jpeg {

namespace {

constexpr std::string_view kMagic = "CRSIGJPG";
constexpr std::string_view kChunkMagic = "CRSG";
constexpr uint8_t kCOM = 0xFE;
constexpr size_t kMaxComPayload = 65533;  // 65535 minus the length field
constexpr size_t kChunkHeader = 6;        // "CRSG" + index + total
constexpr size_t kChunkData = kMaxComPayload - kChunkHeader;

bool is_chunk(const Segment& seg) {
  return seg.marker == kCOM && seg.payload.size() >= kChunkHeader &&
         std::equal(kChunkMagic.begin(), kChunkMagic.end(), seg.payload.begin());
}

}  // namespace

Bytes SignaturePayload::serialize() const {
  Bytes out;
  append(out, kMagic);
  out.push_back(version);
  out.push_back(uint8_t(scheme));
  out.push_back(uint8_t(kind));
  out.push_back(suite_id);
  put_u16be(out, granularity);
  put_u32be(out, uint32_t(body.size()));
  append(out, body);
  put_u16be(out, uint16_t(certificate.size()));
  append(out, certificate);
  return out;
}

SignaturePayload SignaturePayload::parse(std::span<const uint8_t> in) {
  if (in.size() < kMagic.size() + 10 + 2) throw PayloadError("payload truncated");
  if (!std::equal(kMagic.begin(), kMagic.end(), in.begin()))
    throw PayloadError("bad payload magic");
  SignaturePayload p;
  size_t pos = kMagic.size();
  p.version = in[pos++];
  if (p.version != 0x01) throw PayloadError("unsupported payload version");
  uint8_t scheme = in[pos++];
  if (scheme != uint8_t(SchemeId::croppable) && scheme != uint8_t(SchemeId::baseline))
    throw PayloadError("unknown scheme id");
  p.scheme = SchemeId(scheme);
  uint8_t kind = in[pos++];
  if (kind != uint8_t(PayloadKind::full) && kind != uint8_t(PayloadKind::cropped))
    throw PayloadError("unknown payload kind");
  p.kind = PayloadKind(kind);
  p.suite_id = in[pos++];
  p.granularity = get_u16be(in.data() + pos);
  pos += 2;
  if (p.granularity == 0) throw PayloadError("zero granularity");
  uint32_t body_len = get_u32be(in.data() + pos);
  pos += 4;
  if (in.size() - pos < size_t(body_len) + 2) throw PayloadError("payload truncated");
  p.body.assign(in.begin() + pos, in.begin() + pos + body_len);
  pos += body_len;
  uint16_t cert_len = get_u16be(in.data() + pos);
  pos += 2;
  if (in.size() - pos != cert_len) throw PayloadError("payload length mismatch");
  p.certificate.assign(in.begin() + pos, in.end());
  return p;
}

size_t payload_chunk_count(size_t payload_size) {
  return payload_size == 0 ? 1 : (payload_size + kChunkData - 1) / kChunkData;
}

JpegImage embed_payload(const JpegImage& img, const SignaturePayload& payload) {
  for (const auto& seg : img.segments)
    if (is_chunk(seg)) throw PayloadError("image already carries a signature payload");

  Bytes flat = payload.serialize();
  size_t total = payload_chunk_count(flat.size());
  if (total > 255) throw PayloadError("payload too large for chunk addressing");

  std::vector<Segment> chunks;
  for (size_t idx = 0; idx < total; ++idx) {
    size_t off = idx * kChunkData;
    size_t len = std::min(kChunkData, flat.size() - off);
    Segment seg;
    seg.marker = kCOM;
    append(seg.payload, kChunkMagic);
    seg.payload.push_back(uint8_t(idx));
    seg.payload.push_back(uint8_t(total));
    seg.payload.insert(seg.payload.end(), flat.begin() + off, flat.begin() + off + len);
    chunks.push_back(std::move(seg));
  }

  JpegImage out = img;
  // Insert after the leading run of APPn segments so JFIF/Exif stay first.
  size_t insert_at = 0;
  while (insert_at < out.segments.size() &&
         out.segments[insert_at].marker >= 0xE0 && out.segments[insert_at].marker <= 0xEF)
    ++insert_at;
  out.segments.insert(out.segments.begin() + insert_at,
                      std::make_move_iterator(chunks.begin()),
                      std::make_move_iterator(chunks.end()));
  return out;
}

std::optional<SignaturePayload> extract_payload(const JpegImage& img) {
  std::map<uint8_t, const Segment*> found;
  std::optional<uint8_t> total;
  for (const auto& seg : img.segments) {
    if (!is_chunk(seg)) continue;
    uint8_t idx = seg.payload[4];
    uint8_t tot = seg.payload[5];
    if (tot == 0 || idx >= tot) throw PayloadError("invalid chunk header");
    if (total && *total != tot)
      throw PayloadError("chunks from multiple payloads present");
    total = tot;
    if (!found.emplace(idx, &seg).second) throw PayloadError("duplicate payload chunk");
  }
  if (!total) return std::nullopt;
  if (found.size() != *total) throw PayloadError("missing payload chunk");
  Bytes flat;
  for (auto& [idx, seg] : found)
    flat.insert(flat.end(), seg->payload.begin() + kChunkHeader, seg->payload.end());
  return SignaturePayload::parse(flat);
}

JpegImage strip_payload(const JpegImage& img) {
  JpegImage out = img;
  std::erase_if(out.segments, [](const Segment& s) { return is_chunk(s); });
  return out;
}

}  // namespace cropsig::jpeg
