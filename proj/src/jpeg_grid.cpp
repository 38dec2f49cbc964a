#include "cropsig/jpeg.hpp"

namespace cropsig::jpeg {

namespace {

constexpr std::string_view kContextTag = "cropsig:jpeg-context:v1";

uint32_t ceil_div(uint32_t a, uint32_t b) { return (a + b - 1) / b; }

// Everything cell serialization needs, detached from the JpegImage so the
// returned BlockGrid owns its data.
struct GridData {
  uint32_t mcus_x = 0, mcus_y = 0;
  uint32_t g = 1;
  std::vector<std::pair<uint8_t, uint8_t>> hv;  // blocks per MCU, per component
  std::vector<ComponentCoeffs> coeffs;
};

std::shared_ptr<GridData> snapshot(const JpegImage& img, const GranularityConfig& cfg) {
  auto d = std::make_shared<GridData>();
  d->mcus_x = img.mcus_per_row();
  d->mcus_y = img.mcus_per_col();
  d->g = cfg.g;
  for (size_t c = 0; c < img.components.size(); ++c)
    d->hv.emplace_back(img.comp_h(c), img.comp_v(c));
  d->coeffs = img.coeffs;
  return d;
}

// Canonical cell serialization: covered MCUs in raster order; within an
// MCU, components in frame order, blocks row-major; coefficients as 64
// big-endian i16 in zigzag order with absolute DC.
Bytes cell_bytes(const GridData& d, uint32_t cell_row, uint32_t cell_col) {
  uint32_t mx1 = (cell_col - 1) * d.g;
  uint32_t mx2 = std::min(cell_col * d.g, d.mcus_x);  // exclusive
  uint32_t my1 = (cell_row - 1) * d.g;
  uint32_t my2 = std::min(cell_row * d.g, d.mcus_y);
  Bytes out;
  for (uint32_t my = my1; my < my2; ++my)
    for (uint32_t mx = mx1; mx < mx2; ++mx)
      for (size_t c = 0; c < d.coeffs.size(); ++c) {
        auto [bh, bv] = d.hv[c];
        for (uint8_t by = 0; by < bv; ++by)
          for (uint8_t bx = 0; bx < bh; ++bx) {
            const CoeffBlock& blk = d.coeffs[c].at(mx * bh + bx, my * bv + by);
            for (int k = 0; k < 64; ++k) put_u16be(out, uint16_t(blk[k]));
          }
      }
  return out;
}

void check_granularity(const GranularityConfig& cfg) {
  if (cfg.g == 0) throw std::invalid_argument("granularity must be positive");
}

}  // namespace

uint32_t grid_width_cells(const JpegImage& img, const GranularityConfig& cfg) {
  check_granularity(cfg);
  return ceil_div(img.mcus_per_row(), cfg.g);
}

uint32_t grid_height_cells(const JpegImage& img, const GranularityConfig& cfg) {
  check_granularity(cfg);
  return ceil_div(img.mcus_per_col(), cfg.g);
}

Digest32 context_digest_with_dims(const JpegImage& img, const GranularityConfig& cfg,
                                  uint32_t px_w, uint32_t px_h) {
  check_granularity(cfg);
  Bytes m;
  append(m, kContextTag);
  put_u32be(m, px_w);
  put_u32be(m, px_h);
  m.push_back(img.precision);
  m.push_back(uint8_t(img.components.size()));
  for (const auto& c : img.components) {
    m.push_back(c.id);
    m.push_back(c.h);
    m.push_back(c.v);
    m.push_back(c.tq);
  }
  for (uint8_t idx = 0; idx < 4; ++idx) {
    if (!img.qtables[idx]) continue;
    m.push_back(idx);
    m.push_back(img.qtables[idx]->precision);
    for (int k = 0; k < 64; ++k) put_u16be(m, img.qtables[idx]->q[k]);
  }
  put_u16be(m, uint16_t(cfg.g));
  return sha256(m);
}

Digest32 context_digest(const JpegImage& img, const GranularityConfig& cfg) {
  return context_digest_with_dims(img, cfg, img.width, img.height);
}

BlockGrid extract_block_grid(const JpegImage& img, const GranularityConfig& cfg) {
  check_granularity(cfg);
  auto data = snapshot(img, cfg);
  BlockGrid grid;
  grid.width_blocks = grid_width_cells(img, cfg);
  grid.height_blocks = grid_height_cells(img, cfg);
  grid.context_digest = context_digest(img, cfg);
  uint32_t w = grid.width_blocks, h = grid.height_blocks;
  grid.block_bytes = [data, w, h](uint32_t i, uint32_t j) {
    if (i < 1 || i > h || j < 1 || j > w)
      throw std::out_of_range("cell index outside grid");
    return cell_bytes(*data, i, j);
  };
  return grid;
}

BlockGrid cropped_grid_view(const JpegImage& cropped, const GranularityConfig& cfg,
                            const CropRect& rect, uint32_t orig_px_w,
                            uint32_t orig_px_h) {
  check_granularity(cfg);
  uint32_t mcu_w = cropped.mcu_width_px();
  uint32_t mcu_h = cropped.mcu_height_px();
  uint32_t orig_mcus_x = ceil_div(orig_px_w, mcu_w);
  uint32_t orig_mcus_y = ceil_div(orig_px_h, mcu_h);
  uint32_t grid_w = ceil_div(orig_mcus_x, cfg.g);
  uint32_t grid_h = ceil_div(orig_mcus_y, cfg.g);
  if (!rect.valid_within(grid_w, grid_h))
    throw std::invalid_argument("crop rect outside the claimed original grid");

  // Covered MCU range in the original.
  uint32_t mx1 = (rect.j1 - 1) * cfg.g;
  uint32_t mx2 = std::min(rect.j2 * cfg.g, orig_mcus_x);
  uint32_t my1 = (rect.i1 - 1) * cfg.g;
  uint32_t my2 = std::min(rect.i2 * cfg.g, orig_mcus_y);

  // The cropped file must be exactly that region: same MCU counts, and the
  // pixel dimensions a lossless crop of the claimed original would have.
  uint32_t want_w = mx2 == orig_mcus_x ? orig_px_w - mx1 * mcu_w : (mx2 - mx1) * mcu_w;
  uint32_t want_h = my2 == orig_mcus_y ? orig_px_h - my1 * mcu_h : (my2 - my1) * mcu_h;
  if (cropped.mcus_per_row() != mx2 - mx1 || cropped.mcus_per_col() != my2 - my1 ||
      cropped.width != want_w || cropped.height != want_h)
    throw std::invalid_argument("cropped geometry does not match rect and original dims");

  auto data = snapshot(cropped, cfg);
  BlockGrid grid;
  grid.width_blocks = grid_w;
  grid.height_blocks = grid_h;
  grid.context_digest = context_digest_with_dims(cropped, cfg, orig_px_w, orig_px_h);
  grid.block_bytes = [data, rect](uint32_t i, uint32_t j) {
    if (!rect.contains(i, j))
      throw std::out_of_range("cell not covered by the cropped region");
    return cell_bytes(*data, i - rect.i1 + 1, j - rect.j1 + 1);
  };
  return grid;
}

}  // namespace cropsig::jpeg
