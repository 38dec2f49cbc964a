#include "cropsig/jpeg.hpp"

namespace cropsig::jpeg {

JpegImage lossless_crop(const JpegImage& img, const CropRect& cell_rect,
                        const GranularityConfig& cfg) {
  if (cfg.g == 0) throw std::invalid_argument("granularity must be positive");
  uint32_t grid_w = grid_width_cells(img, cfg);
  uint32_t grid_h = grid_height_cells(img, cfg);
  if (!cell_rect.valid_within(grid_w, grid_h))
    throw std::out_of_range("crop rect outside the cell grid");

  uint32_t mcus_x = img.mcus_per_row();
  uint32_t mcus_y = img.mcus_per_col();
  uint32_t mx1 = (cell_rect.j1 - 1) * cfg.g;
  uint32_t mx2 = std::min(cell_rect.j2 * cfg.g, mcus_x);  // exclusive
  uint32_t my1 = (cell_rect.i1 - 1) * cfg.g;
  uint32_t my2 = std::min(cell_rect.i2 * cfg.g, mcus_y);

  uint32_t mcu_w = img.mcu_width_px();
  uint32_t mcu_h = img.mcu_height_px();
  // A crop reaching the original's ragged right/bottom edge keeps the
  // partial last MCU's true pixel extent; everywhere else MCUs are whole.
  uint32_t new_w = mx2 == mcus_x ? img.width - mx1 * mcu_w : (mx2 - mx1) * mcu_w;
  uint32_t new_h = my2 == mcus_y ? img.height - my1 * mcu_h : (my2 - my1) * mcu_h;

  JpegImage out;
  out.width = uint16_t(new_w);
  out.height = uint16_t(new_h);
  out.precision = img.precision;
  out.components = img.components;
  out.qtables = img.qtables;

  out.coeffs.resize(img.components.size());
  for (size_t c = 0; c < img.components.size(); ++c) {
    uint8_t bh = img.comp_h(c), bv = img.comp_v(c);
    auto& cc = out.coeffs[c];
    cc.blocks_w = (mx2 - mx1) * bh;
    cc.blocks_h = (my2 - my1) * bv;
    cc.blocks.resize(size_t(cc.blocks_w) * cc.blocks_h);
    for (uint32_t by = 0; by < cc.blocks_h; ++by)
      for (uint32_t bx = 0; bx < cc.blocks_w; ++bx)
        cc.at(bx, by) = img.coeffs[c].at(mx1 * bh + bx, my1 * bv + by);
  }

  // Keep metadata segments; patch the frame header dimensions. DHT/DRI/SOS
  // are rebuilt by reencode_scan.
  for (const auto& seg : img.segments) {
    Segment copy = seg;
    if (copy.marker == 0xC0 && copy.payload.size() >= 5) {
      copy.payload[1] = uint8_t(new_h >> 8);
      copy.payload[2] = uint8_t(new_h);
      copy.payload[3] = uint8_t(new_w >> 8);
      copy.payload[4] = uint8_t(new_w);
    }
    out.segments.push_back(std::move(copy));
  }
  reencode_scan(out);
  return out;
}

}  // namespace cropsig::jpeg
