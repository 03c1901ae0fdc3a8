#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "toolsight/raster.hpp"

namespace toolsight {

std::vector<std::uint8_t> encode_png(const Raster& r);
Raster decode_png(const std::vector<std::uint8_t>& bytes);

void write_png(const Raster& r, const std::string& path);
Raster read_png(const std::string& path);

/// Baseline JPEG with the library's default 4:2:0 chroma subsampling.
/// quality in [1,100].
std::vector<std::uint8_t> encode_jpeg(const Raster& r, int quality);
Raster decode_jpeg(const std::vector<std::uint8_t>& bytes);

/// Codec identification string pinned into sweep report headers.
std::string jpeg_codec_id();

}  // namespace toolsight
