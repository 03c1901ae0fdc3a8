#include "toolsight/raster.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>

namespace toolsight {

std::string Rgb::to_hex() const {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02X%02X%02X", r, g, b);
    return buf;
}

Rgb Rgb::from_hex(const std::string& hex) {
    auto nibble = [&](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw InvalidArgsError("bad hex color: " + hex);
    };
    if (hex.size() != 7 || hex[0] != '#')
        throw InvalidArgsError("bad hex color: " + hex);
    auto byte = [&](int i) {
        return static_cast<std::uint8_t>(nibble(hex[i]) * 16 + nibble(hex[i + 1]));
    };
    return {byte(1), byte(3), byte(5)};
}

Raster::Raster(int width, int height, Rgb fill) : width_(width), height_(height) {
    if (width <= 0 || height <= 0)
        throw InvalidRasterError("raster dimensions must be positive");
    pixels_.resize(static_cast<std::size_t>(width) * height * 3);
    for (std::size_t i = 0; i < pixels_.size(); i += 3) {
        pixels_[i] = fill.r;
        pixels_[i + 1] = fill.g;
        pixels_[i + 2] = fill.b;
    }
}

Raster::Raster(int width, int height, std::vector<std::uint8_t> rgb_bytes)
    : width_(width), height_(height), pixels_(std::move(rgb_bytes)) {
    if (width <= 0 || height <= 0)
        throw InvalidRasterError("raster dimensions must be positive");
    if (pixels_.size() != static_cast<std::size_t>(width) * height * 3)
        throw InvalidRasterError("pixel buffer size does not match dimensions");
}

Raster Raster::transposed() const {
    Raster out(height_, width_);
    for (int y = 0; y < height_; ++y)
        for (int x = 0; x < width_; ++x) out.set(y, x, at(x, y));
    return out;
}

namespace {

std::string digest_hex(const unsigned char* data, std::size_t len) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int md_len = 0;
    EVP_Digest(data, len, md.data(), &md_len, EVP_sha256(), nullptr);
    static const char* k = "0123456789abcdef";
    std::string hex;
    hex.reserve(md_len * 2);
    for (unsigned int i = 0; i < md_len; ++i) {
        hex.push_back(k[md[i] >> 4]);
        hex.push_back(k[md[i] & 0xF]);
    }
    return hex;
}

}  // namespace

std::string content_hash(const Raster& r) {
    std::vector<std::uint8_t> buf;
    buf.reserve(8 + r.bytes().size());
    auto push_u32 = [&](std::uint32_t v) {
        for (int i = 0; i < 4; ++i) buf.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    };
    push_u32(static_cast<std::uint32_t>(r.width()));
    push_u32(static_cast<std::uint32_t>(r.height()));
    buf.insert(buf.end(), r.bytes().begin(), r.bytes().end());
    return digest_hex(buf.data(), buf.size());
}

std::string sha256_hex(const std::string& data) {
    return digest_hex(reinterpret_cast<const unsigned char*>(data.data()), data.size());
}

}  // namespace toolsight
