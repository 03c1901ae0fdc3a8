#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "toolsight/errors.hpp"

namespace toolsight {

/// 8-bit RGB color. Hex form is uppercase "#RRGGBB" and round-trips losslessly.
struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    bool operator==(const Rgb&) const = default;

    std::string to_hex() const;
    static Rgb from_hex(const std::string& hex);  // throws InvalidArgsError
};

/// Integer pixel coordinate, origin top-left, x rightward, y downward.
struct Point {
    int x = 0;
    int y = 0;
    bool operator==(const Point&) const = default;
};

/// Half-open rectangle: [x0,x1) x [y0,y1).
struct Rect {
    int x0 = 0;
    int y0 = 0;
    int x1 = 0;
    int y1 = 0;

    bool operator==(const Rect&) const = default;
    int width() const { return x1 - x0; }
    int height() const { return y1 - y0; }
};

/// Immutable-by-convention row-major RGB raster. Tools copy, never mutate
/// registered rasters; Raster itself is a plain value type.
class Raster {
public:
    Raster() = default;
    Raster(int width, int height, Rgb fill = {255, 255, 255});
    Raster(int width, int height, std::vector<std::uint8_t> rgb_bytes);

    int width() const { return width_; }
    int height() const { return height_; }

    bool in_bounds(int x, int y) const {
        return x >= 0 && x < width_ && y >= 0 && y < height_;
    }

    Rgb at(int x, int y) const {
        const std::size_t i = idx(x, y);
        return {pixels_[i], pixels_[i + 1], pixels_[i + 2]};
    }

    void set(int x, int y, Rgb c) {
        const std::size_t i = idx(x, y);
        pixels_[i] = c.r;
        pixels_[i + 1] = c.g;
        pixels_[i + 2] = c.b;
    }

    /// Like set() but silently ignores out-of-bounds coordinates.
    void set_clipped(int x, int y, Rgb c) {
        if (in_bounds(x, y)) set(x, y, c);
    }

    /// Clamp-to-edge read.
    Rgb at_clamped(int x, int y) const {
        if (x < 0) x = 0;
        if (x >= width_) x = width_ - 1;
        if (y < 0) y = 0;
        if (y >= height_) y = height_ - 1;
        return at(x, y);
    }

    const std::vector<std::uint8_t>& bytes() const { return pixels_; }

    bool operator==(const Raster&) const = default;

    Raster transposed() const;

private:
    std::size_t idx(int x, int y) const {
        return (static_cast<std::size_t>(y) * width_ + x) * 3;
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> pixels_;
};

/// SHA-256 over width||height||pixel bytes, lowercase hex. Internal
/// immutability fingerprint; never serialized into results.
std::string content_hash(const Raster& r);

/// SHA-256 of an arbitrary byte string, lowercase hex.
std::string sha256_hex(const std::string& data);

}  // namespace toolsight
