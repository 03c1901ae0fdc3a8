#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "toolsight/image_io.hpp"
#include "toolsight/raster.hpp"

using namespace toolsight;

TEST_CASE("hex color round trip") {
    CHECK(Rgb{0x8F, 0x8F, 0x8F}.to_hex() == "#8F8F8F");
    CHECK(Rgb{0, 0, 0}.to_hex() == "#000000");
    CHECK(Rgb{255, 0, 255}.to_hex() == "#FF00FF");
    CHECK(Rgb::from_hex("#8F8F8F") == Rgb{0x8F, 0x8F, 0x8F});
    CHECK(Rgb::from_hex("#909090") == Rgb{0x90, 0x90, 0x90});
    for (int v = 0; v < 256; v += 17) {
        const Rgb c{static_cast<std::uint8_t>(v), static_cast<std::uint8_t>(255 - v),
                    static_cast<std::uint8_t>(v / 2)};
        CHECK(Rgb::from_hex(c.to_hex()) == c);
    }
}

TEST_CASE("hex color rejects malformed input") {
    CHECK_THROWS_AS(Rgb::from_hex(""), InvalidArgsError);
    CHECK_THROWS_AS(Rgb::from_hex("8F8F8F"), InvalidArgsError);
    CHECK_THROWS_AS(Rgb::from_hex("#8F8F8"), InvalidArgsError);
    CHECK_THROWS_AS(Rgb::from_hex("#8F8F8G"), InvalidArgsError);
    CHECK_THROWS_AS(Rgb::from_hex("#8F8F8F00"), InvalidArgsError);
}

TEST_CASE("raster construction and access") {
    Raster r(4, 3, Rgb{1, 2, 3});
    CHECK(r.width() == 4);
    CHECK(r.height() == 3);
    CHECK(r.at(0, 0) == Rgb{1, 2, 3});
    r.set(2, 1, {9, 8, 7});
    CHECK(r.at(2, 1) == Rgb{9, 8, 7});
    CHECK(r.in_bounds(3, 2));
    CHECK_FALSE(r.in_bounds(4, 2));
    CHECK_FALSE(r.in_bounds(-1, 0));
}

TEST_CASE("degenerate dimensions are rejected") {
    CHECK_THROWS_AS(Raster(0, 5), InvalidRasterError);
    CHECK_THROWS_AS(Raster(5, 0), InvalidRasterError);
    CHECK_THROWS_AS(Raster(-1, 5), InvalidRasterError);
}

TEST_CASE("clamped reads clamp to edges") {
    Raster r(2, 2);
    r.set(0, 0, {10, 0, 0});
    r.set(1, 1, {0, 0, 20});
    CHECK(r.at_clamped(-5, -5) == r.at(0, 0));
    CHECK(r.at_clamped(100, 100) == r.at(1, 1));
}

TEST_CASE("transpose maps (x,y) to (y,x)") {
    Raster r(3, 2);
    for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 3; ++x)
            r.set(x, y, {static_cast<std::uint8_t>(10 * x + y), 0, 0});
    const Raster t = r.transposed();
    CHECK(t.width() == 2);
    CHECK(t.height() == 3);
    for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 3; ++x) CHECK(t.at(y, x) == r.at(x, y));
    CHECK(t.transposed() == r);
}

TEST_CASE("content hash is stable and pixel-sensitive") {
    Raster a(5, 5, Rgb{100, 100, 100});
    Raster b = a;
    CHECK(content_hash(a) == content_hash(b));
    b.set(3, 3, {101, 100, 100});
    CHECK(content_hash(a) != content_hash(b));
    // Same pixel bytes with different dimensions must hash differently.
    Raster c(25, 1, Rgb{100, 100, 100});
    CHECK(content_hash(a) != content_hash(c));
}

TEST_CASE("sha256 known answer") {
    CHECK(sha256_hex("") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("png round trip is lossless") {
    std::uint32_t state = 42;
    Raster r(17, 9);
    for (int y = 0; y < 9; ++y)
        for (int x = 0; x < 17; ++x) {
            state = state * 1664525u + 1013904223u;
            r.set(x, y, {static_cast<std::uint8_t>(state >> 8),
                         static_cast<std::uint8_t>(state >> 16),
                         static_cast<std::uint8_t>(state >> 24)});
        }
    CHECK(decode_png(encode_png(r)) == r);

    const std::string path =
        (std::filesystem::temp_directory_path() / "toolsight_png_roundtrip.png").string();
    write_png(r, path);
    CHECK(read_png(path) == r);
    std::remove(path.c_str());
}

TEST_CASE("png encoding is deterministic") {
    Raster r(8, 8, Rgb{7, 77, 177});
    CHECK(encode_png(r) == encode_png(r));
}

TEST_CASE("jpeg round trip preserves dimensions and near-constant fields") {
    Raster r(32, 32, Rgb{0x8F, 0x8F, 0x8F});
    const Raster back = decode_jpeg(encode_jpeg(r, 90));
    CHECK(back.width() == 32);
    CHECK(back.height() == 32);
    const Rgb c = back.at(16, 16);
    CHECK(std::abs(c.r - 0x8F) <= 2);
    CHECK(std::abs(c.g - 0x8F) <= 2);
    CHECK(std::abs(c.b - 0x8F) <= 2);
    CHECK_THROWS_AS(encode_jpeg(r, 0), InvalidArgsError);
    CHECK_THROWS_AS(encode_jpeg(r, 101), InvalidArgsError);
    CHECK_FALSE(jpeg_codec_id().empty());
}
