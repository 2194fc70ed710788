#pragma once

#include "bp/jpegtools.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace bp {

/// Decoded 8-bit RGB image, row-major, 3 bytes per pixel.
struct RawImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;

    std::size_t expected_bytes() const {
        return static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3;
    }
};

/// An application/comment segment captured during decode so re-encoding can
/// carry it over. marker is the raw code (0xE1..0xEF for APP1..15, 0xFE COM).
struct MarkerSegment {
    std::uint8_t marker = 0;
    std::vector<std::uint8_t> payload;
};

struct DecodedJpeg {
    RawImage image;
    std::vector<MarkerSegment> app_markers;
};

/// Decodes JPEG bytes to RGB, capturing APP1..APP15 and COM segments.
/// Throws DecodeError when the bytes are not a decodable JPEG.
DecodedJpeg decode_jpeg(std::span<const std::uint8_t> jpeg);

/// Baseline-encodes an RGB image with the two quantization tables written
/// into the DQT segments verbatim (luminance as table 0, chrominance as
/// table 1, values in natural order, each in [1, 255]). Markers, when
/// given, are re-emitted after the JFIF header. Output is deterministic
/// for equal inputs.
std::vector<std::uint8_t> encode_jpeg(const RawImage& image,
                                      const QuantValues& luminance,
                                      const QuantValues& chrominance,
                                      const std::vector<MarkerSegment>& markers = {});

/// Separable bilinear downscale so that max(width, height) == max_dimension,
/// preserving aspect ratio (dimensions rounded, floor 1 px). Images already
/// within the bound are returned unchanged. Never upscales.
RawImage resize_to_max_dimension(const RawImage& image, int max_dimension);

} // namespace bp
