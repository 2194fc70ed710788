#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace bp {

/// 64 quantization coefficients in natural (raster) order.
using QuantValues = std::array<std::uint16_t, 64>;

struct QuantTable {
    int table_id = 0;       // 0..3
    int precision_bits = 8; // 8 or 16; 8-bit implies all values <= 255
    QuantValues values{};   // natural order, each in [1, 65535]

    friend bool operator==(const QuantTable&, const QuantTable&) = default;
};

/// Shallow Exif probe: presence plus the handful of fields the job map
/// records. present == false implies every other field is empty/zero.
struct ExifSummary {
    bool present = false;
    std::uint32_t byte_length = 0; // APP1 payload size when present
    std::optional<int> orientation; // 1..8
    std::optional<std::string> datetime_original;
    std::optional<std::string> make_model;

    friend bool operator==(const ExifSummary&, const ExifSummary&) = default;
};

/// ITU-T T.81 Annex K reference quantization tables, natural order.
const QuantValues& annex_k_luminance();
const QuantValues& annex_k_chrominance();

/// Maps a DQT stream position (zigzag order) to its natural-order index.
const std::array<int, 64>& zigzag_to_natural();

/// Reorders a natural-order table into zigzag stream order and back.
QuantValues to_zigzag_order(const QuantValues& natural);
QuantValues from_zigzag_order(const QuantValues& zigzag);

/// Walks the marker segments of a JPEG byte stream and returns every
/// quantization table found before SOS, de-zigzagged to natural order, in
/// file order. Throws MalformedJpeg on broken framing and NoTables when no
/// DQT segment precedes the scan data. Never reads past a declared segment
/// length.
std::vector<QuantTable> extract_quant_tables(std::span<const std::uint8_t> jpeg);

/// IJG quality scaling: scale = quality < 50 ? 5000/quality : 200 - 2*quality
/// (integer); each output = clamp(floor((base*scale + 50) / 100), 1, 255).
/// Quality must be in [1, 100] (DomainError otherwise).
QuantValues scale_quant_table(const QuantValues& base, int quality);

/// Presence plus IFD0 orientation/make/model and Exif-IFD original datetime.
/// Unreadable tag structures degrade to present=true with empty optionals;
/// MalformedJpeg is reserved for broken marker framing.
ExifSummary exif_summary(std::span<const std::uint8_t> jpeg);

/// (width, height) from the first SOF segment. Throws MalformedJpeg when
/// none exists.
std::pair<int, int> jpeg_dimensions(std::span<const std::uint8_t> jpeg);

/// SHA-256 of the raw file bytes, lowercase hex, 64 chars. Throws IoError.
std::string file_digest(const std::filesystem::path& path);

/// SHA-256 of a byte span, lowercase hex.
std::string sha256_hex(std::span<const std::uint8_t> bytes);

} // namespace bp
