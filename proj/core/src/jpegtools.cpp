#include "bp/jpegtools.hpp"

#include "bp/errors.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstring>
#include <fstream>

namespace bp {

namespace {

// JPEG marker bytes (second byte after 0xFF).
constexpr std::uint8_t kSOI = 0xD8;
constexpr std::uint8_t kEOI = 0xD9;
constexpr std::uint8_t kSOS = 0xDA;
constexpr std::uint8_t kDQT = 0xDB;
constexpr std::uint8_t kAPP1 = 0xE1;
constexpr std::uint8_t kTEM = 0x01;

bool is_standalone(std::uint8_t marker) {
    // TEM and RSTn carry no length field.
    return marker == kTEM || (marker >= 0xD0 && marker <= 0xD7);
}

bool is_sof(std::uint8_t marker) {
    // SOF0..15 minus DHT (C4), DAC (CC) and JPG (C8).
    return marker >= 0xC0 && marker <= 0xCF && marker != 0xC4 &&
           marker != 0xC8 && marker != 0xCC;
}

std::uint16_t read_u16be(std::span<const std::uint8_t> bytes, std::size_t pos) {
    return static_cast<std::uint16_t>((bytes[pos] << 8) | bytes[pos + 1]);
}

// Calls visit(marker, payload) for every framed segment before SOS/EOI.
// Returns true when a SOS was reached (entropy-coded data follows).
template <typename Visitor>
bool walk_segments(std::span<const std::uint8_t> jpeg, Visitor&& visit) {
    if (jpeg.size() < 2 || jpeg[0] != 0xFF || jpeg[1] != kSOI) {
        throw MalformedJpeg("missing SOI marker");
    }
    std::size_t pos = 2;
    while (true) {
        if (pos + 2 > jpeg.size()) {
            throw MalformedJpeg("unexpected end of stream between segments");
        }
        if (jpeg[pos] != 0xFF) {
            throw MalformedJpeg("expected marker prefix 0xFF at offset " +
                                std::to_string(pos));
        }
        // Fill bytes: any number of 0xFF may pad a marker.
        while (pos < jpeg.size() && jpeg[pos] == 0xFF) {
            ++pos;
        }
        if (pos >= jpeg.size()) {
            throw MalformedJpeg("stream ends inside a marker");
        }
        const std::uint8_t marker = jpeg[pos++];
        if (marker == 0x00) {
            throw MalformedJpeg("stuffed byte outside entropy-coded data");
        }
        if (marker == kEOI) {
            return false;
        }
        if (marker == kSOI) {
            throw MalformedJpeg("unexpected second SOI");
        }
        if (is_standalone(marker)) {
            continue;
        }
        if (pos + 2 > jpeg.size()) {
            throw MalformedJpeg("truncated segment length");
        }
        const std::uint16_t length = read_u16be(jpeg, pos);
        if (length < 2 || pos + length > jpeg.size()) {
            throw MalformedJpeg("declared segment length exceeds stream");
        }
        const auto payload = jpeg.subspan(pos + 2, length - 2);
        visit(marker, payload);
        pos += length;
        if (marker == kSOS) {
            return true;
        }
    }
}

void parse_dqt_payload(std::span<const std::uint8_t> payload,
                       std::vector<QuantTable>& out) {
    std::size_t pos = 0;
    while (pos < payload.size()) {
        const std::uint8_t pq_tq = payload[pos++];
        const int precision = pq_tq >> 4;
        const int table_id = pq_tq & 0x0F;
        if (precision > 1) {
            throw MalformedJpeg("DQT precision nibble out of range");
        }
        if (table_id > 3) {
            throw MalformedJpeg("DQT table id out of range");
        }
        const std::size_t value_bytes = precision == 0 ? 64 : 128;
        if (pos + value_bytes > payload.size()) {
            throw MalformedJpeg("DQT segment shorter than its table");
        }
        QuantTable table;
        table.table_id = table_id;
        table.precision_bits = precision == 0 ? 8 : 16;
        const auto& order = zigzag_to_natural();
        for (int i = 0; i < 64; ++i) {
            std::uint16_t value;
            if (precision == 0) {
                value = payload[pos + static_cast<std::size_t>(i)];
            } else {
                value = read_u16be(payload, pos + static_cast<std::size_t>(2 * i));
            }
            if (value == 0) {
                throw MalformedJpeg("zero quantization coefficient");
            }
            table.values[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = value;
        }
        pos += value_bytes;
        out.push_back(std::move(table));
    }
}

} // namespace

const QuantValues& annex_k_luminance() {
    static const QuantValues table = {
        16,  11,  10,  16,  24,  40,  51,  61,
        12,  12,  14,  19,  26,  58,  60,  55,
        14,  13,  16,  24,  40,  57,  69,  56,
        14,  17,  22,  29,  51,  87,  80,  62,
        18,  22,  37,  56,  68,  109, 103, 77,
        24,  35,  55,  64,  81,  104, 113, 92,
        49,  64,  78,  87,  103, 121, 120, 101,
        72,  92,  95,  98,  112, 100, 103, 99,
    };
    return table;
}

const QuantValues& annex_k_chrominance() {
    static const QuantValues table = {
        17, 18, 24, 47, 99, 99, 99, 99,
        18, 21, 26, 66, 99, 99, 99, 99,
        24, 26, 56, 99, 99, 99, 99, 99,
        47, 66, 99, 99, 99, 99, 99, 99,
        99, 99, 99, 99, 99, 99, 99, 99,
        99, 99, 99, 99, 99, 99, 99, 99,
        99, 99, 99, 99, 99, 99, 99, 99,
        99, 99, 99, 99, 99, 99, 99, 99,
    };
    return table;
}

const std::array<int, 64>& zigzag_to_natural() {
    static const std::array<int, 64> order = {
        0,  1,  8,  16, 9,  2,  3,  10,
        17, 24, 32, 25, 18, 11, 4,  5,
        12, 19, 26, 33, 40, 48, 41, 34,
        27, 20, 13, 6,  7,  14, 21, 28,
        35, 42, 49, 56, 57, 50, 43, 36,
        29, 22, 15, 23, 30, 37, 44, 51,
        58, 59, 52, 45, 38, 31, 39, 46,
        53, 60, 61, 54, 47, 55, 62, 63,
    };
    return order;
}

QuantValues to_zigzag_order(const QuantValues& natural) {
    QuantValues out{};
    const auto& order = zigzag_to_natural();
    for (std::size_t i = 0; i < 64; ++i) {
        out[i] = natural[static_cast<std::size_t>(order[i])];
    }
    return out;
}

QuantValues from_zigzag_order(const QuantValues& zigzag) {
    QuantValues out{};
    const auto& order = zigzag_to_natural();
    for (std::size_t i = 0; i < 64; ++i) {
        out[static_cast<std::size_t>(order[i])] = zigzag[i];
    }
    return out;
}

std::vector<QuantTable> extract_quant_tables(std::span<const std::uint8_t> jpeg) {
    std::vector<QuantTable> tables;
    walk_segments(jpeg, [&](std::uint8_t marker,
                            std::span<const std::uint8_t> payload) {
        if (marker == kDQT) {
            parse_dqt_payload(payload, tables);
        }
    });
    if (tables.empty()) {
        throw NoTables("no DQT segment before scan data");
    }
    return tables;
}

QuantValues scale_quant_table(const QuantValues& base, int quality) {
    if (quality < 1 || quality > 100) {
        throw DomainError("quality must be in [1, 100], got " +
                          std::to_string(quality));
    }
    const int scale = quality < 50 ? 5000 / quality : 200 - 2 * quality;
    QuantValues out{};
    for (std::size_t i = 0; i < 64; ++i) {
        const long v = (static_cast<long>(base[i]) * scale + 50) / 100;
        out[i] = static_cast<std::uint16_t>(std::clamp<long>(v, 1, 255));
    }
    return out;
}

namespace {

// Bounds-checked little/big-endian reads inside a TIFF blob. Any failure
// leaves the optional fields empty rather than raising.
struct TiffReader {
    std::span<const std::uint8_t> data;
    bool little_endian = true;

    std::optional<std::uint16_t> u16(std::size_t pos) const {
        if (pos + 2 > data.size()) {
            return std::nullopt;
        }
        return little_endian
                   ? static_cast<std::uint16_t>(data[pos] | (data[pos + 1] << 8))
                   : static_cast<std::uint16_t>((data[pos] << 8) | data[pos + 1]);
    }

    std::optional<std::uint32_t> u32(std::size_t pos) const {
        if (pos + 4 > data.size()) {
            return std::nullopt;
        }
        std::uint32_t v = 0;
        if (little_endian) {
            v = static_cast<std::uint32_t>(data[pos]) |
                (static_cast<std::uint32_t>(data[pos + 1]) << 8) |
                (static_cast<std::uint32_t>(data[pos + 2]) << 16) |
                (static_cast<std::uint32_t>(data[pos + 3]) << 24);
        } else {
            v = (static_cast<std::uint32_t>(data[pos]) << 24) |
                (static_cast<std::uint32_t>(data[pos + 1]) << 16) |
                (static_cast<std::uint32_t>(data[pos + 2]) << 8) |
                static_cast<std::uint32_t>(data[pos + 3]);
        }
        return v;
    }

    std::optional<std::string> ascii(std::size_t pos, std::size_t count) const {
        if (count == 0 || pos + count > data.size()) {
            return std::nullopt;
        }
        std::string s(reinterpret_cast<const char*>(data.data() + pos), count);
        while (!s.empty() && (s.back() == '\0' || s.back() == ' ')) {
            s.pop_back();
        }
        if (s.empty()) {
            return std::nullopt;
        }
        return s;
    }
};

struct IfdEntry {
    std::uint16_t tag = 0;
    std::uint16_t type = 0;
    std::uint32_t count = 0;
    std::size_t value_pos = 0; // offset of the 4-byte value/offset field
};

// Iterates the entries of one IFD; silently stops on any truncation.
std::vector<IfdEntry> read_ifd(const TiffReader& tiff, std::uint32_t offset) {
    std::vector<IfdEntry> entries;
    const auto count = tiff.u16(offset);
    if (!count) {
        return entries;
    }
    for (std::uint16_t i = 0; i < *count; ++i) {
        const std::size_t base = offset + 2 + static_cast<std::size_t>(i) * 12;
        const auto tag = tiff.u16(base);
        const auto type = tiff.u16(base + 2);
        const auto n = tiff.u32(base + 4);
        if (!tag || !type || !n) {
            break;
        }
        entries.push_back({*tag, *type, *n, base + 8});
    }
    return entries;
}

std::optional<std::string> read_ascii_value(const TiffReader& tiff,
                                            const IfdEntry& entry) {
    if (entry.type != 2) { // ASCII
        return std::nullopt;
    }
    if (entry.count <= 4) {
        return tiff.ascii(entry.value_pos, entry.count);
    }
    const auto offset = tiff.u32(entry.value_pos);
    if (!offset) {
        return std::nullopt;
    }
    return tiff.ascii(*offset, entry.count);
}

void parse_exif_tiff(std::span<const std::uint8_t> tiff_bytes, ExifSummary& out) {
    TiffReader tiff{tiff_bytes};
    if (tiff_bytes.size() < 8) {
        return;
    }
    if (tiff_bytes[0] == 'I' && tiff_bytes[1] == 'I') {
        tiff.little_endian = true;
    } else if (tiff_bytes[0] == 'M' && tiff_bytes[1] == 'M') {
        tiff.little_endian = false;
    } else {
        return;
    }
    if (tiff.u16(2) != std::uint16_t{42}) {
        return;
    }
    const auto ifd0_offset = tiff.u32(4);
    if (!ifd0_offset) {
        return;
    }

    std::optional<std::string> make;
    std::optional<std::string> model;
    std::optional<std::uint32_t> exif_ifd_offset;
    for (const IfdEntry& entry : read_ifd(tiff, *ifd0_offset)) {
        switch (entry.tag) {
        case 0x0112: { // Orientation, SHORT
            if (const auto v = tiff.u16(entry.value_pos);
                v && *v >= 1 && *v <= 8) {
                out.orientation = static_cast<int>(*v);
            }
            break;
        }
        case 0x010F:
            make = read_ascii_value(tiff, entry);
            break;
        case 0x0110:
            model = read_ascii_value(tiff, entry);
            break;
        case 0x8769:
            exif_ifd_offset = tiff.u32(entry.value_pos);
            break;
        default:
            break;
        }
    }
    if (make && model) {
        out.make_model = *make + " " + *model;
    } else if (make || model) {
        out.make_model = make ? *make : *model;
    }
    if (exif_ifd_offset) {
        for (const IfdEntry& entry : read_ifd(tiff, *exif_ifd_offset)) {
            if (entry.tag == 0x9003) { // DateTimeOriginal
                out.datetime_original = read_ascii_value(tiff, entry);
            }
        }
    }
}

} // namespace

ExifSummary exif_summary(std::span<const std::uint8_t> jpeg) {
    ExifSummary summary;
    constexpr std::uint8_t kExifHeader[6] = {'E', 'x', 'i', 'f', 0, 0};
    walk_segments(jpeg, [&](std::uint8_t marker,
                            std::span<const std::uint8_t> payload) {
        if (summary.present || marker != kAPP1 || payload.size() < 6 ||
            std::memcmp(payload.data(), kExifHeader, 6) != 0) {
            return;
        }
        summary.present = true;
        summary.byte_length = static_cast<std::uint32_t>(payload.size());
        parse_exif_tiff(payload.subspan(6), summary);
    });
    return summary;
}

std::pair<int, int> jpeg_dimensions(std::span<const std::uint8_t> jpeg) {
    std::optional<std::pair<int, int>> dims;
    walk_segments(jpeg, [&](std::uint8_t marker,
                            std::span<const std::uint8_t> payload) {
        if (dims || !is_sof(marker) || payload.size() < 5) {
            return;
        }
        const int height = (payload[1] << 8) | payload[2];
        const int width = (payload[3] << 8) | payload[4];
        dims = {width, height};
    });
    if (!dims) {
        throw MalformedJpeg("no SOF segment found");
    }
    return *dims;
}

namespace {

struct EvpContext {
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    ~EvpContext() { EVP_MD_CTX_free(ctx); }
};

std::string finish_hex(EVP_MD_CTX* ctx) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, digest, &len);
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0x0F]);
    }
    return out;
}

} // namespace

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
    EvpContext md;
    EVP_DigestInit_ex(md.ctx, EVP_sha256(), nullptr);
    EVP_DigestUpdate(md.ctx, bytes.data(), bytes.size());
    return finish_hex(md.ctx);
}

std::string file_digest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    EvpContext md;
    EVP_DigestInit_ex(md.ctx, EVP_sha256(), nullptr);
    char buf[64 * 1024];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        EVP_DigestUpdate(md.ctx, buf, static_cast<std::size_t>(in.gcount()));
    }
    if (in.bad()) {
        throw IoError("read failure on " + path.string());
    }
    return finish_hex(md.ctx);
}

} // namespace bp
