#include "bp/jpeg_codec.hpp"

#include "bp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>

#include <jpeglib.h>

namespace bp {

namespace {

// libjpeg's default error handler exits the process; route errors through
// setjmp/longjmp into a DecodeError instead.
struct JpegErrorJmp {
    jpeg_error_mgr mgr{};
    jmp_buf env{};
    char message[JMSG_LENGTH_MAX] = {0};
};

void error_exit_to_jmp(j_common_ptr cinfo) {
    auto* err = reinterpret_cast<JpegErrorJmp*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, err->message);
    longjmp(err->env, 1);
}

void discard_output_message(j_common_ptr) {}

} // namespace

DecodedJpeg decode_jpeg(std::span<const std::uint8_t> jpeg) {
    jpeg_decompress_struct cinfo{};
    JpegErrorJmp err;
    cinfo.err = jpeg_std_error(&err.mgr);
    err.mgr.error_exit = error_exit_to_jmp;
    err.mgr.output_message = discard_output_message;

    DecodedJpeg out;
    if (setjmp(err.env)) {
        jpeg_destroy_decompress(&cinfo);
        throw DecodeError(std::string("jpeg decode failed: ") + err.message);
    }

    jpeg_create_decompress(&cinfo);
    jpeg_mem_src(&cinfo, jpeg.data(), jpeg.size());
    for (int n = 1; n <= 15; ++n) {
        jpeg_save_markers(&cinfo, JPEG_APP0 + n, 0xFFFF);
    }
    jpeg_save_markers(&cinfo, JPEG_COM, 0xFFFF);
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = JCS_RGB;
    jpeg_start_decompress(&cinfo);

    out.image.width = static_cast<int>(cinfo.output_width);
    out.image.height = static_cast<int>(cinfo.output_height);
    out.image.rgb.resize(out.image.expected_bytes());
    const std::size_t stride = static_cast<std::size_t>(out.image.width) * 3;
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW row = out.image.rgb.data() + cinfo.output_scanline * stride;
        jpeg_read_scanlines(&cinfo, &row, 1);
    }

    for (jpeg_saved_marker_ptr m = cinfo.marker_list; m != nullptr; m = m->next) {
        MarkerSegment seg;
        seg.marker = m->marker == JPEG_COM
                         ? std::uint8_t{0xFE}
                         : static_cast<std::uint8_t>(0xE0 + (m->marker - JPEG_APP0));
        seg.payload.assign(m->data, m->data + m->data_length);
        out.app_markers.push_back(std::move(seg));
    }

    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return out;
}

std::vector<std::uint8_t> encode_jpeg(const RawImage& image,
                                      const QuantValues& luminance,
                                      const QuantValues& chrominance,
                                      const std::vector<MarkerSegment>& markers) {
    if (image.width < 1 || image.height < 1 ||
        image.rgb.size() != image.expected_bytes()) {
        throw DomainError("encode_jpeg: inconsistent image buffer");
    }
    for (std::size_t i = 0; i < 64; ++i) {
        if (luminance[i] < 1 || luminance[i] > 255 || chrominance[i] < 1 ||
            chrominance[i] > 255) {
            throw DomainError("encode_jpeg: table values must be in [1, 255]");
        }
    }

    jpeg_compress_struct cinfo{};
    JpegErrorJmp err;
    cinfo.err = jpeg_std_error(&err.mgr);
    err.mgr.error_exit = error_exit_to_jmp;
    err.mgr.output_message = discard_output_message;

    unsigned char* buffer = nullptr;
    unsigned long buffer_size = 0;
    if (setjmp(err.env)) {
        jpeg_destroy_compress(&cinfo);
        std::free(buffer);
        throw DecodeError(std::string("jpeg encode failed: ") + err.message);
    }

    jpeg_create_compress(&cinfo);
    jpeg_mem_dest(&cinfo, &buffer, &buffer_size);
    cinfo.image_width = static_cast<JDIMENSION>(image.width);
    cinfo.image_height = static_cast<JDIMENSION>(image.height);
    cinfo.input_components = 3;
    cinfo.in_color_space = JCS_RGB;
    jpeg_set_defaults(&cinfo);

    // Inject the tables verbatim: scale factor 100 keeps the values as
    // given, and the default component mapping uses table 0 for luma and
    // table 1 for both chroma channels.
    unsigned int lum[64];
    unsigned int chrom[64];
    for (std::size_t i = 0; i < 64; ++i) {
        lum[i] = luminance[i];
        chrom[i] = chrominance[i];
    }
    jpeg_add_quant_table(&cinfo, 0, lum, 100, TRUE);
    jpeg_add_quant_table(&cinfo, 1, chrom, 100, TRUE);

    jpeg_start_compress(&cinfo, TRUE);
    for (const MarkerSegment& seg : markers) {
        const int code = seg.marker == 0xFE
                             ? JPEG_COM
                             : JPEG_APP0 + (seg.marker - 0xE0);
        jpeg_write_marker(&cinfo, code, seg.payload.data(),
                          static_cast<unsigned int>(seg.payload.size()));
    }

    const std::size_t stride = static_cast<std::size_t>(image.width) * 3;
    while (cinfo.next_scanline < cinfo.image_height) {
        JSAMPROW row = const_cast<JSAMPROW>(image.rgb.data() +
                                            cinfo.next_scanline * stride);
        jpeg_write_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_compress(&cinfo);

    std::vector<std::uint8_t> out(buffer, buffer + buffer_size);
    jpeg_destroy_compress(&cinfo);
    std::free(buffer);
    return out;
}

namespace {

// One separable bilinear pass along the horizontal axis; the vertical pass
// reuses it on the transposed view by swapping strides.
std::vector<std::uint8_t> resample_rows(const std::uint8_t* src, int src_w,
                                        int rows, std::size_t row_stride,
                                        std::size_t px_stride, int dst_w) {
    std::vector<std::uint8_t> out(static_cast<std::size_t>(dst_w) * rows * 3);
    const double scale = static_cast<double>(src_w) / dst_w;
    for (int r = 0; r < rows; ++r) {
        const std::uint8_t* row = src + static_cast<std::size_t>(r) * row_stride;
        std::uint8_t* dst_row = out.data() + static_cast<std::size_t>(r) * dst_w * 3;
        for (int x = 0; x < dst_w; ++x) {
            const double sx = (x + 0.5) * scale - 0.5;
            const int x0 = std::clamp(static_cast<int>(std::floor(sx)), 0, src_w - 1);
            const int x1 = std::min(x0 + 1, src_w - 1);
            const double t = std::clamp(sx - x0, 0.0, 1.0);
            for (int c = 0; c < 3; ++c) {
                const double a = row[static_cast<std::size_t>(x0) * px_stride + c];
                const double b = row[static_cast<std::size_t>(x1) * px_stride + c];
                dst_row[static_cast<std::size_t>(x) * 3 + c] =
                    static_cast<std::uint8_t>(std::lround(a + (b - a) * t));
            }
        }
    }
    return out;
}

} // namespace

RawImage resize_to_max_dimension(const RawImage& image, int max_dimension) {
    if (max_dimension < 1) {
        throw DomainError("max_dimension must be positive");
    }
    const int longest = std::max(image.width, image.height);
    if (longest <= max_dimension) {
        return image;
    }
    const double factor = static_cast<double>(max_dimension) / longest;
    RawImage out;
    out.width = std::max(1, image.width >= image.height
                                ? max_dimension
                                : static_cast<int>(std::lround(image.width * factor)));
    out.height = std::max(1, image.height > image.width
                                 ? max_dimension
                                 : static_cast<int>(std::lround(image.height * factor)));

    // Horizontal pass.
    auto horizontal =
        resample_rows(image.rgb.data(), image.width, image.height,
                      static_cast<std::size_t>(image.width) * 3, 3, out.width);
    // Vertical pass over columns of the intermediate image.
    auto vertical = resample_rows(horizontal.data(), image.height, out.width,
                                  3, static_cast<std::size_t>(out.width) * 3,
                                  out.height);
    // `vertical` holds the transposed result: out.width rows of out.height
    // pixels. Transpose back to row-major.
    out.rgb.resize(out.expected_bytes());
    for (int y = 0; y < out.height; ++y) {
        for (int x = 0; x < out.width; ++x) {
            const std::size_t src_idx =
                (static_cast<std::size_t>(x) * out.height + y) * 3;
            const std::size_t dst_idx =
                (static_cast<std::size_t>(y) * out.width + x) * 3;
            out.rgb[dst_idx] = vertical[src_idx];
            out.rgb[dst_idx + 1] = vertical[src_idx + 1];
            out.rgb[dst_idx + 2] = vertical[src_idx + 2];
        }
    }
    return out;
}

} // namespace bp
