#include "reference_jpeg.hpp"

#include <csetjmp>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

extern "C" {
#include <jpeglib.h>
}

namespace reference {

namespace {

struct ErrorManager {
    jpeg_error_mgr pub;
    std::jmp_buf jump;
    char message[JMSG_LENGTH_MAX];
};

void on_error(j_common_ptr cinfo) {
    auto* err = reinterpret_cast<ErrorManager*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, err->message);
    std::longjmp(err->jump, 1);
}

// Silent, but keeps libjpeg's warning count (corrupt-data reports are warnings).
void on_message(j_common_ptr cinfo, int level) {
    if (level < 0) ++cinfo->err->num_warnings;
}

}  // namespace

Coefficients read_coefficients(std::span<const std::uint8_t> data) {
    jpeg_decompress_struct cinfo{};
    ErrorManager err{};
    cinfo.err = jpeg_std_error(&err.pub);
    err.pub.error_exit = on_error;
    err.pub.emit_message = on_message;
    Coefficients out;
    if (setjmp(err.jump)) {
        jpeg_destroy_decompress(&cinfo);
        throw std::runtime_error(std::string("libjpeg: ") + err.message);
    }
    jpeg_create_decompress(&cinfo);
    jpeg_mem_src(&cinfo, data.data(), static_cast<unsigned long>(data.size()));
    jpeg_read_header(&cinfo, TRUE);
    jvirt_barray_ptr* arrays = jpeg_read_coefficients(&cinfo);
    out.width = static_cast<int>(cinfo.image_width);
    out.height = static_cast<int>(cinfo.image_height);
    for (int c = 0; c < cinfo.num_components; ++c) {
        const auto& comp = cinfo.comp_info[c];
        ComponentCoefficients cc;
        cc.width_in_blocks = static_cast<int>(comp.width_in_blocks);
        cc.height_in_blocks = static_cast<int>(comp.height_in_blocks);
        for (JDIMENSION row = 0; row < comp.height_in_blocks; ++row) {
            JBLOCKARRAY rows = (*cinfo.mem->access_virt_barray)(reinterpret_cast<j_common_ptr>(&cinfo), arrays[c], row, 1, FALSE);
            for (JDIMENSION col = 0; col < comp.width_in_blocks; ++col) {
                std::array<std::int16_t, 64> block{};
                for (int k = 0; k < 64; ++k) block[static_cast<std::size_t>(k)] = rows[0][col][k];
                cc.blocks.push_back(block);
            }
        }
        out.components.push_back(std::move(cc));
        std::array<std::uint16_t, 64> q{};
        for (int k = 0; k < 64; ++k) q[static_cast<std::size_t>(k)] = comp.quant_table->quantval[k];
        out.component_quant.push_back(q);
    }
    jpeg_finish_decompress(&cinfo);
    out.warnings = err.pub.num_warnings;
    jpeg_destroy_decompress(&cinfo);
    return out;
}

GrayImage decode_luma(std::span<const std::uint8_t> data) {
    jpeg_decompress_struct cinfo{};
    ErrorManager err{};
    cinfo.err = jpeg_std_error(&err.pub);
    err.pub.error_exit = on_error;
    err.pub.emit_message = on_message;
    GrayImage out;
    if (setjmp(err.jump)) {
        jpeg_destroy_decompress(&cinfo);
        throw std::runtime_error(std::string("libjpeg: ") + err.message);
    }
    jpeg_create_decompress(&cinfo);
    jpeg_mem_src(&cinfo, data.data(), static_cast<unsigned long>(data.size()));
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = JCS_GRAYSCALE;
    cinfo.dct_method = JDCT_FLOAT;
    jpeg_start_decompress(&cinfo);
    out.width = static_cast<int>(cinfo.output_width);
    out.height = static_cast<int>(cinfo.output_height);
    out.samples.resize(static_cast<std::size_t>(out.width) * static_cast<std::size_t>(out.height));
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW row = out.samples.data() + static_cast<std::size_t>(cinfo.output_scanline) * static_cast<std::size_t>(out.width);
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    out.warnings = err.pub.num_warnings;
    jpeg_destroy_decompress(&cinfo);
    return out;
}

std::vector<std::uint8_t> encode_gray(int width, int height, std::span<const std::uint8_t> samples,
                                      const EncodeOptions& opts) {
    jpeg_compress_struct cinfo{};
    ErrorManager err{};
    cinfo.err = jpeg_std_error(&err.pub);
    err.pub.error_exit = on_error;
    unsigned char* buffer = nullptr;
    unsigned long size = 0;
    if (setjmp(err.jump)) {
        jpeg_destroy_compress(&cinfo);
        std::free(buffer);
        throw std::runtime_error(std::string("libjpeg: ") + err.message);
    }
    jpeg_create_compress(&cinfo);
    jpeg_mem_dest(&cinfo, &buffer, &size);
    cinfo.image_width = static_cast<JDIMENSION>(width);
    cinfo.image_height = static_cast<JDIMENSION>(height);
    cinfo.input_components = 1;
    cinfo.in_color_space = JCS_GRAYSCALE;
    jpeg_set_defaults(&cinfo);
    jpeg_set_quality(&cinfo, opts.quality, TRUE);
    cinfo.optimize_coding = opts.optimize ? TRUE : FALSE;
    cinfo.arith_code = opts.arithmetic ? TRUE : FALSE;
    cinfo.restart_interval = static_cast<unsigned int>(opts.restart_interval);
    if (opts.progressive) jpeg_simple_progression(&cinfo);
    jpeg_start_compress(&cinfo, TRUE);
    while (cinfo.next_scanline < cinfo.image_height) {
        auto row = const_cast<JSAMPROW>(samples.data() + static_cast<std::size_t>(cinfo.next_scanline) * static_cast<std::size_t>(width));
        jpeg_write_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_compress(&cinfo);
    jpeg_destroy_compress(&cinfo);
    std::vector<std::uint8_t> out(buffer, buffer + size);
    std::free(buffer);
    return out;
}

}  // namespace reference
