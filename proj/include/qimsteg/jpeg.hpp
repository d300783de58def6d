#pragma once

// Baseline JPEG codec working at the level of quantized DCT coefficients.
//
// parse() stops after entropy decoding: the coefficient planes hold the exact
// integers stored in the file (DC differences already resolved). serialize()
// re-encodes those integers, so parse -> edit -> serialize only touches what
// was edited. decode_pixels() reconstructs the luminance raster for quality
// measurement.

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <vector>

namespace qimsteg::jpeg {

inline constexpr int kBlockCoeffs = 64;
inline constexpr std::int32_t kMaxCoeffMagnitude = 32767;

/// One 8x8 block of quantized coefficients in zigzag order (index 0 = DC).
struct CoeffBlock {
    std::array<std::int32_t, kBlockCoeffs> coeffs{};

    std::int32_t& operator[](std::size_t zz) { return coeffs[zz]; }
    std::int32_t operator[](std::size_t zz) const { return coeffs[zz]; }

    bool operator==(const CoeffBlock&) const = default;
};

struct CoeffPlane {
    std::size_t blocks_wide = 0;
    std::size_t blocks_high = 0;
    std::vector<CoeffBlock> blocks;  // row-major

    CoeffPlane() = default;
    CoeffPlane(std::size_t wide, std::size_t high) : blocks_wide(wide), blocks_high(high), blocks(wide * high) {}

    CoeffBlock& at(std::size_t row, std::size_t col) { return blocks[row * blocks_wide + col]; }
    const CoeffBlock& at(std::size_t row, std::size_t col) const { return blocks[row * blocks_wide + col]; }

    bool operator==(const CoeffPlane&) const = default;
};

struct QuantTable {
    std::array<std::uint16_t, kBlockCoeffs> entries{};  // zigzag order, all >= 1
    int precision_bits = 8;                              // 8 or 16

    bool operator==(const QuantTable&) const = default;
};

enum class HuffmanClass : std::uint8_t { DC = 0, AC = 1 };

struct HuffmanKey {
    HuffmanClass table_class = HuffmanClass::DC;
    std::uint8_t id = 0;

    auto operator<=>(const HuffmanKey&) const = default;
};

struct HuffmanTable {
    HuffmanClass table_class = HuffmanClass::DC;
    std::array<std::uint8_t, 16> counts{};  // counts[i] = number of codes of length i + 1
    std::vector<std::uint8_t> symbols;

    bool operator==(const HuffmanTable&) const = default;
};

struct FrameComponent {
    std::uint8_t id = 0;
    int h_sampling = 1;
    int v_sampling = 1;
    std::uint8_t quant_table = 0;

    bool operator==(const FrameComponent&) const = default;
};

struct FrameHeader {
    int width = 0;
    int height = 0;
    int precision = 8;
    std::vector<FrameComponent> components;

    int max_h_sampling() const;
    int max_v_sampling() const;

    bool operator==(const FrameHeader&) const = default;
};

/// One component inside a scan; `component` indexes FrameHeader::components.
struct ScanComponent {
    std::size_t component = 0;
    std::uint8_t dc_table = 0;
    std::uint8_t ac_table = 0;

    bool operator==(const ScanComponent&) const = default;
};

struct Scan {
    std::vector<ScanComponent> components;

    bool operator==(const Scan&) const = default;
};

/// An APPn or COM segment kept verbatim (payload excludes the length field).
struct MarkerSegment {
    std::uint8_t marker = 0;
    std::vector<std::uint8_t> payload;

    bool operator==(const MarkerSegment&) const = default;
};

struct JpegImage {
    FrameHeader frame;
    std::map<std::uint8_t, QuantTable> quant_tables;
    std::map<HuffmanKey, HuffmanTable> huffman_tables;
    int restart_interval = 0;  // MCUs, 0 = none
    std::vector<CoeffPlane> coeff_planes;  // parallel to frame.components
    std::vector<MarkerSegment> preserved_segments;
    std::vector<Scan> scans;

    /// The first frame component is luminance (JFIF convention).
    CoeffPlane& luma() { return coeff_planes.front(); }
    const CoeffPlane& luma() const { return coeff_planes.front(); }
    const QuantTable& luma_quant() const;
};

/// 8-bit luminance raster, row-major.
struct PixelPlane {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> samples;

    std::uint8_t at(std::size_t x, std::size_t y) const { return samples[y * width + x]; }
    bool operator==(const PixelPlane&) const = default;
};

struct NaturalPosition {
    int row = 0;
    int col = 0;

    bool operator==(const NaturalPosition&) const = default;
};

/// T.81 zigzag scan index -> (row, col) inside the 8x8 block.
NaturalPosition zigzag_to_natural(int index);
int natural_to_zigzag(NaturalPosition pos);

JpegImage parse(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> serialize(const JpegImage& image);
PixelPlane decode_pixels(const JpegImage& image);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
inline JpegImage parse_file(const std::filesystem::path& path) { return parse(read_file(path)); }

}  // namespace qimsteg::jpeg
