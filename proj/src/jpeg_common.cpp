#include <algorithm>
#include <array>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>

#include "qimsteg/jpeg.hpp"

namespace qimsteg::jpeg {

namespace {

constexpr std::array<NaturalPosition, kBlockCoeffs> make_zigzag() {
    // Walk the anti-diagonals, alternating direction.
    std::array<NaturalPosition, kBlockCoeffs> order{};
    int row = 0;
    int col = 0;
    for (auto& pos : order) {
        pos = {row, col};
        if ((row + col) % 2 == 0) {
            if (col == 7) {
                ++row;
            } else if (row == 0) {
                ++col;
            } else {
                --row;
                ++col;
            }
        } else {
            if (row == 7) {
                ++col;
            } else if (col == 0) {
                ++row;
            } else {
                ++row;
                --col;
            }
        }
    }
    return order;
}

constexpr auto kZigzag = make_zigzag();

}  // namespace

NaturalPosition zigzag_to_natural(int index) {
    if (index < 0 || index >= kBlockCoeffs) throw std::out_of_range("zigzag index out of range");
    return kZigzag[static_cast<std::size_t>(index)];
}

int natural_to_zigzag(NaturalPosition pos) {
    auto it = std::find(kZigzag.begin(), kZigzag.end(), pos);
    if (it == kZigzag.end()) throw std::out_of_range("block position out of range");
    return static_cast<int>(it - kZigzag.begin());
}

int FrameHeader::max_h_sampling() const {
    int m = 1;
    for (const auto& c : components) m = std::max(m, c.h_sampling);
    return m;
}

int FrameHeader::max_v_sampling() const {
    int m = 1;
    for (const auto& c : components) m = std::max(m, c.v_sampling);
    return m;
}

const QuantTable& JpegImage::luma_quant() const { return quant_tables.at(frame.components.front().quant_table); }

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace qimsteg::jpeg
