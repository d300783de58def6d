#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "qimsteg/jpeg.hpp"

namespace qimsteg::jpeg {

namespace {

// basis[x][u] = C(u)/2 * cos((2x+1) u pi / 16), so the 2-D inverse DCT is
// basis * F * basis^T.
struct IdctBasis {
    std::array<std::array<double, 8>, 8> m{};

    IdctBasis() {
        for (int x = 0; x < 8; ++x) {
            for (int u = 0; u < 8; ++u) {
                const double cu = u == 0 ? std::numbers::sqrt2 / 2.0 : 1.0;
                m[x][u] = 0.5 * cu * std::cos((2.0 * x + 1.0) * u * std::numbers::pi / 16.0);
            }
        }
    }
};

const IdctBasis& basis() {
    static const IdctBasis b;
    return b;
}

using Block8 = std::array<std::array<double, 8>, 8>;

Block8 inverse_dct(const Block8& freq) {
    const auto& m = basis().m;
    Block8 tmp{};
    for (int v = 0; v < 8; ++v) {
        for (int x = 0; x < 8; ++x) {
            double s = 0.0;
            for (int u = 0; u < 8; ++u) s += freq[v][u] * m[x][u];
            tmp[v][x] = s;
        }
    }
    Block8 out{};
    for (int y = 0; y < 8; ++y) {
        for (int x = 0; x < 8; ++x) {
            double s = 0.0;
            for (int v = 0; v < 8; ++v) s += m[y][v] * tmp[v][x];
            out[y][x] = s;
        }
    }
    return out;
}

}  // namespace

PixelPlane decode_pixels(const JpegImage& image) {
    const auto& frame = image.frame;
    const auto& comp = frame.components.front();
    const auto& plane = image.luma();
    const auto& quant = image.luma_quant();

    PixelPlane out;
    out.width = static_cast<std::size_t>((frame.width * comp.h_sampling + frame.max_h_sampling() - 1) / frame.max_h_sampling());
    out.height = static_cast<std::size_t>((frame.height * comp.v_sampling + frame.max_v_sampling() - 1) / frame.max_v_sampling());
    out.samples.assign(out.width * out.height, 0);

    const std::size_t rows = std::min(plane.blocks_high, (out.height + 7) / 8);
    const std::size_t cols = std::min(plane.blocks_wide, (out.width + 7) / 8);
    for (std::size_t br = 0; br < rows; ++br) {
        for (std::size_t bc = 0; bc < cols; ++bc) {
            const auto& block = plane.at(br, bc);
            Block8 freq{};
            for (int k = 0; k < kBlockCoeffs; ++k) {
                const auto pos = zigzag_to_natural(k);
                freq[pos.row][pos.col] = static_cast<double>(block[static_cast<std::size_t>(k)]) * quant.entries[static_cast<std::size_t>(k)];
            }
            const auto spatial = inverse_dct(freq);
            for (std::size_t y = 0; y < 8; ++y) {
                const std::size_t py = br * 8 + y;
                if (py >= out.height) break;
                for (std::size_t x = 0; x < 8; ++x) {
                    const std::size_t px = bc * 8 + x;
                    if (px >= out.width) break;
                    const double v = std::floor(spatial[y][x] + 0.5) + 128.0;
                    out.samples[py * out.width + px] = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
                }
            }
        }
    }
    return out;
}

}  // namespace qimsteg::jpeg
