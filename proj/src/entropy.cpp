#include "entropy.hpp"

#include <algorithm>
#include <numeric>

namespace qimsteg::jpeg::detail {

namespace {

int ceil_div(int a, int b) { return (a + b - 1) / b; }

}  // namespace

void validate_huffman(const HuffmanTable& table) {
    const std::size_t total = std::accumulate(table.counts.begin(), table.counts.end(), std::size_t{0});
    if (total == 0 || total > 256) throw MalformedStream("Huffman table has an invalid symbol count");
    if (total != table.symbols.size()) throw MalformedStream("Huffman table symbol list does not match its counts");
    std::uint32_t code = 0;
    for (int len = 1; len <= 16; ++len) {
        code += table.counts[len - 1];
        if (code > (1u << len)) throw MalformedStream("Huffman table is overfull");
        code <<= 1;
    }
}

HuffmanDecoder::HuffmanDecoder(const HuffmanTable& table) : symbols_(table.symbols) {
    std::int32_t code = 0;
    std::int32_t k = 0;
    for (int len = 1; len <= 16; ++len) {
        const int n = table.counts[len - 1];
        if (n == 0) {
            maxcode_[len] = -1;
        } else {
            valptr_[len] = k;
            mincode_[len] = code;
            code += n;
            k += n;
            maxcode_[len] = code - 1;
        }
        code <<= 1;
    }
}

std::array<HuffmanCode, 256> build_encoder(const HuffmanTable& table) {
    std::array<HuffmanCode, 256> out{};
    std::uint32_t code = 0;
    std::size_t k = 0;
    for (int len = 1; len <= 16; ++len) {
        for (int i = 0; i < table.counts[len - 1]; ++i, ++k) {
            auto& slot = out[table.symbols[k]];
            if (slot.length == 0) {
                slot.code = static_cast<std::uint16_t>(code);
                slot.length = static_cast<std::uint8_t>(len);
            }
            ++code;
        }
        code <<= 1;
    }
    return out;
}

HuffmanTable build_optimal_table(HuffmanClass table_class, const std::array<std::uint64_t, 256>& freq_in) {
    // Huffman tree construction with a pseudo-symbol 256 that reserves the
    // all-ones code, then length limiting to 16 bits (T.81 Annex K.2).
    std::array<std::uint64_t, 257> freq{};
    std::copy(freq_in.begin(), freq_in.end(), freq.begin());
    freq[256] = 1;

    std::array<int, 257> codesize{};
    std::array<int, 257> others;
    others.fill(-1);

    auto smallest = [&freq](int skip) {
        int found = -1;
        std::uint64_t best = ~std::uint64_t{0};
        for (int i = 0; i <= 256; ++i) {
            if (i != skip && freq[i] != 0 && freq[i] <= best) {
                best = freq[i];
                found = i;
            }
        }
        return found;
    };

    for (;;) {
        int c1 = smallest(-1);
        int c2 = smallest(c1);
        if (c2 < 0) break;

        freq[c1] += freq[c2];
        freq[c2] = 0;

        ++codesize[c1];
        while (others[c1] >= 0) {
            c1 = others[c1];
            ++codesize[c1];
        }
        others[c1] = c2;
        ++codesize[c2];
        while (others[c2] >= 0) {
            c2 = others[c2];
            ++codesize[c2];
        }
    }

    std::array<int, 33> bits{};
    for (int size : codesize) {
        if (size != 0) ++bits[size];
    }
    for (int i = 32; i > 16; --i) {
        while (bits[i] > 0) {
            int j = i - 2;
            while (bits[j] == 0) --j;
            bits[i] -= 2;
            bits[i - 1] += 1;
            bits[j + 1] += 2;
            bits[j] -= 1;
        }
    }
    int longest = 16;
    while (longest > 0 && bits[longest] == 0) --longest;
    if (longest > 0) --bits[longest];  // drop the reserved code point

    HuffmanTable table;
    table.table_class = table_class;
    for (int i = 1; i <= 16; ++i) table.counts[i - 1] = static_cast<std::uint8_t>(bits[i]);
    for (int len = 1; len <= 32; ++len) {
        for (int sym = 0; sym < 256; ++sym) {
            if (codesize[sym] == len) table.symbols.push_back(static_cast<std::uint8_t>(sym));
        }
    }
    return table;
}

ScanLayout make_layout(const FrameHeader& frame, const Scan& scan) {
    ScanLayout layout;
    const int hmax = frame.max_h_sampling();
    const int vmax = frame.max_v_sampling();
    if (scan.components.size() == 1) {
        const auto& fc = frame.components[scan.components.front().component];
        const int comp_w = ceil_div(frame.width * fc.h_sampling, hmax);
        const int comp_h = ceil_div(frame.height * fc.v_sampling, vmax);
        ScanLayout::Slot slot;
        slot.component = scan.components.front().component;
        slot.plane_wide = static_cast<std::size_t>(ceil_div(comp_w, 8));
        slot.plane_high = static_cast<std::size_t>(ceil_div(comp_h, 8));
        layout.mcus_x = slot.plane_wide;
        layout.mcus_y = slot.plane_high;
        layout.slots.push_back(slot);
        return layout;
    }
    layout.mcus_x = static_cast<std::size_t>(ceil_div(frame.width, 8 * hmax));
    layout.mcus_y = static_cast<std::size_t>(ceil_div(frame.height, 8 * vmax));
    for (const auto& sc : scan.components) {
        const auto& fc = frame.components[sc.component];
        ScanLayout::Slot slot;
        slot.component = sc.component;
        slot.h = fc.h_sampling;
        slot.v = fc.v_sampling;
        slot.plane_wide = layout.mcus_x * static_cast<std::size_t>(fc.h_sampling);
        slot.plane_high = layout.mcus_y * static_cast<std::size_t>(fc.v_sampling);
        layout.slots.push_back(slot);
    }
    return layout;
}

}  // namespace qimsteg::jpeg::detail
