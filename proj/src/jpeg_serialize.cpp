#include <algorithm>
#include <string>

#include "entropy.hpp"
#include "qimsteg/errors.hpp"
#include "qimsteg/jpeg.hpp"

namespace qimsteg::jpeg {

namespace {

using detail::HuffmanCode;

void put_u8(std::vector<std::uint8_t>& out, unsigned v) { out.push_back(static_cast<std::uint8_t>(v)); }
void put_u16(std::vector<std::uint8_t>& out, unsigned v) {
    put_u8(out, (v >> 8) & 0xFF);
    put_u8(out, v & 0xFF);
}

void put_segment(std::vector<std::uint8_t>& out, std::uint8_t marker, const std::vector<std::uint8_t>& payload) {
    if (payload.size() + 2 > 0xFFFF) throw EncodingOverflow("marker segment too long");
    put_u8(out, 0xFF);
    put_u8(out, marker);
    put_u16(out, static_cast<unsigned>(payload.size() + 2));
    out.insert(out.end(), payload.begin(), payload.end());
}

void check_structure(const JpegImage& image) {
    if (image.frame.components.empty()) throw std::invalid_argument("frame has no components");
    if (image.coeff_planes.size() != image.frame.components.size()) {
        throw std::invalid_argument("coefficient plane count does not match the frame");
    }
    for (const auto& c : image.frame.components) {
        if (!image.quant_tables.contains(c.quant_table)) throw std::invalid_argument("missing quantization table");
    }
    std::vector<int> coded(image.frame.components.size(), 0);
    for (const auto& scan : image.scans) {
        const auto layout = detail::make_layout(image.frame, scan);
        for (const auto& slot : layout.slots) {
            const auto& plane = image.coeff_planes[slot.component];
            if (plane.blocks_wide != slot.plane_wide || plane.blocks_high != slot.plane_high ||
                plane.blocks.size() != plane.blocks_wide * plane.blocks_high) {
                throw std::invalid_argument("coefficient plane dimensions do not match the frame");
            }
            ++coded[slot.component];
        }
        for (const auto& sc : scan.components) {
            if (!image.huffman_tables.contains({HuffmanClass::DC, sc.dc_table}) ||
                !image.huffman_tables.contains({HuffmanClass::AC, sc.ac_table})) {
                throw std::invalid_argument("scan references a missing Huffman table");
            }
        }
    }
    if (std::any_of(coded.begin(), coded.end(), [](int n) { return n != 1; })) {
        throw std::invalid_argument("every component must be coded in exactly one scan");
    }
}

/// Walks a scan in bitstream order and reports Huffman symbols, raw magnitude
/// bits and restart points to the sink. Shared by the statistics and the
/// writing pass so both see the same DC differences.
template <typename Sink>
void walk_scan(const JpegImage& image, const Scan& scan, Sink& sink) {
    const auto layout = detail::make_layout(image.frame, scan);
    std::vector<std::int32_t> pred(scan.components.size(), 0);
    const auto interval = static_cast<std::size_t>(image.restart_interval);
    std::size_t last_mcu = 0;
    int next_rst = 0;

    detail::for_each_block(layout, [&](std::size_t mcu, std::size_t s, std::size_t row, std::size_t col) {
        if (interval != 0 && mcu != 0 && mcu != last_mcu && mcu % interval == 0) {
            sink.restart(next_rst);
            next_rst = (next_rst + 1) & 7;
            std::fill(pred.begin(), pred.end(), 0);
        }
        last_mcu = mcu;

        const auto& sc = scan.components[s];
        const HuffmanKey dc_key{HuffmanClass::DC, sc.dc_table};
        const HuffmanKey ac_key{HuffmanClass::AC, sc.ac_table};
        const auto& block = image.coeff_planes[layout.slots[s].component].at(row, col);

        for (auto c : block.coeffs) {
            if (c > kMaxCoeffMagnitude || c < -kMaxCoeffMagnitude) {
                throw EncodingOverflow("coefficient " + std::to_string(c) + " exceeds magnitude category 15");
            }
        }

        const std::int32_t diff = block[0] - pred[s];
        pred[s] = block[0];
        const int dc_size = detail::magnitude_category(diff);
        if (dc_size > 15) throw EncodingOverflow("DC difference exceeds magnitude category 15");
        sink.symbol(dc_key, static_cast<std::uint8_t>(dc_size));
        sink.raw(detail::magnitude_bits(diff, dc_size), dc_size);

        int run = 0;
        for (int k = 1; k < kBlockCoeffs; ++k) {
            const std::int32_t v = block[static_cast<std::size_t>(k)];
            if (v == 0) {
                ++run;
                continue;
            }
            while (run > 15) {
                sink.symbol(ac_key, 0xF0);
                run -= 16;
            }
            const int size = detail::magnitude_category(v);
            sink.symbol(ac_key, static_cast<std::uint8_t>((run << 4) | size));
            sink.raw(detail::magnitude_bits(v, size), size);
            run = 0;
        }
        if (run > 0) sink.symbol(ac_key, 0x00);
    });
}

struct StatisticsSink {
    std::map<HuffmanKey, std::array<std::uint64_t, 256>> freq;

    void symbol(const HuffmanKey& key, std::uint8_t sym) { ++freq[key][sym]; }
    void raw(std::uint32_t, int) {}
    void restart(int) {}
};

struct WriterSink {
    std::vector<std::uint8_t>& out;
    detail::BitWriter writer;
    const std::map<HuffmanKey, std::array<HuffmanCode, 256>>& codes;

    void symbol(const HuffmanKey& key, std::uint8_t sym) {
        const auto& code = codes.at(key)[sym];
        writer.put(code.code, code.length);
    }
    void raw(std::uint32_t bits, int n) { writer.put(bits, n); }
    void restart(int n) {
        writer.flush();
        put_u8(out, 0xFF);
        put_u8(out, 0xD0 + static_cast<unsigned>(n));
    }
};

bool can_encode(const HuffmanTable& table, const std::array<std::uint64_t, 256>& freq) {
    const auto codes = detail::build_encoder(table);
    for (std::size_t sym = 0; sym < 256; ++sym) {
        if (freq[sym] != 0 && codes[sym].length == 0) return false;
    }
    return true;
}

}  // namespace

std::vector<std::uint8_t> serialize(const JpegImage& image) {
    check_structure(image);

    StatisticsSink stats;
    for (const auto& scan : image.scans) walk_scan(image, scan, stats);

    // Keep the cover's tables unless a modified coefficient needs a symbol
    // they lack.
    std::map<HuffmanKey, HuffmanTable> tables = image.huffman_tables;
    for (const auto& [key, freq] : stats.freq) {
        if (!can_encode(tables.at(key), freq)) tables[key] = detail::build_optimal_table(key.table_class, freq);
    }
    std::map<HuffmanKey, std::array<HuffmanCode, 256>> codes;
    for (const auto& [key, table] : tables) codes[key] = detail::build_encoder(table);

    std::vector<std::uint8_t> out;
    put_u8(out, 0xFF);
    put_u8(out, 0xD8);
    for (const auto& seg : image.preserved_segments) put_segment(out, seg.marker, seg.payload);

    for (const auto& [id, table] : image.quant_tables) {
        std::vector<std::uint8_t> payload;
        const bool wide = table.precision_bits == 16;
        put_u8(payload, (wide ? 0x10u : 0x00u) | id);
        for (auto e : table.entries) {
            if (wide) {
                put_u16(payload, e);
            } else {
                put_u8(payload, e);
            }
        }
        put_segment(out, 0xDB, payload);
    }

    {
        std::vector<std::uint8_t> payload;
        put_u8(payload, static_cast<unsigned>(image.frame.precision));
        put_u16(payload, static_cast<unsigned>(image.frame.height));
        put_u16(payload, static_cast<unsigned>(image.frame.width));
        put_u8(payload, static_cast<unsigned>(image.frame.components.size()));
        for (const auto& c : image.frame.components) {
            put_u8(payload, c.id);
            put_u8(payload, static_cast<unsigned>((c.h_sampling << 4) | c.v_sampling));
            put_u8(payload, c.quant_table);
        }
        put_segment(out, 0xC0, payload);
    }

    {
        std::vector<std::uint8_t> payload;
        for (const auto& [key, table] : tables) {
            put_u8(payload, (static_cast<unsigned>(key.table_class) << 4) | key.id);
            payload.insert(payload.end(), table.counts.begin(), table.counts.end());
            payload.insert(payload.end(), table.symbols.begin(), table.symbols.end());
        }
        put_segment(out, 0xC4, payload);
    }

    if (image.restart_interval > 0) {
        std::vector<std::uint8_t> payload;
        put_u16(payload, static_cast<unsigned>(image.restart_interval));
        put_segment(out, 0xDD, payload);
    }

    for (const auto& scan : image.scans) {
        std::vector<std::uint8_t> payload;
        put_u8(payload, static_cast<unsigned>(scan.components.size()));
        for (const auto& sc : scan.components) {
            put_u8(payload, image.frame.components[sc.component].id);
            put_u8(payload, static_cast<unsigned>((sc.dc_table << 4) | sc.ac_table));
        }
        put_u8(payload, 0);
        put_u8(payload, 63);
        put_u8(payload, 0);
        put_segment(out, 0xDA, payload);

        WriterSink sink{out, detail::BitWriter(out), codes};
        walk_scan(image, scan, sink);
        sink.writer.flush();
    }

    put_u8(out, 0xFF);
    put_u8(out, 0xD9);
    return out;
}

}  // namespace qimsteg::jpeg
