#include <algorithm>
#include <set>
#include <string>

#include "entropy.hpp"
#include "qimsteg/errors.hpp"
#include "qimsteg/jpeg.hpp"

namespace qimsteg::jpeg {

namespace {

using detail::BitReader;
using detail::HuffmanDecoder;

std::string hex(std::uint8_t marker) {
    static constexpr char digits[] = "0123456789ABCDEF";
    return std::string{"0xFF"} + digits[marker >> 4] + digits[marker & 15];
}

/// Cursor over one marker segment payload.
class SegmentReader {
public:
    SegmentReader(std::span<const std::uint8_t> payload, std::uint8_t marker) : data_(payload), marker_(marker) {}

    std::uint8_t u8() {
        need(1);
        return data_[pos_++];
    }
    std::uint16_t u16() {
        need(2);
        const auto v = static_cast<std::uint16_t>((data_[pos_] << 8) | data_[pos_ + 1]);
        pos_ += 2;
        return v;
    }
    bool done() const { return pos_ == data_.size(); }
    void expect_done() const {
        if (!done()) throw MalformedStream("segment " + hex(marker_) + " has trailing bytes");
    }

private:
    void need(std::size_t n) const {
        if (pos_ + n > data_.size()) throw MalformedStream("segment " + hex(marker_) + " is too short");
    }

    std::span<const std::uint8_t> data_;
    std::uint8_t marker_;
    std::size_t pos_ = 0;
};

bool is_unsupported_frame(std::uint8_t m) {
    // SOF1..SOF15 except DHT (C4), JPG (C8) and DAC (CC); DAC itself means
    // arithmetic coding; DHP/EXP are hierarchical; DNL only follows a
    // height-less frame.
    return (m >= 0xC1 && m <= 0xCF && m != 0xC4 && m != 0xC8) || m == 0xDC || m == 0xDE || m == 0xDF;
}

const char* describe_unsupported(std::uint8_t m) {
    switch (m) {
        case 0xC1: return "extended sequential JPEG";
        case 0xC2: return "progressive JPEG";
        case 0xC3: return "lossless JPEG";
        case 0xC5: case 0xC6: case 0xC7: return "hierarchical JPEG";
        case 0xC9: case 0xCA: case 0xCB: case 0xCD: case 0xCE: case 0xCF: return "arithmetic-coded JPEG";
        case 0xCC: return "arithmetic-coded JPEG (DAC)";
        case 0xDC: return "frame with deferred height (DNL)";
        case 0xDE: case 0xDF: return "hierarchical JPEG";
        default: return "unsupported JPEG process";
    }
}

class Parser {
public:
    explicit Parser(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    JpegImage run() {
        if (bytes_.size() < 2 || bytes_[0] != 0xFF || bytes_[1] != 0xD8) throw MalformedStream("missing SOI marker");
        pos_ = 2;
        for (;;) {
            const std::uint8_t marker = next_marker();
            if (marker == 0xD9) break;
            if (marker == 0xD8) throw MalformedStream("unexpected second SOI marker");
            if (marker >= 0xD0 && marker <= 0xD7) throw MalformedStream("restart marker outside a scan");
            if (marker == 0x01 || marker < 0xC0) throw MalformedStream("unexpected marker " + hex(marker));
            if (is_unsupported_frame(marker)) throw UnsupportedJpeg(describe_unsupported(marker));

            const auto payload = segment_payload(marker);
            if ((marker >= 0xE0 && marker <= 0xEF) || marker == 0xFE) {
                image_.preserved_segments.push_back({marker, {payload.begin(), payload.end()}});
                continue;
            }
            switch (marker) {
                case 0xDB: read_dqt(payload); break;
                case 0xC4: read_dht(payload); break;
                case 0xC0: read_sof(payload); break;
                case 0xDD: read_dri(payload); break;
                case 0xDA: read_scan(payload); break;
                default: throw MalformedStream("unexpected marker " + hex(marker));
            }
        }
        finish();
        return std::move(image_);
    }

private:
    std::uint8_t next_marker() {
        if (pos_ >= bytes_.size()) throw MalformedStream("stream ends before EOI");
        if (bytes_[pos_] != 0xFF) throw MalformedStream("expected a marker at offset " + std::to_string(pos_));
        while (pos_ < bytes_.size() && bytes_[pos_] == 0xFF) ++pos_;  // fill bytes
        if (pos_ >= bytes_.size()) throw MalformedStream("stream ends inside a marker");
        return bytes_[pos_++];
    }

    std::span<const std::uint8_t> segment_payload(std::uint8_t marker) {
        if (pos_ + 2 > bytes_.size()) throw MalformedStream("truncated length of segment " + hex(marker));
        const std::size_t len = (static_cast<std::size_t>(bytes_[pos_]) << 8) | bytes_[pos_ + 1];
        if (len < 2 || pos_ + len > bytes_.size()) throw MalformedStream("segment " + hex(marker) + " overruns the stream");
        auto payload = bytes_.subspan(pos_ + 2, len - 2);
        pos_ += len;
        return payload;
    }

    void read_dqt(std::span<const std::uint8_t> payload) {
        SegmentReader r(payload, 0xDB);
        do {
            const std::uint8_t pq_tq = r.u8();
            const int pq = pq_tq >> 4;
            const std::uint8_t tq = pq_tq & 15;
            if (pq > 1 || tq > 3) throw MalformedStream("invalid DQT table header");
            QuantTable table;
            table.precision_bits = pq == 0 ? 8 : 16;
            for (auto& e : table.entries) {
                e = pq == 0 ? r.u8() : r.u16();
                if (e == 0) throw MalformedStream("quantization table entry is zero");
            }
            auto it = image_.quant_tables.find(tq);
            if (it != image_.quant_tables.end() && !image_.scans.empty() && !(it->second == table)) {
                throw UnsupportedJpeg("quantization table redefined between scans");
            }
            image_.quant_tables[tq] = table;
        } while (!r.done());
    }

    void read_dht(std::span<const std::uint8_t> payload) {
        SegmentReader r(payload, 0xC4);
        do {
            const std::uint8_t tc_th = r.u8();
            const int tc = tc_th >> 4;
            const std::uint8_t th = tc_th & 15;
            if (tc > 1 || th > 3) throw MalformedStream("invalid DHT table header");
            HuffmanTable table;
            table.table_class = tc == 0 ? HuffmanClass::DC : HuffmanClass::AC;
            std::size_t total = 0;
            for (auto& c : table.counts) {
                c = r.u8();
                total += c;
            }
            if (total > 256) throw MalformedStream("Huffman table has more than 256 symbols");
            for (std::size_t i = 0; i < total; ++i) table.symbols.push_back(r.u8());
            detail::validate_huffman(table);

            const HuffmanKey key{table.table_class, th};
            auto it = image_.huffman_tables.find(key);
            if (it != image_.huffman_tables.end() && used_tables_.contains(key) && !(it->second == table)) {
                // One table set serves every scan on output.
                throw UnsupportedJpeg("Huffman table redefined between scans");
            }
            image_.huffman_tables[key] = std::move(table);
        } while (!r.done());
    }

    void read_sof(std::span<const std::uint8_t> payload) {
        if (frame_seen_) throw MalformedStream("more than one frame header");
        frame_seen_ = true;
        SegmentReader r(payload, 0xC0);
        auto& frame = image_.frame;
        frame.precision = r.u8();
        frame.height = r.u16();
        frame.width = r.u16();
        const int count = r.u8();
        if (frame.precision != 8) throw UnsupportedJpeg(std::to_string(frame.precision) + "-bit sample precision");
        if (frame.height == 0) throw UnsupportedJpeg("frame with deferred height (DNL)");
        if (frame.width == 0) throw MalformedStream("frame width is zero");
        if (count < 1 || count > 4) throw MalformedStream("frame must have 1 to 4 components");
        for (int i = 0; i < count; ++i) {
            FrameComponent c;
            c.id = r.u8();
            const std::uint8_t hv = r.u8();
            c.h_sampling = hv >> 4;
            c.v_sampling = hv & 15;
            c.quant_table = r.u8();
            if (c.h_sampling < 1 || c.h_sampling > 4 || c.v_sampling < 1 || c.v_sampling > 4) {
                throw MalformedStream("sampling factor out of range");
            }
            if (c.quant_table > 3) throw MalformedStream("quantization table selector out of range");
            for (const auto& other : frame.components) {
                if (other.id == c.id) throw MalformedStream("duplicate component id");
            }
            frame.components.push_back(c);
        }
        r.expect_done();
        image_.coeff_planes.resize(frame.components.size());
        scanned_.assign(frame.components.size(), false);
    }

    void read_dri(std::span<const std::uint8_t> payload) {
        SegmentReader r(payload, 0xDD);
        image_.restart_interval = r.u16();
        r.expect_done();
    }

    void read_scan(std::span<const std::uint8_t> payload) {
        if (!frame_seen_) throw MalformedStream("scan before frame header");
        SegmentReader r(payload, 0xDA);
        const int count = r.u8();
        if (count < 1 || count > 4) throw MalformedStream("scan must have 1 to 4 components");

        Scan scan;
        int blocks_per_mcu = 0;
        for (int i = 0; i < count; ++i) {
            const std::uint8_t id = r.u8();
            const std::uint8_t tables = r.u8();
            const auto& comps = image_.frame.components;
            auto it = std::find_if(comps.begin(), comps.end(), [id](const FrameComponent& c) { return c.id == id; });
            if (it == comps.end()) throw MalformedStream("scan references an unknown component");
            const auto index = static_cast<std::size_t>(it - comps.begin());
            if (scanned_[index]) throw MalformedStream("component coded in more than one scan");
            scanned_[index] = true;

            ScanComponent sc{index, static_cast<std::uint8_t>(tables >> 4), static_cast<std::uint8_t>(tables & 15)};
            if (!image_.huffman_tables.contains({HuffmanClass::DC, sc.dc_table}) ||
                !image_.huffman_tables.contains({HuffmanClass::AC, sc.ac_table})) {
                throw MalformedStream("scan references an undefined Huffman table");
            }
            if (!image_.quant_tables.contains(it->quant_table)) {
                throw MalformedStream("component references an undefined quantization table");
            }
            used_tables_.insert({HuffmanClass::DC, sc.dc_table});
            used_tables_.insert({HuffmanClass::AC, sc.ac_table});
            blocks_per_mcu += it->h_sampling * it->v_sampling;
            scan.components.push_back(sc);
        }
        const int ss = r.u8();
        const int se = r.u8();
        const int ahal = r.u8();
        r.expect_done();
        if (ss != 0 || se != 63 || ahal != 0) throw MalformedStream("spectral selection is not valid for a sequential scan");
        if (count > 1 && blocks_per_mcu > 10) throw MalformedStream("too many blocks per MCU");

        decode_scan(scan);
        image_.scans.push_back(std::move(scan));
    }

    void decode_scan(const Scan& scan) {
        const auto layout = detail::make_layout(image_.frame, scan);
        std::vector<HuffmanDecoder> dc;
        std::vector<HuffmanDecoder> ac;
        for (const auto& sc : scan.components) {
            dc.emplace_back(image_.huffman_tables.at({HuffmanClass::DC, sc.dc_table}));
            ac.emplace_back(image_.huffman_tables.at({HuffmanClass::AC, sc.ac_table}));
        }
        for (const auto& slot : layout.slots) {
            image_.coeff_planes[slot.component] = CoeffPlane(slot.plane_wide, slot.plane_high);
        }

        BitReader reader(bytes_, pos_);
        std::vector<std::int32_t> pred(scan.components.size(), 0);
        const auto interval = static_cast<std::size_t>(image_.restart_interval);
        std::size_t last_mcu = 0;
        int next_rst = 0;

        detail::for_each_block(layout, [&](std::size_t mcu, std::size_t s, std::size_t row, std::size_t col) {
            if (interval != 0 && mcu != 0 && mcu != last_mcu && mcu % interval == 0) {
                reader.align();
                std::size_t p = reader.position();
                if (p + 1 >= bytes_.size() || bytes_[p] != 0xFF) throw MalformedStream("missing restart marker");
                while (p < bytes_.size() && bytes_[p] == 0xFF) ++p;
                if (p >= bytes_.size() || bytes_[p] != 0xD0 + next_rst) throw MalformedStream("missing or out-of-order restart marker");
                reader.seek(p + 1);
                next_rst = (next_rst + 1) & 7;
                std::fill(pred.begin(), pred.end(), 0);
            }
            last_mcu = mcu;

            auto& block = image_.coeff_planes[layout.slots[s].component].at(row, col);
            decode_block(reader, dc[s], ac[s], pred[s], block);
        });

        reader.align();
        pos_ = reader.position();
    }

    static void decode_block(BitReader& reader, const HuffmanDecoder& dc, const HuffmanDecoder& ac, std::int32_t& pred,
                             CoeffBlock& block) {
        const int s = dc.decode(reader);
        if (s > 15) throw MalformedStream("DC magnitude category out of range");
        pred += detail::extend(reader.bits(s), s);
        if (pred > kMaxCoeffMagnitude || pred < -kMaxCoeffMagnitude) throw MalformedStream("DC coefficient out of range");
        block[0] = pred;

        for (int k = 1; k < kBlockCoeffs;) {
            const std::uint8_t rs = ac.decode(reader);
            const int run = rs >> 4;
            const int size = rs & 15;
            if (size == 0) {
                if (run != 15) break;  // EOB
                k += 16;
                if (k > kBlockCoeffs) throw MalformedStream("zero run extends past the end of the block");
                continue;
            }
            k += run;
            if (k >= kBlockCoeffs) throw MalformedStream("AC run extends past the end of the block");
            block[static_cast<std::size_t>(k)] = detail::extend(reader.bits(size), size);
            ++k;
        }
    }

    void finish() {
        if (!frame_seen_) throw MalformedStream("no frame header");
        if (image_.scans.empty()) throw MalformedStream("no scan data");
        for (bool done : scanned_) {
            if (!done) throw MalformedStream("a frame component is never coded");
        }
    }

    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
    JpegImage image_;
    bool frame_seen_ = false;
    std::vector<bool> scanned_;
    std::set<HuffmanKey> used_tables_;
};

}  // namespace

JpegImage parse(std::span<const std::uint8_t> bytes) { return Parser(bytes).run(); }

}  // namespace qimsteg::jpeg
