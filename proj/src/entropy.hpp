#pragma once

// Internal: Huffman tables, bit-level I/O and scan geometry shared by the
// parser and the serializer.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "qimsteg/errors.hpp"
#include "qimsteg/jpeg.hpp"

namespace qimsteg::jpeg::detail {

/// Throws MalformedStream unless the table describes a feasible canonical code.
void validate_huffman(const HuffmanTable& table);

class HuffmanDecoder {
public:
    explicit HuffmanDecoder(const HuffmanTable& table);

    template <typename Reader>
    std::uint8_t decode(Reader& reader) const {
        std::int32_t code = 0;
        for (int len = 1; len <= 16; ++len) {
            code = (code << 1) | static_cast<std::int32_t>(reader.bit());
            if (maxcode_[len] >= 0 && code <= maxcode_[len] && code >= mincode_[len]) {
                return symbols_[static_cast<std::size_t>(valptr_[len] + code - mincode_[len])];
            }
        }
        throw MalformedStream("invalid Huffman code in entropy-coded data");
    }

private:
    std::array<std::int32_t, 17> mincode_{};
    std::array<std::int32_t, 17> maxcode_{};
    std::array<std::int32_t, 17> valptr_{};
    std::vector<std::uint8_t> symbols_;
};

struct HuffmanCode {
    std::uint16_t code = 0;
    std::uint8_t length = 0;  // 0 = symbol absent from the table
};

std::array<HuffmanCode, 256> build_encoder(const HuffmanTable& table);

/// Length-limited (16 bit) optimal table for the given symbol frequencies,
/// with the all-ones code point reserved as T.81 requires.
HuffmanTable build_optimal_table(HuffmanClass table_class, const std::array<std::uint64_t, 256>& freq);

/// Reads entropy-coded bits, removing 0xFF00 stuffing. Running into a marker
/// while bits are still needed is a truncated stream.
class BitReader {
public:
    BitReader(std::span<const std::uint8_t> data, std::size_t pos) : data_(data), pos_(pos) {}

    std::uint32_t bit() {
        if (nbits_ == 0) fill();
        --nbits_;
        return (byte_ >> nbits_) & 1u;
    }

    std::uint32_t bits(int n) {
        std::uint32_t v = 0;
        for (int i = 0; i < n; ++i) v = (v << 1) | bit();
        return v;
    }

    /// Drops the remaining bits of the current byte (restart / end of scan).
    void align() { nbits_ = 0; }

    std::size_t position() const { return pos_; }
    void seek(std::size_t pos) {
        pos_ = pos;
        nbits_ = 0;
    }

private:
    void fill() {
        if (pos_ >= data_.size()) throw MalformedStream("entropy-coded data truncated");
        std::uint8_t b = data_[pos_];
        if (b == 0xFF) {
            if (pos_ + 1 >= data_.size()) throw MalformedStream("entropy-coded data truncated");
            if (data_[pos_ + 1] != 0x00) throw MalformedStream("marker found inside entropy-coded segment");
            pos_ += 2;
        } else {
            ++pos_;
        }
        byte_ = b;
        nbits_ = 8;
    }

    std::span<const std::uint8_t> data_;
    std::size_t pos_;
    std::uint32_t byte_ = 0;
    int nbits_ = 0;
};

class BitWriter {
public:
    explicit BitWriter(std::vector<std::uint8_t>& out) : out_(out) {}

    void put(std::uint32_t value, int nbits) {
        for (int i = nbits - 1; i >= 0; --i) {
            acc_ = static_cast<std::uint8_t>((acc_ << 1) | ((value >> i) & 1u));
            if (++count_ == 8) emit();
        }
    }

    /// Pads the final byte with 1-bits.
    void flush() {
        while (count_ != 0) put(1, 1);
    }

private:
    void emit() {
        out_.push_back(acc_);
        if (acc_ == 0xFF) out_.push_back(0x00);
        acc_ = 0;
        count_ = 0;
    }

    std::vector<std::uint8_t>& out_;
    std::uint8_t acc_ = 0;
    int count_ = 0;
};

/// Magnitude category (number of significant bits of |v|).
inline int magnitude_category(std::int32_t v) {
    std::uint32_t m = static_cast<std::uint32_t>(v < 0 ? -v : v);
    int s = 0;
    while (m != 0) {
        ++s;
        m >>= 1;
    }
    return s;
}

inline std::int32_t extend(std::uint32_t bits, int s) {
    if (s == 0) return 0;
    auto v = static_cast<std::int32_t>(bits);
    return v < (1 << (s - 1)) ? v - (1 << s) + 1 : v;
}

inline std::uint32_t magnitude_bits(std::int32_t v, int s) {
    return static_cast<std::uint32_t>(v >= 0 ? v : v + (1 << s) - 1) & ((1u << s) - 1u);
}

/// Block geometry of one scan: MCU grid plus, per scan component, the block
/// footprint inside an MCU and the size of its coefficient plane.
struct ScanLayout {
    struct Slot {
        std::size_t component = 0;
        int h = 1;  // blocks per MCU horizontally
        int v = 1;
        std::size_t plane_wide = 0;
        std::size_t plane_high = 0;
    };

    std::size_t mcus_x = 0;
    std::size_t mcus_y = 0;
    std::vector<Slot> slots;

    std::size_t mcu_count() const { return mcus_x * mcus_y; }
};

ScanLayout make_layout(const FrameHeader& frame, const Scan& scan);

/// Calls fn(mcu_index, slot_index, block_row, block_col) in bitstream order.
template <typename Fn>
void for_each_block(const ScanLayout& layout, Fn&& fn) {
    std::size_t mcu = 0;
    for (std::size_t my = 0; my < layout.mcus_y; ++my) {
        for (std::size_t mx = 0; mx < layout.mcus_x; ++mx, ++mcu) {
            for (std::size_t s = 0; s < layout.slots.size(); ++s) {
                const auto& slot = layout.slots[s];
                for (int v = 0; v < slot.v; ++v) {
                    for (int h = 0; h < slot.h; ++h) {
                        fn(mcu, s, my * static_cast<std::size_t>(slot.v) + static_cast<std::size_t>(v),
                           mx * static_cast<std::size_t>(slot.h) + static_cast<std::size_t>(h));
                    }
                }
            }
        }
    }
}

}  // namespace qimsteg::jpeg::detail
