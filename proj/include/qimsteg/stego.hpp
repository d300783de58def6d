#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "qimsteg/jpeg.hpp"
#include "qimsteg/qim.hpp"

namespace qimsteg::stego {

/// Bits of the big-endian byte-length header that precedes every payload.
inline constexpr std::size_t kLengthHeaderBits = 32;

struct EmbedReport {
    std::size_t bits_embedded = 0;
    std::size_t blocks_used = 0;
    std::size_t capacity_bits = 0;
    std::map<int, std::size_t> step_histogram;  // q -> number of blocks that carried bits with it

    double mean_step() const;
};

struct EmbedResult {
    jpeg::JpegImage image;
    EmbedReport report;
};

/// Luma blocks times embedding-area size.
std::size_t capacity(const jpeg::JpegImage& image, const qim::StegoParams& params);

/// Bits needed for a payload of the given size, header included.
inline std::size_t framed_bits(std::size_t payload_bytes) { return kLengthHeaderBits + 8 * payload_bytes; }

/// Largest payload (bytes) that fits in `bits` embedded bits.
std::size_t payload_bytes_for(std::size_t bits);

/// Adaptive-step embedding. Luma blocks are filled in raster order; blocks
/// past the end of the message, chroma planes and all metadata are left as
/// they were. Throws InsufficientCapacity.
EmbedResult embed_message(const jpeg::JpegImage& cover, std::span<const std::uint8_t> payload,
                          const qim::StegoParams& params);

/// Throws LengthOutOfRange when the length header cannot be right.
std::vector<std::uint8_t> extract_message(const jpeg::JpegImage& stego, const qim::StegoParams& params);

/// Classical QIM baseline: the same framing and traversal with one step for
/// every block.
EmbedResult embed_message_fixed_q(const jpeg::JpegImage& cover, std::span<const std::uint8_t> payload,
                                  qim::StepValue q, const qim::StegoParams& params);

std::vector<std::uint8_t> extract_message_fixed_q(const jpeg::JpegImage& stego, qim::StepValue q,
                                                  const qim::StegoParams& params);

}  // namespace qimsteg::stego
