#pragma once

// Quantization index modulation on quantized DCT coefficients.
//
// A bit b is written into coefficient c by snapping |c| onto the lattice
// q*floor(|c|/q) + b*q/2 and reapplying the sign (sign of 0 is +). The step q
// of a block is derived from the block's own low-frequency AC coefficients,
// which embedding never touches, so the extractor can recompute it without
// any side information.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "qimsteg/jpeg.hpp"

namespace qimsteg::qim {

enum class MessageBit : std::uint8_t { Zero = 0, One = 1 };

inline MessageBit to_bit(unsigned v) { return v ? MessageBit::One : MessageBit::Zero; }
inline unsigned to_int(MessageBit b) { return static_cast<unsigned>(b); }

/// Even quantization step >= 2.
class StepValue {
public:
    /// Throws std::invalid_argument unless q is even and >= 2.
    explicit StepValue(int q);

    int value() const { return q_; }
    int half() const { return q_ / 2; }

    auto operator<=>(const StepValue&) const = default;

private:
    int q_;
};

struct StegoParams {
    static constexpr int kDefaultSplitIndex = 21;
    static constexpr int kDefaultQMin = 2;
    static constexpr int kDefaultQMax = 32;

    int split_index = kDefaultSplitIndex;  // zigzag indices split_index..63 carry bits
    int q_min = kDefaultQMin;
    int q_max = kDefaultQMax;
    MessageBit tie_bit = MessageBit::Zero;

    /// Throws std::invalid_argument when an invariant is violated.
    void validate() const;

    int embedding_area_size() const { return jpeg::kBlockCoeffs - split_index; }
};

std::int32_t embed_coeff(std::int32_t c, StepValue q, MessageBit b);
MessageBit extract_coeff(std::int32_t c, StepValue q, MessageBit tie_bit = MessageBit::Zero);

/// Step rule: among the absolute values of the non-embedding coefficients,
/// take the smallest of those occurring least often, round it up to even and
/// clamp it to [q_min, q_max].
StepValue select_step(std::span<const std::int32_t> non_embedding_coeffs, const StegoParams& params);

/// Step for a block, computed from zigzag indices 1..split_index-1.
StepValue block_step(const jpeg::CoeffBlock& block, const StegoParams& params);

/// FIFO of message bits consumed block by block.
class BitQueue {
public:
    BitQueue() = default;
    explicit BitQueue(std::vector<MessageBit> bits) : bits_(std::move(bits)) {}

    static BitQueue from_bytes(std::span<const std::uint8_t> bytes);  // MSB first

    void push(MessageBit b) { bits_.push_back(b); }
    bool empty() const { return next_ == bits_.size(); }
    std::size_t size() const { return bits_.size() - next_; }
    MessageBit pop() { return bits_[next_++]; }

private:
    std::vector<MessageBit> bits_;
    std::size_t next_ = 0;
};

/// Embeds bits from the front of the queue into zigzag indices
/// split_index..63 (ascending) using the block's adaptive step. Consumes
/// min(bits.size(), 64 - split_index) bits.
jpeg::CoeffBlock embed_block(const jpeg::CoeffBlock& block, BitQueue& bits, const StegoParams& params);

/// Same, with a caller-supplied step (classical fixed-step QIM).
jpeg::CoeffBlock embed_block_with_step(const jpeg::CoeffBlock& block, BitQueue& bits, StepValue q,
                                       const StegoParams& params);

std::vector<MessageBit> extract_block(const jpeg::CoeffBlock& block, std::size_t count, const StegoParams& params);
std::vector<MessageBit> extract_block_with_step(const jpeg::CoeffBlock& block, std::size_t count, StepValue q,
                                                const StegoParams& params);

}  // namespace qimsteg::qim
