#include "qimsteg/stego.hpp"

#include <limits>
#include <string>

#include "qimsteg/errors.hpp"

namespace qimsteg::stego {

namespace {

using qim::MessageBit;
using qim::StegoParams;
using qim::StepValue;

std::vector<std::uint8_t> frame_payload(std::span<const std::uint8_t> payload) {
    if (payload.size() > std::numeric_limits<std::uint32_t>::max()) {
        throw std::invalid_argument("payload must be shorter than 2^32 bytes");
    }
    const auto n = static_cast<std::uint32_t>(payload.size());
    std::vector<std::uint8_t> framed{static_cast<std::uint8_t>(n >> 24), static_cast<std::uint8_t>(n >> 16),
                                     static_cast<std::uint8_t>(n >> 8), static_cast<std::uint8_t>(n)};
    framed.insert(framed.end(), payload.begin(), payload.end());
    return framed;
}

/// nullopt selects the adaptive step per block.
EmbedResult embed_impl(const jpeg::JpegImage& cover, std::span<const std::uint8_t> payload,
                       std::optional<StepValue> fixed_q, const StegoParams& params) {
    params.validate();
    const std::size_t available = capacity(cover, params);
    const std::size_t needed = framed_bits(payload.size());
    if (needed > available) throw InsufficientCapacity(needed, available);

    EmbedResult result{cover, {}};
    result.report.capacity_bits = available;

    auto bits = qim::BitQueue::from_bytes(frame_payload(payload));
    for (auto& block : result.image.luma().blocks) {
        if (bits.empty()) break;
        const StepValue q = fixed_q ? *fixed_q : qim::block_step(block, params);
        const std::size_t before = bits.size();
        block = qim::embed_block_with_step(block, bits, q, params);
        result.report.bits_embedded += before - bits.size();
        ++result.report.blocks_used;
        ++result.report.step_histogram[q.value()];
    }
    return result;
}

class BlockBitSource {
public:
    BlockBitSource(const jpeg::JpegImage& image, std::optional<StepValue> fixed_q, const StegoParams& params)
        : blocks_(image.luma().blocks), fixed_q_(fixed_q), params_(params) {}

    std::size_t remaining_capacity() const {
        return (blocks_.size() - next_block_) * static_cast<std::size_t>(params_.embedding_area_size()) + (buffer_.size() - buffer_pos_);
    }

    std::uint64_t read(std::size_t nbits) {
        std::uint64_t v = 0;
        for (std::size_t i = 0; i < nbits; ++i) v = (v << 1) | qim::to_int(next_bit());
        return v;
    }

    void read_bytes(std::vector<std::uint8_t>& out, std::size_t count) {
        out.reserve(count);
        for (std::size_t i = 0; i < count; ++i) out.push_back(static_cast<std::uint8_t>(read(8)));
    }

private:
    MessageBit next_bit() {
        if (buffer_pos_ == buffer_.size()) {
            const auto& block = blocks_[next_block_++];
            const auto count = static_cast<std::size_t>(params_.embedding_area_size());
            buffer_ = fixed_q_ ? qim::extract_block_with_step(block, count, *fixed_q_, params_)
                               : qim::extract_block(block, count, params_);
            buffer_pos_ = 0;
        }
        return buffer_[buffer_pos_++];
    }

    const std::vector<jpeg::CoeffBlock>& blocks_;
    std::optional<StepValue> fixed_q_;
    const StegoParams& params_;
    std::size_t next_block_ = 0;
    std::vector<MessageBit> buffer_;
    std::size_t buffer_pos_ = 0;
};

std::vector<std::uint8_t> extract_impl(const jpeg::JpegImage& stego, std::optional<StepValue> fixed_q,
                                       const StegoParams& params) {
    params.validate();
    if (capacity(stego, params) < kLengthHeaderBits) {
        throw LengthOutOfRange("image too small to hold a length header");
    }
    BlockBitSource source(stego, fixed_q, params);
    const std::uint64_t length = source.read(kLengthHeaderBits);
    const std::size_t remaining = source.remaining_capacity();
    if (length > remaining / 8) {
        throw LengthOutOfRange("length header announces " + std::to_string(length) + " bytes but only " +
                               std::to_string(remaining / 8) + " fit: no message found or wrong parameters");
    }
    std::vector<std::uint8_t> payload;
    source.read_bytes(payload, static_cast<std::size_t>(length));
    return payload;
}

}  // namespace

double EmbedReport::mean_step() const {
    std::size_t blocks = 0;
    double sum = 0.0;
    for (const auto& [q, n] : step_histogram) {
        sum += static_cast<double>(q) * static_cast<double>(n);
        blocks += n;
    }
    return blocks == 0 ? 0.0 : sum / static_cast<double>(blocks);
}

std::size_t capacity(const jpeg::JpegImage& image, const StegoParams& params) {
    params.validate();
    return image.luma().blocks.size() * static_cast<std::size_t>(params.embedding_area_size());
}

std::size_t payload_bytes_for(std::size_t bits) { return bits < kLengthHeaderBits ? 0 : (bits - kLengthHeaderBits) / 8; }

EmbedResult embed_message(const jpeg::JpegImage& cover, std::span<const std::uint8_t> payload, const StegoParams& params) {
    return embed_impl(cover, payload, std::nullopt, params);
}

std::vector<std::uint8_t> extract_message(const jpeg::JpegImage& stego, const StegoParams& params) {
    return extract_impl(stego, std::nullopt, params);
}

EmbedResult embed_message_fixed_q(const jpeg::JpegImage& cover, std::span<const std::uint8_t> payload, StepValue q,
                                  const StegoParams& params) {
    return embed_impl(cover, payload, q, params);
}

std::vector<std::uint8_t> extract_message_fixed_q(const jpeg::JpegImage& stego, StepValue q, const StegoParams& params) {
    return extract_impl(stego, q, params);
}

}  // namespace qimsteg::stego
