#include "qimsteg/qim.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>

namespace qimsteg::qim {

StepValue::StepValue(int q) : q_(q) {
    if (q < 2 || q % 2 != 0) throw std::invalid_argument("quantization step must be even and >= 2, got " + std::to_string(q));
}

void StegoParams::validate() const {
    if (split_index < 2 || split_index > 63) throw std::invalid_argument("split index must be in 2..63");
    if (q_min < 2 || q_min % 2 != 0) throw std::invalid_argument("q_min must be even and >= 2");
    if (q_max < q_min || q_max % 2 != 0) throw std::invalid_argument("q_max must be even and >= q_min");
}

std::int32_t embed_coeff(std::int32_t c, StepValue q, MessageBit b) {
    const std::int32_t mag = c < 0 ? -c : c;
    const std::int32_t snapped = q.value() * (mag / q.value()) + q.half() * static_cast<std::int32_t>(to_int(b));
    return c < 0 ? -snapped : snapped;
}

MessageBit extract_coeff(std::int32_t c, StepValue q, MessageBit tie_bit) {
    const std::int32_t mag = c < 0 ? -c : c;
    const std::int32_t zero_point = q.value() * (mag / q.value());
    const std::int32_t one_point = zero_point + q.half();
    const std::int32_t d0 = mag - zero_point;
    const std::int32_t d1 = mag > one_point ? mag - one_point : one_point - mag;
    if (d0 == d1) return tie_bit;
    return d0 < d1 ? MessageBit::Zero : MessageBit::One;
}

StepValue select_step(std::span<const std::int32_t> non_embedding_coeffs, const StegoParams& params) {
    if (non_embedding_coeffs.empty()) throw std::invalid_argument("select_step needs at least one coefficient");

    std::map<std::int32_t, std::size_t> freq;  // ordered: ties resolve to the smallest value
    for (auto c : non_embedding_coeffs) ++freq[c < 0 ? -c : c];

    std::int32_t rarest = 0;
    std::size_t rarest_count = non_embedding_coeffs.size() + 1;
    for (const auto& [value, count] : freq) {
        if (count < rarest_count) {
            rarest = value;
            rarest_count = count;
        }
    }

    std::int32_t q = std::max(rarest, params.q_min);
    if (q % 2 != 0) ++q;
    return StepValue(std::clamp(q, params.q_min, params.q_max));
}

StepValue block_step(const jpeg::CoeffBlock& block, const StegoParams& params) {
    return select_step(std::span(block.coeffs).subspan(1, static_cast<std::size_t>(params.split_index - 1)), params);
}

BitQueue BitQueue::from_bytes(std::span<const std::uint8_t> bytes) {
    std::vector<MessageBit> bits;
    bits.reserve(bytes.size() * 8);
    for (auto byte : bytes) {
        for (int i = 7; i >= 0; --i) bits.push_back(to_bit((byte >> i) & 1u));
    }
    return BitQueue(std::move(bits));
}

jpeg::CoeffBlock embed_block(const jpeg::CoeffBlock& block, BitQueue& bits, const StegoParams& params) {
    if (bits.empty()) return block;
    return embed_block_with_step(block, bits, block_step(block, params), params);
}

jpeg::CoeffBlock embed_block_with_step(const jpeg::CoeffBlock& block, BitQueue& bits, StepValue q,
                                       const StegoParams& params) {
    jpeg::CoeffBlock out = block;
    for (int k = params.split_index; k < jpeg::kBlockCoeffs && !bits.empty(); ++k) {
        out[static_cast<std::size_t>(k)] = embed_coeff(block[static_cast<std::size_t>(k)], q, bits.pop());
    }
    return out;
}

std::vector<MessageBit> extract_block(const jpeg::CoeffBlock& block, std::size_t count, const StegoParams& params) {
    if (count == 0) return {};
    return extract_block_with_step(block, count, block_step(block, params), params);
}

std::vector<MessageBit> extract_block_with_step(const jpeg::CoeffBlock& block, std::size_t count, StepValue q,
                                                const StegoParams& params) {
    if (count > static_cast<std::size_t>(params.embedding_area_size())) {
        throw std::invalid_argument("more bits requested than the embedding area holds");
    }
    std::vector<MessageBit> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back(extract_coeff(block[static_cast<std::size_t>(params.split_index) + i], q, params.tie_bit));
    }
    return out;
}

}  // namespace qimsteg::qim
