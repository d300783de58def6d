#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qimsteg {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Truncated or garbled marker segments or entropy-coded data.
class MalformedStream : public Error {
public:
    using Error::Error;
};

/// Well-formed JPEG that is not baseline sequential Huffman 8-bit.
class UnsupportedJpeg : public Error {
public:
    using Error::Error;
};

/// A coefficient (or DC difference) needs a magnitude category above 15.
class EncodingOverflow : public Error {
public:
    using Error::Error;
};

class InsufficientCapacity : public Error {
public:
    InsufficientCapacity(std::size_t needed_bits, std::size_t available_bits)
        : Error("message needs " + std::to_string(needed_bits) + " bits but the cover holds only " +
                std::to_string(available_bits)),
          needed(needed_bits),
          available(available_bits) {}

    std::size_t needed;
    std::size_t available;
};

/// The embedded length header does not fit the remaining capacity: no message,
/// a different cover, or mismatched parameters.
class LengthOutOfRange : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class RangeMismatch : public Error {
public:
    using Error::Error;
};

}  // namespace qimsteg
