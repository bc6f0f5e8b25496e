#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "comonet/messages.hpp"

namespace comonet::wire {

class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Canonical flat byte encoding of a protocol message.
///
/// Layout: one type byte, then the fields in declaration order. Addresses are
/// 4 raw octets, integers are big-endian, booleans one byte (0/1), SimTime an
/// int64 of microseconds, and address lists a uint8 count followed by the
/// addresses. See docs/formats.md for the per-message tables.
std::vector<std::uint8_t> encode(const Message& m);

/// Throws DecodeError on unknown type, truncation, trailing bytes or
/// out-of-range field values.
Message decode(std::span<const std::uint8_t> bytes);

enum class Tag : std::uint8_t {
  kPathRequest = 1,
  kPathReply = 2,
  kHeartbeat = 3,
  kHeartbeatAck = 4,
  kPathError = 5,
  kMedia = 6,
};

}  // namespace comonet::wire
