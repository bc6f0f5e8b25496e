#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace comonet {

class AddressError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A 10-digit mobile number whose first two-digit group is the shared trunk
/// prefix. Construct through AddressCodec::parse_number.
class PhoneNumber {
 public:
  const std::string& digits() const { return digits_; }
  auto operator<=>(const PhoneNumber&) const = default;

 private:
  friend class AddressCodec;
  explicit PhoneNumber(std::string d) : digits_(std::move(d)) {}
  std::string digits_;
};

/// Four-octet community address: a in [128, 227], b/c/d in [0, 99].
/// Also used as the node identity throughout the simulator.
struct CommunityAddress {
  std::array<std::uint8_t, 4> octets{};

  constexpr auto operator<=>(const CommunityAddress&) const = default;

  std::uint32_t as_u32() const {
    return (std::uint32_t{octets[0]} << 24) | (std::uint32_t{octets[1]} << 16) |
           (std::uint32_t{octets[2]} << 8) | std::uint32_t{octets[3]};
  }
  static CommunityAddress from_u32(std::uint32_t v) {
    return CommunityAddress{{static_cast<std::uint8_t>(v >> 24), static_cast<std::uint8_t>(v >> 16),
                             static_cast<std::uint8_t>(v >> 8), static_cast<std::uint8_t>(v)}};
  }

  /// Dotted form without zero padding, e.g. "201.3.14.70".
  std::string str() const;
};

/// Throws AddressError unless `s` is a dotted quad satisfying the community
/// address range rules.
CommunityAddress parse_community_address(std::string_view s);

/// Phone number <-> community address mapping.
///
/// The number is split into five two-digit groups. The first group is the
/// shared prefix and is dropped; the second group plus 128 becomes the first
/// octet and the remaining three groups become octets verbatim:
///   0773031470 -> 07 | 73 03 14 70 -> (128+73).3.14.70 = 201.3.14.70
class AddressCodec {
 public:
  explicit AddressCodec(std::string common_prefix = "07");

  const std::string& common_prefix() const { return prefix_; }

  PhoneNumber parse_number(std::string_view digits) const;
  CommunityAddress encode(const PhoneNumber& n) const;
  CommunityAddress encode(std::string_view digits) const { return encode(parse_number(digits)); }
  PhoneNumber decode(const CommunityAddress& a) const;

 private:
  std::string prefix_;
};

bool is_community_address(const CommunityAddress& a);

}  // namespace comonet

template <>
struct std::hash<comonet::CommunityAddress> {
  std::size_t operator()(const comonet::CommunityAddress& a) const noexcept {
    return std::hash<std::uint32_t>{}(a.as_u32());
  }
};
