#include "comonet/address.hpp"

#include <charconv>
#include <fmt/format.h>

namespace comonet {

namespace {

constexpr int kFirstOctetBase = 128;
constexpr std::size_t kNumberLength = 10;

bool all_digits(std::string_view s) {
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

int group(std::string_view digits, std::size_t index) {
  return (digits[2 * index] - '0') * 10 + (digits[2 * index + 1] - '0');
}

}  // namespace

std::string CommunityAddress::str() const {
  return fmt::format("{}.{}.{}.{}", octets[0], octets[1], octets[2], octets[3]);
}

bool is_community_address(const CommunityAddress& a) {
  return a.octets[0] >= kFirstOctetBase && a.octets[0] <= kFirstOctetBase + 99 &&
         a.octets[1] <= 99 && a.octets[2] <= 99 && a.octets[3] <= 99;
}

CommunityAddress parse_community_address(std::string_view s) {
  CommunityAddress a;
  std::size_t pos = 0;
  for (int i = 0; i < 4; ++i) {
    const std::size_t end = i == 3 ? s.size() : s.find('.', pos);
    if (end == std::string_view::npos || end == pos || end - pos > 3) {
      throw AddressError(fmt::format("'{}' is not a dotted quad", s));
    }
    unsigned v = 0;
    const auto* first = s.data() + pos;
    const auto* last = s.data() + end;
    auto [p, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || p != last || v > 255) {
      throw AddressError(fmt::format("'{}' is not a dotted quad", s));
    }
    a.octets[i] = static_cast<std::uint8_t>(v);
    pos = end + 1;
  }
  if (!is_community_address(a)) {
    throw AddressError(fmt::format(
        "{} is not a community address (first octet must be 128..227, others 0..99)", s));
  }
  return a;
}

AddressCodec::AddressCodec(std::string common_prefix) : prefix_(std::move(common_prefix)) {
  if (prefix_.size() != 2 || !all_digits(prefix_)) {
    throw AddressError("common prefix must be exactly two decimal digits");
  }
}

PhoneNumber AddressCodec::parse_number(std::string_view digits) const {
  if (digits.size() != kNumberLength) {
    throw AddressError(fmt::format("phone number '{}' must have exactly 10 digits", digits));
  }
  if (!all_digits(digits)) {
    throw AddressError(fmt::format("phone number '{}' contains non-digit characters", digits));
  }
  if (digits.substr(0, 2) != prefix_) {
    throw AddressError(
        fmt::format("phone number '{}' does not start with the common prefix '{}'", digits, prefix_));
  }
  return PhoneNumber(std::string(digits));
}

CommunityAddress AddressCodec::encode(const PhoneNumber& n) const {
  const std::string_view d = n.digits();
  return CommunityAddress{{static_cast<std::uint8_t>(kFirstOctetBase + group(d, 1)),
                           static_cast<std::uint8_t>(group(d, 2)),
                           static_cast<std::uint8_t>(group(d, 3)),
                           static_cast<std::uint8_t>(group(d, 4))}};
}

PhoneNumber AddressCodec::decode(const CommunityAddress& a) const {
  if (!is_community_address(a)) {
    throw AddressError(fmt::format(
        "{} is not a community address (first octet must be 128..227, others 0..99)", a.str()));
  }
  return PhoneNumber(fmt::format("{}{:02d}{:02d}{:02d}{:02d}", prefix_, a.octets[0] - kFirstOctetBase,
                                 a.octets[1], a.octets[2], a.octets[3]));
}

}  // namespace comonet
