#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "comonet/address.hpp"
#include "comonet/random.hpp"

using comonet::AddressCodec;
using comonet::AddressError;
using comonet::CommunityAddress;

namespace {

// Independent oracle: slice the digits after the prefix into two-digit
// groups; the first is offset by 128.
std::string oracle_encode(const std::string& n) {
  const int g1 = std::stoi(n.substr(2, 2));
  return std::to_string(128 + g1) + "." + std::to_string(std::stoi(n.substr(4, 2))) + "." +
         std::to_string(std::stoi(n.substr(6, 2))) + "." + std::to_string(std::stoi(n.substr(8, 2)));
}

}  // namespace

TEST_CASE("worked examples") {
  const AddressCodec codec;
  CHECK(codec.encode("0773031470").str() == "201.3.14.70");
  CHECK(codec.encode("0712345678").str() == "140.34.56.78");
  CHECK(codec.encode("0712345678").str() == oracle_encode("0712345678"));
  CHECK(codec.decode(comonet::parse_community_address("201.3.14.70")).digits() == "0773031470");
  CHECK(codec.encode("0700000000").str() == "128.0.0.0");
  CHECK(codec.encode("0799999999").str() == "227.99.99.99");
}

TEST_CASE("random numbers round-trip and agree with the slicing oracle") {
  const AddressCodec codec;
  comonet::RandomStream rng(2024);
  for (int i = 0; i < 10000; ++i) {
    std::string n = "07";
    for (int d = 0; d < 8; ++d) n += static_cast<char>('0' + rng.uniform_int(0, 9));
    const auto a = codec.encode(n);
    REQUIRE(a.str() == oracle_encode(n));
    REQUIRE(codec.decode(a).digits() == n);
    REQUIRE(CommunityAddress::from_u32(a.as_u32()) == a);
  }
}

TEST_CASE("other prefixes") {
  const AddressCodec codec("09");
  CHECK(codec.encode("0912345678").str() == "140.34.56.78");
  CHECK(codec.decode(codec.encode("0912345678")).digits() == "0912345678");
  CHECK_THROWS_AS(codec.encode("0712345678"), AddressError);
  CHECK_THROWS_AS(AddressCodec("7"), AddressError);
  CHECK_THROWS_AS(AddressCodec("0a"), AddressError);
}

TEST_CASE("invalid numbers are rejected") {
  const AddressCodec codec;
  CHECK_THROWS_AS(codec.encode("071234567"), AddressError);
  CHECK_THROWS_AS(codec.encode("07123456789"), AddressError);
  CHECK_THROWS_AS(codec.encode("07123x5678"), AddressError);
  CHECK_THROWS_AS(codec.encode("0812345678"), AddressError);
  CHECK_THROWS_AS(codec.encode(""), AddressError);
}

TEST_CASE("addresses outside the numbering plan are rejected") {
  const AddressCodec codec;
  CHECK_THROWS_AS(comonet::parse_community_address("127.0.0.0"), AddressError);
  CHECK_THROWS_AS(comonet::parse_community_address("228.0.0.0"), AddressError);
  CHECK_THROWS_AS(comonet::parse_community_address("130.100.0.0"), AddressError);
  CHECK_THROWS_AS(comonet::parse_community_address("130.1.2"), AddressError);
  CHECK_THROWS_AS(comonet::parse_community_address("130.1.2.3.4"), AddressError);
  CHECK_THROWS_AS(comonet::parse_community_address("130..2.3"), AddressError);
  CHECK_THROWS_AS(comonet::parse_community_address("130.1.2.-3"), AddressError);
  CHECK_THROWS_AS(codec.decode(CommunityAddress{{10, 0, 0, 1}}), AddressError);
  CHECK_FALSE(comonet::is_community_address(CommunityAddress{{200, 5, 99, 100}}));
}
