#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace injectkit {

/// IPv4 address held in host byte order so that numeric ordering matches
/// dotted-quad ordering.
struct Ipv4Address {
    std::uint32_t value = 0;

    constexpr Ipv4Address() = default;
    constexpr explicit Ipv4Address(std::uint32_t v) : value(v) {}
    constexpr Ipv4Address(std::uint8_t a, std::uint8_t b, std::uint8_t c, std::uint8_t d)
        : value((std::uint32_t{a} << 24) | (std::uint32_t{b} << 16) | (std::uint32_t{c} << 8) | d) {}

    static std::optional<Ipv4Address> parse(std::string_view text);
    std::string to_string() const;

    friend constexpr auto operator<=>(Ipv4Address, Ipv4Address) = default;
};

struct MacAddress {
    std::array<std::uint8_t, 6> bytes{};

    static std::optional<MacAddress> parse(std::string_view text);
    std::string to_string() const;

    /// Locally administered unicast address derived from a 64-bit key.
    static MacAddress local_from(std::uint64_t key);

    friend constexpr auto operator<=>(const MacAddress&, const MacAddress&) = default;
};

} // namespace injectkit

template <>
struct std::hash<injectkit::Ipv4Address> {
    std::size_t operator()(injectkit::Ipv4Address a) const noexcept {
        return std::hash<std::uint32_t>{}(a.value);
    }
};
