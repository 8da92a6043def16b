#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace injectkit {

/// Raw text of the bundled data assets (compiled in from data/).
std::string_view port_frequency_csv() noexcept;
std::string_view iana_ports_csv() noexcept;

struct PortFrequency {
    std::uint16_t port = 0;
    double frequency = 0.0;
};

/// TCP port-frequency table, in file order.
const std::vector<PortFrequency>& port_frequency_table();

/// The `n` most frequent TCP ports; frequency ties go to the lower port.
std::vector<std::uint16_t> top_tcp_ports(std::size_t n);

/// True when the port appears in the bundled IANA assignment snapshot.
bool iana_assigned(std::uint16_t port);

} // namespace injectkit
