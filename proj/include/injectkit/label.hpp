#pragma once

#include <cstdint>
#include <string>

#include "injectkit/pcap_io.hpp"

namespace injectkit {

/// Ground-truth record for one injected attack.
struct LabelEntry {
    std::string attack_name;
    TimeUs start_ts = 0;
    TimeUs end_ts = 0;
    std::uint64_t packet_count = 0;
    std::string params_digest;

    bool operator==(const LabelEntry&) const = default;
};

} // namespace injectkit
