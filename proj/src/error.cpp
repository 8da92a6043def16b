#include "injectkit/error.hpp"

namespace injectkit {

std::string_view errc_name(Errc code) noexcept {
    switch (code) {
    case Errc::BadMagic: return "BadMagic";
    case Errc::TruncatedRecord: return "TruncatedRecord";
    case Errc::UnsupportedLinkType: return "UnsupportedLinkType";
    case Errc::IoError: return "IoError";
    case Errc::TruncatedHeader: return "TruncatedHeader";
    case Errc::FieldOverflow: return "FieldOverflow";
    case Errc::EmptyCapture: return "EmptyCapture";
    case Errc::UnknownHost: return "UnknownHost";
    case Errc::UnknownField: return "UnknownField";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::EmptyDistribution: return "EmptyDistribution";
    case Errc::UnknownParameter: return "UnknownParameter";
    case Errc::InvalidValue: return "InvalidValue";
    case Errc::EmptyBackground: return "EmptyBackground";
    case Errc::AmbiguousTemplate: return "AmbiguousTemplate";
    case Errc::NoTcp: return "NoTcp";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::NoOpenPorts: return "NoOpenPorts";
    case Errc::PayloadTooLarge: return "PayloadTooLarge";
    case Errc::CsvParse: return "CsvParse";
    case Errc::UnboundBot: return "UnboundBot";
    case Errc::InsufficientHosts: return "InsufficientHosts";
    case Errc::UnknownAttack: return "UnknownAttack";
    case Errc::Usage: return "Usage";
    }
    return "Unknown";
}

} // namespace injectkit
