#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace injectkit {

/// Failure categories surfaced by the library. The CLI maps each one to a
/// distinct exit code, so keep the order stable when adding entries.
enum class Errc {
    BadMagic,
    TruncatedRecord,
    UnsupportedLinkType,
    IoError,
    TruncatedHeader,
    FieldOverflow,
    EmptyCapture,
    UnknownHost,
    UnknownField,
    EmptyInput,
    EmptyDistribution,
    UnknownParameter,
    InvalidValue,
    EmptyBackground,
    AmbiguousTemplate,
    NoTcp,
    LengthMismatch,
    NoOpenPorts,
    PayloadTooLarge,
    CsvParse,
    UnboundBot,
    InsufficientHosts,
    UnknownAttack,
    Usage,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

} // namespace injectkit
