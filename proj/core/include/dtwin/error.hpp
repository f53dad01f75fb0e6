#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dtwin {

enum class ErrorKind {
    // wire
    OversizedPayload,
    FcsMismatch,
    Truncated,
    UnknownSchema,
    MalformedPayload,
    MalformedFrame,
    // session / transport
    ClientTimeout,
    RosterMismatch,
    Refused,
    TransportError,
    ProtocolError,
    SinkError,
    SpawnError,
    // configuration and post-processing
    ParseError,
    ValidationError,
    MalformedTrace,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries one of the kinds above so
/// callers can branch without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), detail_(what) {}

    ErrorKind kind() const noexcept { return kind_; }
    /// The message without the kind prefix.
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorKind kind_;
    std::string detail_;
};

}  // namespace dtwin
