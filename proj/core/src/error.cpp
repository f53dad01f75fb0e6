#include "dtwin/error.hpp"

namespace dtwin {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::OversizedPayload: return "OversizedPayload";
        case ErrorKind::FcsMismatch: return "FcsMismatch";
        case ErrorKind::Truncated: return "Truncated";
        case ErrorKind::UnknownSchema: return "UnknownSchema";
        case ErrorKind::MalformedPayload: return "MalformedPayload";
        case ErrorKind::MalformedFrame: return "MalformedFrame";
        case ErrorKind::ClientTimeout: return "ClientTimeout";
        case ErrorKind::RosterMismatch: return "RosterMismatch";
        case ErrorKind::Refused: return "Refused";
        case ErrorKind::TransportError: return "TransportError";
        case ErrorKind::ProtocolError: return "ProtocolError";
        case ErrorKind::SinkError: return "SinkError";
        case ErrorKind::SpawnError: return "SpawnError";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::ValidationError: return "ValidationError";
        case ErrorKind::MalformedTrace: return "MalformedTrace";
    }
    return "Unknown";
}

}  // namespace dtwin
