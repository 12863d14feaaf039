#ifndef TSCAUSAL_CORE_ERROR_HPP
#define TSCAUSAL_CORE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace tscausal {

enum class Errc {
    InvalidArgument = 1,
    IllegalMark,
    DuplicateEdge,
    LagOutOfRange,
    HorizonTooShort,
    NodeNotFound,
    RetriesExhausted,
    Diverged,
    BadLatentIndex,
    InsufficientSamples,
    SingularRegression,
    ShapeMismatch,
    EmptyInput,
    UnknownFixture,
    ParseError,
    IoError,
};

inline const char* errc_name(Errc c) {
    switch (c) {
        case Errc::InvalidArgument: return "InvalidArgument";
        case Errc::IllegalMark: return "IllegalMark";
        case Errc::DuplicateEdge: return "DuplicateEdge";
        case Errc::LagOutOfRange: return "LagOutOfRange";
        case Errc::HorizonTooShort: return "HorizonTooShort";
        case Errc::NodeNotFound: return "NodeNotFound";
        case Errc::RetriesExhausted: return "RetriesExhausted";
        case Errc::Diverged: return "Diverged";
        case Errc::BadLatentIndex: return "BadLatentIndex";
        case Errc::InsufficientSamples: return "InsufficientSamples";
        case Errc::SingularRegression: return "SingularRegression";
        case Errc::ShapeMismatch: return "ShapeMismatch";
        case Errc::EmptyInput: return "EmptyInput";
        case Errc::UnknownFixture: return "UnknownFixture";
        case Errc::ParseError: return "ParseError";
        case Errc::IoError: return "IoError";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& msg)
        : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& msg) { throw Error(code, msg); }

}  // namespace tscausal

#endif
