#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace codenat {

// Base class for every toolkit error. Catch this to handle anything thrown
// by the library; catch the concrete types to branch on failure modes.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// --- code model ------------------------------------------------------------

struct UnlexableInput : Error {
    std::size_t offset;
    UnlexableInput(std::string msg, std::size_t at)
        : Error(std::move(msg)), offset(at) {}
};

struct SyntaxError : Error {
    std::size_t offset;  // byte offset of the first offending token
    SyntaxError(std::string msg, std::size_t at)
        : Error(std::move(msg)), offset(at) {}
};

struct UnsupportedLanguage : Error {
    using Error::Error;
};

struct UnknownIdentifier : Error {
    using Error::Error;
};

struct CaptureViolation : Error {
    using Error::Error;
};

struct KeywordCollision : Error {
    using Error::Error;
};

// --- victims ----------------------------------------------------------------

struct TransportError : Error {
    using Error::Error;
};

struct MalformedResponse : Error {
    using Error::Error;
};

struct KindMismatch : Error {
    using Error::Error;
};

struct MissingBaseline : Error {
    using Error::Error;
};

struct DegenerateCorpus : Error {
    using Error::Error;
};

// --- attacks ----------------------------------------------------------------

struct BudgetExhausted : Error {
    using Error::Error;
};

// --- metrics ----------------------------------------------------------------

struct NoIdentifiers : Error {
    using Error::Error;
};

struct LengthMismatch : Error {
    using Error::Error;
};

struct EmptyInput : Error {
    using Error::Error;
};

struct EmptyStream : Error {
    using Error::Error;
};

struct ParseRequired : Error {
    using Error::Error;
};

// --- judge ------------------------------------------------------------------

struct OverLengthInput : Error {
    using Error::Error;
};

struct Unparseable : Error {
    using Error::Error;
};

struct ScoreOutOfRange : Error {
    using Error::Error;
};

// --- stats ------------------------------------------------------------------

struct InvalidDistribution : Error {
    using Error::Error;
};

struct ConstantInput : Error {
    using Error::Error;
};

// --- cli/config ---------------------------------------------------------------

struct ConfigError : Error {
    using Error::Error;
};

}  // namespace codenat
