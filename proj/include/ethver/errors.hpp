#pragma once

#include <stdexcept>
#include <string>

namespace ethver {

/// Base class for every error this library throws on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// -- gateway --------------------------------------------------------------

struct AllKeysExhausted : Error {
    AllKeysExhausted() : Error("every configured API key has spent its daily budget") {}
};

struct ApiError : Error {
    int status;
    ApiError(int status_, const std::string& message)
        : Error("api error (status " + std::to_string(status_) + "): " + message), status(status_) {}
};

struct ParseError : Error {
    using Error::Error;
};

struct TransportError : Error {
    using Error::Error;
};

struct FixtureMiss : Error {
    using Error::Error;
};

struct NotVerified : Error {
    explicit NotVerified(const std::string& address)
        : Error("no verified source for " + address) {}
};

// -- version linking ------------------------------------------------------

struct NoMatch : Error {
    using Error::Error;
};

struct AbiMismatch : Error {
    using Error::Error;
};

struct UnresolvedDeployer : Error {
    using Error::Error;
};

// -- lexing / metrics -----------------------------------------------------

struct BraceImbalance : Error {
    using Error::Error;
};

// -- statistics -----------------------------------------------------------

struct DegenerateSeries : Error {
    using Error::Error;
};

struct InsufficientData : Error {
    using Error::Error;
};

struct EmptyInput : Error {
    using Error::Error;
};

// -- dataset store --------------------------------------------------------

struct MalformedName : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

struct ConflictError : Error {
    using Error::Error;
};

} // namespace ethver
