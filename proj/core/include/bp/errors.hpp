#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace bp {

/// Base class for every error raised by the batchpost core library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// --- configuration -----------------------------------------------------

/// Malformed JSON in a config document.
class SyntaxError : public Error {
public:
    using Error::Error;
};

/// Structurally valid JSON that violates the config schema.
class SchemaError : public Error {
public:
    using Error::Error;
};

// --- planning -----------------------------------------------------------

/// Pipeline references form a cycle (including a self-reference).
class CycleError : public Error {
public:
    using Error::Error;
};

/// A pipeline_taskid points at a task that does not exist.
class DanglingReferenceError : public Error {
public:
    using Error::Error;
};

// --- jpeg / media -------------------------------------------------------

/// Broken JPEG marker framing (truncated segment, bad marker, ...).
class MalformedJpeg : public Error {
public:
    using Error::Error;
};

/// A syntactically fine JPEG stream that carries no DQT segment.
class NoTables : public Error {
public:
    using Error::Error;
};

/// Input bytes could not be decoded as a JPEG image.
class DecodeError : public Error {
public:
    using Error::Error;
};

// --- io / state ---------------------------------------------------------

class IoError : public Error {
public:
    using Error::Error;
};

/// Job status or map files are unusable for resume.
class CorruptState : public Error {
public:
    using Error::Error;
};

/// A task state transition the status state machine forbids.
class IllegalTransition : public Error {
public:
    using Error::Error;
};

/// An API used against its documented contract (e.g. a session after
/// disconnect, or a map entry violating its own invariants).
class ContractViolation : public Error {
public:
    using Error::Error;
};

/// An argument outside its documented domain.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Unrecoverable job failure: policy resolved to Terminate, or
/// recordkeeping broke underneath the engine.
class FatalError : public Error {
public:
    using Error::Error;
};

/// Requested listen port is unavailable.
class BindError : public Error {
public:
    using Error::Error;
};

/// A platform code registered twice.
class DuplicateCode : public Error {
public:
    using Error::Error;
};

// --- platform interaction -----------------------------------------------

/// Login rejected by the platform.
class AuthError : public Error {
public:
    using Error::Error;
};

/// Endpoint unreachable or the connection died mid-request.
class NetworkIssue : public Error {
public:
    using Error::Error;
};

/// Media id unknown to the platform (expired, forged, lost).
class NotFoundError : public Error {
public:
    using Error::Error;
};

/// Upload rejected because the platform hit its rate limit.
/// Carries the platform-supplied Retry-After when one was given.
class RateLimitIssue : public Error {
public:
    explicit RateLimitIssue(const std::string& msg,
                            std::optional<int> retry_after = std::nullopt)
        : Error(msg), retry_after_s(retry_after) {}

    std::optional<int> retry_after_s;
};

} // namespace bp
