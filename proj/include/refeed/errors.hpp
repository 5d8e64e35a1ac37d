#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace refeed {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when corpus ingestion hits a malformed or duplicate record.
class IngestError : public Error {
public:
    using Error::Error;
};

/// Raised when a dataset line violates the expected record schema.
class SchemaError : public Error {
public:
    using Error::Error;
};

/// Lookup of an id that is not present in the store or index.
class NotFoundError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration (run config, script file, template).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A backend was asked for something its capabilities rule out.
class CapabilityError : public Error {
public:
    using Error::Error;
};

/// Transport or protocol failure from an LM backend. `retryable` drives the
/// retry policy; `retry_after_seconds` carries a server-advised delay.
class BackendError : public Error {
public:
    BackendError(const std::string& what, bool retryable,
                 std::optional<double> retry_after_seconds = std::nullopt)
        : Error(what), retryable_(retryable), retry_after_seconds_(retry_after_seconds) {}

    bool retryable() const noexcept { return retryable_; }
    std::optional<double> retry_after_seconds() const noexcept { return retry_after_seconds_; }

private:
    bool retryable_;
    std::optional<double> retry_after_seconds_;
};

/// Prompt does not fit the backend context window. Never retryable.
class ContextOverflowError : public BackendError {
public:
    ContextOverflowError(const std::string& what, int limit)
        : BackendError(what, /*retryable=*/false), limit_(limit) {}

    int limit() const noexcept { return limit_; }

private:
    int limit_;
};

/// Wraps an error raised inside a pipeline stage with the stage name.
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& what)
        : Error("[" + stage + "] " + what), stage_(std::move(stage)) {}

    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

}  // namespace refeed
