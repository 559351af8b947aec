// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace taskforge {

/// Base class for every error raised by the pipeline.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgumentError : public Error {
public:
    using Error::Error;
};

class NotFoundError : public Error {
public:
    using Error::Error;
};

/// Tool execution failed (fetch, extraction) with an underlying cause.
class ToolError : public Error {
public:
    using Error::Error;
};

class EmptyContextError : public Error {
public:
    using Error::Error;
};

/// Closed-world scripted backend has no entry for the request.
class ScriptedMissError : public Error {
public:
    using Error::Error;
};

class EmptyOutputError : public Error {
public:
    using Error::Error;
};

/// Transport-level provider failure; safe to retry.
class RetryableError : public Error {
public:
    using Error::Error;
};

/// Per-run call or token budget exceeded; the run must abort cleanly.
class BudgetError : public Error {
public:
    using Error::Error;
};

class TemplateError : public Error {
public:
    using Error::Error;
};

class StructuredParseError : public Error {
public:
    using Error::Error;
};

class ComposeError : public Error {
public:
    using Error::Error;
};

class ExtensionExhaustedError : public Error {
public:
    using Error::Error;
};

class MergeError : public Error {
public:
    using Error::Error;
};

class VerificationError : public Error {
public:
    using Error::Error;
};

class ConflictError : public Error {
public:
    using Error::Error;
};

class DependencyError : public Error {
public:
    using Error::Error;
};

class AccountingError : public Error {
public:
    using Error::Error;
};

class EmitError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace taskforge
