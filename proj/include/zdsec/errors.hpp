#pragma once

#include <stdexcept>
#include <string>

namespace zdsec {

// Malformed models, files or parameter combinations. CLI exit code 1.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Requested operating point lies outside the achievable set. CLI exit code 2.
struct InfeasibleTarget : std::runtime_error {
  explicit InfeasibleTarget(const std::string& what) : std::runtime_error(what) {}
};

// Exact enumeration would exceed the configured state budget. CLI exit code 3.
struct StateSpaceTooLarge : std::runtime_error {
  explicit StateSpaceTooLarge(const std::string& what) : std::runtime_error(what) {}
};

// No codeword is a prefix of the scanned bits.
struct NoCodewordPrefix : std::runtime_error {
  explicit NoCodewordPrefix(const std::string& what) : std::runtime_error(what) {}
};

// Decoder and key stream lost alignment (truncated or corrupted input).
struct DesyncError : std::runtime_error {
  explicit DesyncError(const std::string& what) : std::runtime_error(what) {}
};

// Replay bit tape ran out of material.
struct TapeExhausted : std::runtime_error {
  explicit TapeExhausted(const std::string& what) : std::runtime_error(what) {}
};

// Bounded bin search gave up before finding a candidate in the announced bin.
struct SwDecodeFailure : std::runtime_error {
  explicit SwDecodeFailure(const std::string& what) : std::runtime_error(what) {}
};

}
