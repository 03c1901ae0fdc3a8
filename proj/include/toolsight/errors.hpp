#pragma once

#include <stdexcept>
#include <string>

namespace toolsight {

// Base for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Degenerate raster (zero width or height, bad pixel count).
struct InvalidRasterError : Error {
    using Error::Error;
};

// Resource id not present in the registry.
struct UnknownResourceError : Error {
    using Error::Error;
};

// Malformed tool arguments (bad geometry, color, thickness, ...).
struct InvalidArgsError : Error {
    using Error::Error;
};

// Transient transport failure; the caller may retry.
struct TransportError : Error {
    using Error::Error;
};

// Provider refusal / quota exhaustion; propagate immediately.
struct QuotaError : Error {
    using Error::Error;
};

// Model reply that cannot be parsed into tool calls or a final answer.
struct MalformedReplyError : Error {
    explicit MalformedReplyError(const std::string& what, std::string raw = {})
        : Error(what), raw_text(std::move(raw)) {}
    std::string raw_text;
};

// Replay backend saw a history that does not match the recording.
struct ReplayDivergenceError : Error {
    ReplayDivergenceError(const std::string& what, int round_idx)
        : Error(what), round(round_idx) {}
    int round;
};

// Replay recording ended before the run did.
struct ReplayExhaustedError : Error {
    ReplayExhaustedError(const std::string& what, int round_idx)
        : Error(what), round(round_idx) {}
    int round;
};

// Bad manifest, missing probe metadata, unwritable output, ...
struct ConfigError : Error {
    using Error::Error;
};

// Manifest/results ingestion problems.
struct IngestionError : Error {
    using Error::Error;
};

}  // namespace toolsight
