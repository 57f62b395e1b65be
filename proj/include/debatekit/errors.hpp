#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace debatekit {

// Caller broke an operation's precondition (bad arguments, bad config).
struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Debate protocol contract broken (wrong response count, round mismatch, ...).
struct ProtocolError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Tensor / pipeline shape mismatch. Carries the failing stage in the message.
struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Rendered history needs more pages than the layout allows.
struct RenderOverflowError : std::runtime_error {
    RenderOverflowError(std::string msg, int required_pages_)
        : std::runtime_error(std::move(msg)), required_pages(required_pages_) {}
    int required_pages;
};

// Chat backend failures, split so the debate loop can react to each kind.
struct BackendError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct AuthError : BackendError {
    using BackendError::BackendError;
};
struct ContextLengthError : BackendError {
    using BackendError::BackendError;
};

// Non-finite value showed up in a numeric pipeline.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Toy training diverged; carries the loss trajectory up to the failure.
struct TrainingError : std::runtime_error {
    TrainingError(const std::string& msg, std::vector<double> trajectory_ = {})
        : std::runtime_error(msg), trajectory(std::move(trajectory_)) {}
    std::vector<double> trajectory;
};

}  // namespace debatekit
