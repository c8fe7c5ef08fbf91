#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sindarin {

/// Every failure the toolkit reports to a host. Each code maps to exactly one
/// wire error code (see service/protocol.hpp).
enum class ErrorCode {
    SyntaxError,
    CompileError,
    OffsetOutOfRange,
    PcOutOfRange,
    NodeNotInMethod,
    VmFault,
    StepBudgetExceeded,
    ExecutionAlreadyFinished,
    UnhandledExceptionDuringStepOver,
    NotSkippable,
    NotAtMessageSend,
    NotAtAssignment,
    EmptyValueStack,
    NotTopFrame,
    DeadFrame,
    UnknownTarget,
    NonWatchableValue,
    ReentrancyLimit,
    ScriptFailed,
    UnknownScenario,
    UnknownOp,
    UnknownSession,
    BadArgs,
};

inline constexpr std::array kAllErrorCodes{
    ErrorCode::SyntaxError,        ErrorCode::CompileError,
    ErrorCode::OffsetOutOfRange,   ErrorCode::PcOutOfRange,
    ErrorCode::NodeNotInMethod,    ErrorCode::VmFault,
    ErrorCode::StepBudgetExceeded, ErrorCode::ExecutionAlreadyFinished,
    ErrorCode::UnhandledExceptionDuringStepOver,
    ErrorCode::NotSkippable,       ErrorCode::NotAtMessageSend,
    ErrorCode::NotAtAssignment,    ErrorCode::EmptyValueStack,
    ErrorCode::NotTopFrame,        ErrorCode::DeadFrame,
    ErrorCode::UnknownTarget,      ErrorCode::NonWatchableValue,
    ErrorCode::ReentrancyLimit,    ErrorCode::ScriptFailed,
    ErrorCode::UnknownScenario,    ErrorCode::UnknownOp,
    ErrorCode::UnknownSession,     ErrorCode::BadArgs,
};

std::string_view to_string(ErrorCode code);

struct ErrorSpan {
    std::uint32_t start = 0;
    std::uint32_t end = 0;
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message,
          std::optional<ErrorSpan> span = std::nullopt, std::string detail = {})
        : std::runtime_error(message), code_(code), span_(span), detail_(std::move(detail)) {}

    ErrorCode code() const noexcept { return code_; }
    const std::optional<ErrorSpan>& span() const noexcept { return span_; }
    /// Extra payload, e.g. the guest stack of a failed script.
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    std::optional<ErrorSpan> span_;
    std::string detail_;
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::CompileError: return "CompileError";
    case ErrorCode::OffsetOutOfRange: return "OffsetOutOfRange";
    case ErrorCode::PcOutOfRange: return "PcOutOfRange";
    case ErrorCode::NodeNotInMethod: return "NodeNotInMethod";
    case ErrorCode::VmFault: return "VmFault";
    case ErrorCode::StepBudgetExceeded: return "StepBudgetExceeded";
    case ErrorCode::ExecutionAlreadyFinished: return "ExecutionAlreadyFinished";
    case ErrorCode::UnhandledExceptionDuringStepOver: return "UnhandledExceptionDuringStepOver";
    case ErrorCode::NotSkippable: return "NotSkippable";
    case ErrorCode::NotAtMessageSend: return "NotAtMessageSend";
    case ErrorCode::NotAtAssignment: return "NotAtAssignment";
    case ErrorCode::EmptyValueStack: return "EmptyValueStack";
    case ErrorCode::NotTopFrame: return "NotTopFrame";
    case ErrorCode::DeadFrame: return "DeadFrame";
    case ErrorCode::UnknownTarget: return "UnknownTarget";
    case ErrorCode::NonWatchableValue: return "NonWatchableValue";
    case ErrorCode::ReentrancyLimit: return "ReentrancyLimit";
    case ErrorCode::ScriptFailed: return "ScriptFailed";
    case ErrorCode::UnknownScenario: return "UnknownScenario";
    case ErrorCode::UnknownOp: return "UnknownOp";
    case ErrorCode::UnknownSession: return "UnknownSession";
    case ErrorCode::BadArgs: return "BadArgs";
    }
    return "Unknown";
}

} // namespace sindarin
