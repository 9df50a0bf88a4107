#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace jobrec {

// Every failure surfaced by the library carries one of these codes.
enum class Errc {
    // kgraph
    DuplicateNode,
    DanglingEdge,
    DuplicateEdge,
    NodeNotFound,
    WrongLabel,
    NoPath,
    TemplateNotFound,
    MissingParameter,
    InvalidRecord,
    // lm
    MissingPlaceholder,
    BackendTimeout,
    BackendError,
    RuleTableInvalid,
    UnknownTemplate,
    // agent
    EmptyQuery,
    PlanParseError,
    PlanInvalid,
    ContractViolation,
    // exec
    ToolNotRegistered,
    // tools
    Unscoreable,
    UnreachableDestination,
    QueryGenerationFailed,
    NoApplications,
    InvalidArgument,
    // tuning
    EmptyLog,
    TrialFailed,
    // service
    ProfileNotFound,
    StoreUnavailable,
    SessionNotFound,
    // bench
    ConfigInvalid,
    InvalidRanking,
    MissingGroundTruth,
    NoTrainingData,
    InsufficientSamples,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace jobrec
