#include "jobrec/error.hpp"

namespace jobrec {

std::string_view errc_name(Errc code) noexcept {
    switch (code) {
        case Errc::DuplicateNode: return "DuplicateNode";
        case Errc::DanglingEdge: return "DanglingEdge";
        case Errc::DuplicateEdge: return "DuplicateEdge";
        case Errc::NodeNotFound: return "NodeNotFound";
        case Errc::WrongLabel: return "WrongLabel";
        case Errc::NoPath: return "NoPath";
        case Errc::TemplateNotFound: return "TemplateNotFound";
        case Errc::MissingParameter: return "MissingParameter";
        case Errc::InvalidRecord: return "InvalidRecord";
        case Errc::MissingPlaceholder: return "MissingPlaceholder";
        case Errc::BackendTimeout: return "BackendTimeout";
        case Errc::BackendError: return "BackendError";
        case Errc::RuleTableInvalid: return "RuleTableInvalid";
        case Errc::UnknownTemplate: return "UnknownTemplate";
        case Errc::EmptyQuery: return "EmptyQuery";
        case Errc::PlanParseError: return "PlanParseError";
        case Errc::PlanInvalid: return "PlanInvalid";
        case Errc::ContractViolation: return "ContractViolation";
        case Errc::ToolNotRegistered: return "ToolNotRegistered";
        case Errc::Unscoreable: return "Unscoreable";
        case Errc::UnreachableDestination: return "UnreachableDestination";
        case Errc::QueryGenerationFailed: return "QueryGenerationFailed";
        case Errc::NoApplications: return "NoApplications";
        case Errc::InvalidArgument: return "InvalidArgument";
        case Errc::EmptyLog: return "EmptyLog";
        case Errc::TrialFailed: return "TrialFailed";
        case Errc::ProfileNotFound: return "ProfileNotFound";
        case Errc::StoreUnavailable: return "StoreUnavailable";
        case Errc::SessionNotFound: return "SessionNotFound";
        case Errc::ConfigInvalid: return "ConfigInvalid";
        case Errc::InvalidRanking: return "InvalidRanking";
        case Errc::MissingGroundTruth: return "MissingGroundTruth";
        case Errc::NoTrainingData: return "NoTrainingData";
        case Errc::InsufficientSamples: return "InsufficientSamples";
    }
    return "Unknown";
}

}  // namespace jobrec
