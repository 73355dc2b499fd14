#include "mlsim/error.hpp"

namespace mlsim {

std::string_view to_string(Errc code) noexcept
{
    switch (code) {
    case Errc::DuplicateNodeId: return "DuplicateNodeId";
    case Errc::EmptyScenario: return "EmptyScenario";
    case Errc::NonFiniteState: return "NonFiniteState";
    case Errc::NegativeStateBlowup: return "NegativeStateBlowup";
    case Errc::ChildFailure: return "ChildFailure";
    case Errc::UnknownDomainTag: return "UnknownDomainTag";
    case Errc::WrongLabels: return "WrongLabels";
    case Errc::ForeignAgent: return "ForeignAgent";
    case Errc::TotalMismatch: return "TotalMismatch";
    case Errc::UnreachableCensus: return "UnreachableCensus";
    case Errc::EmptyPopulation: return "EmptyPopulation";
    case Errc::UnreachableFleet: return "UnreachableFleet";
    case Errc::FileNotFound: return "FileNotFound";
    case Errc::SchemaError: return "SchemaError";
    case Errc::IoError: return "IoError";
    case Errc::ParseError: return "ParseError";
    case Errc::ContractError: return "ContractError";
    case Errc::EmptyData: return "EmptyData";
    case Errc::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

Error::Error(Errc code, std::string component, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message)
    , code_(code)
    , component_(std::move(component))
{
}

ChildFailure::ChildFailure(std::uint64_t node_id, const std::string& cause)
    : Error(Errc::ChildFailure, "core", "node " + std::to_string(node_id) + " failed: " + cause)
    , node_id_(node_id)
    , cause_(cause)
{
}

SchemaError::SchemaError(std::string path, std::string key, const std::string& reason)
    : Error(Errc::SchemaError, "config", path + ": '" + key + "': " + reason)
    , path_(std::move(path))
    , key_(std::move(key))
{
}

ParseError::ParseError(std::size_t line, const std::string& reason)
    : Error(Errc::ParseError, "exchange", "line " + std::to_string(line) + ": " + reason)
    , line_(line)
{
}

} // namespace mlsim
