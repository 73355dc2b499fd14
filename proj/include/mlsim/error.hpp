#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mlsim {

enum class Errc {
    DuplicateNodeId,
    EmptyScenario,
    NonFiniteState,
    NegativeStateBlowup,
    ChildFailure,
    UnknownDomainTag,
    WrongLabels,
    ForeignAgent,
    TotalMismatch,
    UnreachableCensus,
    EmptyPopulation,
    UnreachableFleet,
    FileNotFound,
    SchemaError,
    IoError,
    ParseError,
    ContractError,
    EmptyData,
    InvalidArgument,
};

std::string_view to_string(Errc code) noexcept;

/// Base error for every failure raised by the engine. `component()` names the
/// subsystem that raised it so the CLI can print a one-line diagnostic.
class Error : public std::runtime_error {
public:
    Error(Errc code, std::string component, const std::string& message);

    Errc code() const noexcept { return code_; }
    const std::string& component() const noexcept { return component_; }

private:
    Errc code_;
    std::string component_;
};

class ChildFailure : public Error {
public:
    ChildFailure(std::uint64_t node_id, const std::string& cause);
    std::uint64_t node_id() const noexcept { return node_id_; }
    const std::string& cause() const noexcept { return cause_; }

private:
    std::uint64_t node_id_;
    std::string cause_;
};

class SchemaError : public Error {
public:
    SchemaError(std::string path, std::string key, const std::string& reason);
    const std::string& path() const noexcept { return path_; }
    const std::string& key() const noexcept { return key_; }

private:
    std::string path_;
    std::string key_;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& reason);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

} // namespace mlsim
