#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kagents {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// llm-gateway
struct NetworkError : Error { using Error::Error; };
struct BackendError : Error { using Error::Error; };
struct FixtureMiss : Error { using Error::Error; };
struct StructureError : Error { using Error::Error; };
struct EmptyText : Error { using Error::Error; };

// knowledge-registry
struct DuplicateName : Error { using Error::Error; };
struct UnresolvableHook : Error { using Error::Error; };
struct InvalidDoc : Error { using Error::Error; };
struct NotFound : Error { using Error::Error; };
struct ManifestError : Error { using Error::Error; };

// procedure-format
struct ProcedureParseError : Error { using Error::Error; };
struct MissingTitle : ProcedureParseError { using ProcedureParseError::ProcedureParseError; };
struct MissingSteps : ProcedureParseError { using ProcedureParseError::ProcedureParseError; };
struct DuplicateSection : ProcedureParseError { using ProcedureParseError::ProcedureParseError; };
struct UnknownSection : ProcedureParseError { using ProcedureParseError::ProcedureParseError; };
struct MalformedStep : ProcedureParseError { using ProcedureParseError::ProcedureParseError; };

// translation
struct NoAgents : Error { using Error::Error; };
struct MalformedCandidate : Error { using Error::Error; };
struct TranslationFailed : Error { using Error::Error; };
struct SelectionError : Error { using Error::Error; };

// inspection
struct MissingImageFile : Error { using Error::Error; };
struct ProducerError : Error { using Error::Error; };

// execution
class GrammarError : public Error {
public:
    GrammarError(const std::string& what, std::size_t line, std::size_t column)
        : Error(what + " at " + std::to_string(line) + ":" + std::to_string(column)),
          line_(line), column_(column) {}
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};
struct UnknownExperiment : Error { using Error::Error; };
struct UnknownParameter : Error { using Error::Error; };
struct UnboundVariable : Error { using Error::Error; };
struct MissingArgument : Error { using Error::Error; };
struct EmptyStages : Error { using Error::Error; };
struct InvalidNextStage : Error { using Error::Error; };
struct UnknownVariableName : Error { using Error::Error; };
struct StepBudgetExceeded : Error { using Error::Error; };

// sim-lab
struct LabError : Error { using Error::Error; };
struct SingularDetuning : LabError { using LabError::LabError; };
struct FitDiverged : LabError { using LabError::LabError; };
struct InsufficientData : LabError { using LabError::LabError; };
struct MissingCalibration : LabError { using LabError::LabError; };
struct SearchBudgetExceeded : LabError { using LabError::LabError; };

// cli
struct ConfigError : Error { using Error::Error; };

} // namespace kagents
