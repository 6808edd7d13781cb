#pragma once

#include <string>
#include <vector>

#include "kagents/knowledge/descriptor.hpp"

namespace kagents::knowledge {

inline constexpr const char* kExecuteProcedure = "ExecuteProcedure";

// Every built-in descriptor, in registration order.
const std::vector<ExperimentDescriptor>& builtin_descriptors();

// The runnable calibration set plus the two proposal experiments.
std::vector<std::string> default_experiment_names();

// default_experiment_names() plus the benchmark-only experiments.
std::vector<std::string> benchmark_experiment_names();

// Throws NotFound.
const ExperimentDescriptor& builtin(const std::string& name);

// Pseudo-experiment that runs a stored procedure with a parameter mapping.
ExperimentDescriptor execute_procedure_descriptor();

} // namespace kagents::knowledge
