#pragma once

#include <surflow/hodge.hpp>
#include <surflow/mesh.hpp>

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace surflow {

inline constexpr const char* kOutputDirEnv = "SURFLOW_OUTPUT_DIR";

struct ExperimentConfig {
    std::string experiment;       ///< mesh-info | decompose | flow | stability-thm1 | stability-thm2
    nlohmann::json mesh;          ///< {"generator": ..., params} or {"off": path}
    OperatorOptions operators;
    nlohmann::json params = nlohmann::json::object();
    std::uint64_t seed = 0;
    std::optional<std::string> output_dir;
    std::optional<std::string> timestamp; ///< pins the file-name timestamp
    std::filesystem::path base_dir;       ///< relative paths resolve against this
};

/// Validates a parsed config document. `selector` is the subcommand; a
/// conflicting "experiment" field in the document is rejected.
ExperimentConfig parse_config(const nlohmann::json& document, const std::string& selector,
                              const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::string& path, const std::string& selector);

/// Builds the configured mesh; `tag` receives a short name for output files.
SurfaceMesh build_mesh(const ExperimentConfig& config, std::string* tag = nullptr);

struct RunOptions {
    std::optional<std::string> out_dir;
    bool verbose = false;
    bool dump_operators = false;
};

/// Runs one experiment, writing artifacts and printing the JSON summary to `out`.
/// Returns the summary. Throws ContractError / NumericalError.
nlohmann::json run_experiment(const ExperimentConfig& config, const RunOptions& options, std::ostream& out,
                              std::ostream& log);

/// Full command-line entry point with the 0 / 2 / 3 exit-code contract.
int run_cli(int argc, char** argv);

} // namespace surflow
