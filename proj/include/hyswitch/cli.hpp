#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "hyswitch/ensemble.hpp"
#include "hyswitch/io.hpp"
#include "hyswitch/model.hpp"
#include "hyswitch/stability.hpp"

namespace hyswitch::cli {

/// Exit-code contract.
enum ExitCode : int { kOk = 0, kIoError = 1, kValidationError = 2, kRuntimeError = 3, kDegenerate = 4 };

enum class ExperimentKind { Simulate, Ensemble, Certify, Partition, Validate };
enum class OutputFormat { Csv, Summary, Both };

std::optional<ExperimentKind> parse_kind(const std::string& s);
std::string kind_name(ExperimentKind k);

/// Raised when the config file cannot be read or is not well-formed JSON.
class IoError : public Error {
  public:
    using Error::Error;
};

struct ExperimentConfig {
    ModelSpec model;
    std::optional<ExperimentKind> kind;

    double t_end = 200.0;
    double dt = kDefaultDt;
    double epsilon = kDefaultEpsilon;
    std::size_t runs = 500;
    std::size_t grid_resolution = 1000;
    std::size_t samples = 10000;
    double annulus_inner = kDefaultAnnulusInner;
    double annulus_outer = kDefaultAnnulusOuter;

    // simulate
    std::optional<SimplexState> initial_state; // uniform when absent
    Regime initial_regime = 0;

    // ensemble
    StartRegion start = UniformInterior{};
    InitialRegime initial_regime_policy = InitialRegime::fixed(0);
    std::optional<EscapeCriterion> escape;
    std::vector<double> deltas;

    std::uint64_t seed = 0;
    std::string output_directory = "hyswitch-out";
    OutputFormat format = OutputFormat::Both;
};

/// Parses the config document. Throws ConfigError on schema or value
/// errors. Model validity is not checked here.
ExperimentConfig parse_config(const Json& doc);
/// Throws IoError when the file is missing or not JSON.
ExperimentConfig load_config(const std::string& path);

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> output_directory;
    std::optional<OutputFormat> format;
};

int cmd_validate(const std::string& config_path, std::ostream& out, std::ostream& err);
int cmd_simulate(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_ensemble(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_certify(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_partition(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err);

/// Entry point of the hyswitch executable.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace hyswitch::cli
