#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "spde/scenario.hpp"

namespace spde {

enum class Subcommand { Simulate, Converge, Validate, Variational, Probe };

std::optional<Subcommand> subcommand_from_name(const std::string& name);

struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> paths;
  std::optional<std::string> out;
  std::optional<int> threads;  // falls back to SPDE_THREADS, then 1
};

// Executes one scenario and writes the subcommand's output files into the
// output directory. Throws on any module error; interrupted runs leave
// .partial files behind.
void run_scenario(const Scenario& scenario, Subcommand cmd, const RunOverrides& overrides = {});

}  // namespace spde
