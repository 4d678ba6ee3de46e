#pragma once
// Subcommand implementations behind the dkw tool. Each writes an artifact
// directory containing the resolved config plus its CSV outputs; every CSV
// starts with a "# seed=<u64>" line followed by the column header.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>

#include "dk/config.hpp"

namespace dk {

struct RunOptions {
  std::filesystem::path out;           // empty: use [output].directory
  std::optional<std::uint64_t> seed;   // overrides [noise].seed
  unsigned threads = 1;                // speed only
};

// Exit codes: 0 all checks passed, 1 some check failed. Errors throw.
int cmd_simulate(const ExperimentConfig& cfg, const RunOptions& opt, std::ostream& log);
int cmd_skeleton(const ExperimentConfig& cfg, const RunOptions& opt, std::ostream& log);
int cmd_rate(const ExperimentConfig& cfg, const RunOptions& opt, std::ostream& log);
int cmd_mc(const ExperimentConfig& cfg, const RunOptions& opt, std::ostream& log);
int cmd_check_kernel(const ExperimentConfig& cfg, const RunOptions& opt, std::ostream& log);
// Re-reads a simulate/skeleton directory; missing snapshots are reported by index.
int cmd_diagnose(const std::filesystem::path& dir, const RunOptions& opt, std::ostream& log);

// Writes snapshots/snap_<index>.bin, snapshots.csv and records.csv.
void write_trajectory(const std::filesystem::path& dir, const Trajectory& traj, std::uint64_t seed);
// Loads what write_trajectory produced. Throws naming every missing index.
Trajectory read_trajectory(const std::filesystem::path& dir);

}  // namespace dk
