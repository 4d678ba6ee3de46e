#pragma once
// INI experiment configuration. Parsing validates every key and names the
// offending [section].key; serialize() writes the normalized form (fixed
// section and key order, shortest round-trip number formatting, absent
// optional keys omitted), so parse(serialize(c)) serializes byte-identically.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dk/interaction.hpp"
#include "dk/solver.hpp"

namespace dk {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ExperimentConfig {
  struct Grid {
    int d = 1;
    int n = 64;
  } grid;

  struct KernelSec {
    std::string kind = "zero";  // zero | smooth | power
    double alpha = 0.5;
    int sign = 1;
    double gamma = 0.0;
    std::string modes;  // "k1,k2:component:cos:sin;..."
  } kernel;

  struct Initial {
    double amplitude = 0.5;  // rho0 = 1 + amplitude cos(2 pi mode x_1)
    int mode = 1;
  } initial;

  struct Solver {
    double T = 0.1;
    double dt = 1e-4;
    double eta = 0.01;
    double eps = 0.0;
    int snapshot_stride = 1;
    std::string positivity = "observe";  // observe | clamp
  } solver;

  struct Noise {
    std::optional<int> K;
    std::optional<double> beta;
    std::uint64_t seed = 1;
  };
  std::optional<Noise> noise;

  struct ControlSec {
    std::string mode = "none";  // none | constant | shear | drift-gradient | file
    double amplitude = 0.0;
    std::string phi_modes;  // "k1,k2:cos:sin;..."
    std::string g_file;
  } control;

  struct Mc {
    std::size_t trials = 1000;
    std::vector<double> eps_list{0.1, 0.05, 0.025};
    std::string event = "tube-exit";
    double radius = 0.1;
    double beta = 0.2;
  } mc;

  struct Output {
    std::string directory = "out";
  } output;

  void validate() const;  // throws ConfigError naming [section].key
};

ExperimentConfig parse_config(std::istream& is);
ExperimentConfig parse_config_string(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string serialize(const ExperimentConfig& cfg);

// Builders for the library objects a config describes.
GridPtr make_grid(const ExperimentConfig& cfg);
KernelSpec make_kernel_spec(const ExperimentConfig& cfg);
Kernel make_kernel(const ExperimentConfig& cfg, GridPtr grid);
ScalarField make_initial(const ExperimentConfig& cfg, GridPtr grid);
// The noise mode set is attached when [noise] is present; K comes from
// [noise].K or from scaling_K([solver].eps, [noise].beta, d).
SolverConfig make_solver_config(const ExperimentConfig& cfg, std::uint64_t seed);
Control make_control(const ExperimentConfig& cfg, GridPtr grid);
int resolve_K(const ExperimentConfig& cfg);

std::vector<FourierTerm> parse_vector_modes(const std::string& text, int d);
// Scalar potential from "k1,k2:cos:sin;..." terms.
ScalarField parse_scalar_modes(const std::string& text, GridPtr grid);

}  // namespace dk
