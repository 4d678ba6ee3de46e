#pragma once
// Time-indexed density snapshots plus the per-step scalar records the
// solver streams out.

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "dk/grid.hpp"

namespace dk {

struct StepRecord {
  double t = 0.0;
  double mass = 0.0;
  double min = 0.0;
  double max = 0.0;
  double entropy = 0.0;          // integral of Psi(rho)
  double dissipation = 0.0;      // ||grad sqrt rho||^2 * dt for the step that produced this state
  double dissipation_cum = 0.0;  // running sum of the above
  double l2 = 0.0;
};

struct Trajectory {
  GridPtr grid;
  double dt = 0.0;
  std::vector<double> times;              // one per snapshot
  std::vector<ScalarField> snapshots;
  std::vector<StepRecord> records;        // one per step, records[0] is t = 0

  std::size_t size() const { return snapshots.size(); }
  double final_time() const { return times.empty() ? 0.0 : times.back(); }
};

// Trapezoidal time quadrature of f(snapshot) over the stored snapshot times.
template <typename F>
double integrate_snapshots(const Trajectory& traj, F&& f) {
  double acc = 0.0;
  if (traj.size() < 2) return acc;
  double prev = f(traj.snapshots[0]);
  for (std::size_t i = 1; i < traj.size(); ++i) {
    const double cur = f(traj.snapshots[i]);
    acc += 0.5 * (traj.times[i] - traj.times[i - 1]) * (prev + cur);
    prev = cur;
  }
  return acc;
}

// CSV: t,mass,min,max,entropy,dissipation_cum,l2
void write_records_csv(std::ostream& os, const std::vector<StepRecord>& records);

}  // namespace dk
