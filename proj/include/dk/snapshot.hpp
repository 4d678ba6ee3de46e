#pragma once
// Binary snapshot files:
//   "DKW1" | u32 d | u32 n | u32 components | f64 values (little-endian)
// Values are component-major, each component a row-major n^d block with the
// last axis fastest.

#include <cstdint>
#include <filesystem>
#include <vector>

#include "dk/grid.hpp"

namespace dk {

struct Snapshot {
  std::uint32_t d = 0;
  std::uint32_t n = 0;
  std::uint32_t components = 0;
  std::vector<double> values;
};

void write_snapshot(const std::filesystem::path& path, const ScalarField& f);
void write_snapshot(const std::filesystem::path& path, const VectorField& F);
// Throws std::runtime_error on bad magic, truncated payload or I/O failure.
Snapshot read_snapshot(const std::filesystem::path& path);
// Rebuilds a scalar field; the grid must match the file header.
ScalarField to_scalar_field(const Snapshot& s, GridPtr grid);

}  // namespace dk
