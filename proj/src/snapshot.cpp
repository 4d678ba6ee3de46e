#include "dk/snapshot.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace dk {
namespace {

constexpr char kMagic[4] = {'D', 'K', 'W', '1'};

template <typename T>
void put_le(std::ostream& os, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get_le(std::istream& is) {
  unsigned char bytes[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw std::runtime_error("snapshot: truncated file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

void write_raw(const std::filesystem::path& path, const TorusGrid& g, std::uint32_t comps,
               std::span<const double> values) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("snapshot: cannot open " + path.string() + " for writing");
  os.write(kMagic, 4);
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(g.dim()));
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(g.n()));
  put_le<std::uint32_t>(os, comps);
  for (double v : values) put_le<double>(os, v);
  if (!os) throw std::runtime_error("snapshot: write failed for " + path.string());
}

}  // namespace

void write_snapshot(const std::filesystem::path& path, const ScalarField& f) {
  write_raw(path, f.grid(), 1, f.values());
}

void write_snapshot(const std::filesystem::path& path, const VectorField& F) {
  write_raw(path, F.grid(), static_cast<std::uint32_t>(F.components()), F.data());
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("snapshot: cannot open " + path.string());
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw std::runtime_error("snapshot: bad magic in " + path.string());
  }
  Snapshot s;
  s.d = get_le<std::uint32_t>(is);
  s.n = get_le<std::uint32_t>(is);
  s.components = get_le<std::uint32_t>(is);
  if (s.d < 1 || s.d > 3 || s.n < 8) throw std::runtime_error("snapshot: invalid header in " + path.string());
  std::size_t count = s.components;
  for (std::uint32_t i = 0; i < s.d; ++i) count *= s.n;
  s.values.resize(count);
  for (auto& v : s.values) v = get_le<double>(is);
  return s;
}

ScalarField to_scalar_field(const Snapshot& s, GridPtr grid) {
  if (s.components != 1 || static_cast<int>(s.d) != grid->dim() || static_cast<int>(s.n) != grid->n()) {
    throw std::invalid_argument("snapshot: shape does not match grid");
  }
  return ScalarField(std::move(grid), s.values);
}

}  // namespace dk
