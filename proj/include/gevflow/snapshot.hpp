#pragma once
// Binary state checkpoints.
//
// Layout (little-endian):
//   8 bytes  "GEVFLOW\0"
//   1 byte   format version (1)
//   1 byte   kind: 1 prandtl (u, ut), 2 hns (u, v, ut, vt)
//   2 bytes  reserved, zero
//   f64 lx, i32 nx, i32 ny, f64 t, f64 eps, u32 field count
//   per field: ny * (nx/2 + 1) complex coefficients as (re, im) f64 pairs,
//   row-major in y.

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <vector>

#include "gevflow/field.hpp"

namespace gevflow {

inline constexpr std::uint8_t kSnapshotVersion = 1;

struct Snapshot {
  enum class Kind : std::uint8_t { Prandtl = 1, Hns = 2 };
  Kind kind = Kind::Prandtl;
  double t = 0.0;
  double eps = 0.0;
  std::vector<Field> fields;
};

class snapshot_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_snapshot(const std::filesystem::path& file, const Snapshot& s);
/// Throws snapshot_error on a bad magic, unknown version or truncated file.
Snapshot read_snapshot(const std::filesystem::path& file);

}  // namespace gevflow
