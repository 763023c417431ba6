#pragma once

#include <stdexcept>
#include <string>

#include "chmhd/schemes.hpp"

namespace chmhd {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Legacy VTK structured-points file with cell data: phi, w, p, N (when
/// present), the velocity averaged to cells, and b.
void write_vtk(const std::string& path, const State& s);

/// Binary snapshot for exact restarts. Layout, all little-endian:
///   "CHMHD1", i64 step, f64 time, i32 nx, i32 ny, f64 lx, f64 ly, u32 count,
///   then per field: u16 name length, name, u8 location tag, i32 ni, i32 nj,
///   u64 value count, f64 values (ghost layer included).
void write_snapshot(const std::string& path, const State& s);
State read_snapshot(const std::string& path);

}  // namespace chmhd
