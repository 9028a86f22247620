#pragma once

#include <string>

#include "ksmx/grid.hpp"

namespace ksmx {

// Binary field snapshot: magic "KSMX", version u32 = 1, d u8, n u64,
// time f64, then n^d little-endian f64 physical samples, row-major.
struct Snapshot {
  PhysicalField field;
  double time = 0.0;
};

void write_snapshot(const std::string& path, const PhysicalField& f,
                    double time);
Snapshot read_snapshot(const std::string& path);

}  // namespace ksmx
