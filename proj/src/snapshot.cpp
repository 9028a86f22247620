#include "ksmx/snapshot.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace ksmx {

static_assert(std::endian::native == std::endian::little,
              "snapshot I/O assumes a little-endian host");

void write_snapshot(const std::string& path, const PhysicalField& f,
                    double time) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("write_snapshot: cannot open " + path);
  out.write("KSMX", 4);
  std::uint32_t version = 1;
  out.write(reinterpret_cast<const char*>(&version), 4);
  std::uint8_t d = static_cast<std::uint8_t>(f.grid.d);
  out.write(reinterpret_cast<const char*>(&d), 1);
  std::uint64_t n = static_cast<std::uint64_t>(f.grid.n);
  out.write(reinterpret_cast<const char*>(&n), 8);
  out.write(reinterpret_cast<const char*>(&time), 8);
  out.write(reinterpret_cast<const char*>(f.values.data()),
            static_cast<std::streamsize>(f.values.size() * sizeof(double)));
  if (!out) throw data_error("write_snapshot: short write to " + path);
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("read_snapshot: cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "KSMX", 4) != 0)
    throw data_error("read_snapshot: bad magic in " + path);
  std::uint32_t version = 0;
  in.read(reinterpret_cast<char*>(&version), 4);
  if (version != 1) throw data_error("read_snapshot: unsupported version");
  std::uint8_t d = 0;
  in.read(reinterpret_cast<char*>(&d), 1);
  std::uint64_t n = 0;
  in.read(reinterpret_cast<char*>(&n), 8);
  Snapshot snap;
  in.read(reinterpret_cast<char*>(&snap.time), 8);
  TorusGrid grid(static_cast<int>(d), static_cast<int>(n));
  snap.field = PhysicalField(grid);
  in.read(reinterpret_cast<char*>(snap.field.values.data()),
          static_cast<std::streamsize>(snap.field.values.size() *
                                       sizeof(double)));
  if (!in) throw data_error("read_snapshot: truncated file " + path);
  return snap;
}

}  // namespace ksmx
