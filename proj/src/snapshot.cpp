#include "gevflow/snapshot.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace gevflow {

static_assert(std::endian::native == std::endian::little,
              "snapshot I/O assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'G', 'E', 'V', 'F', 'L', 'O', 'W', '\0'};

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T take(std::istream& is, const std::filesystem::path& file) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v))
    throw snapshot_error("snapshot " + file.string() + " is truncated");
  return v;
}

}  // namespace

void write_snapshot(const std::filesystem::path& file, const Snapshot& s) {
  if (s.fields.empty()) throw std::invalid_argument("write_snapshot: no fields");
  const Grid& g = s.fields.front().grid();
  for (const Field& f : s.fields)
    if (!(f.grid() == g)) throw std::invalid_argument("write_snapshot: mixed grids");
  std::ofstream os(file, std::ios::binary | std::ios::trunc);
  if (!os) throw snapshot_error("cannot create snapshot " + file.string());
  os.write(kMagic, sizeof kMagic);
  put<std::uint8_t>(os, kSnapshotVersion);
  put<std::uint8_t>(os, static_cast<std::uint8_t>(s.kind));
  put<std::uint16_t>(os, 0);
  put<double>(os, g.lx());
  put<std::int32_t>(os, g.nx());
  put<std::int32_t>(os, g.ny());
  put<double>(os, s.t);
  put<double>(os, s.eps);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(s.fields.size()));
  for (const Field& f : s.fields)
    os.write(reinterpret_cast<const char*>(f.raw()),
             static_cast<std::streamsize>(f.raw_size() * sizeof(double)));
  if (!os) throw snapshot_error("write failed for snapshot " + file.string());
}

Snapshot read_snapshot(const std::filesystem::path& file) {
  std::ifstream is(file, std::ios::binary);
  if (!is) throw snapshot_error("cannot open snapshot " + file.string());
  char magic[8];
  if (!is.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0)
    throw snapshot_error(file.string() + " is not a gevflow snapshot");
  const auto version = take<std::uint8_t>(is, file);
  if (version != kSnapshotVersion)
    throw snapshot_error("snapshot " + file.string() + " has unsupported version " +
                         std::to_string(version));
  Snapshot s;
  const auto kind = take<std::uint8_t>(is, file);
  if (kind != 1 && kind != 2)
    throw snapshot_error("snapshot " + file.string() + " has unknown kind " +
                         std::to_string(kind));
  s.kind = static_cast<Snapshot::Kind>(kind);
  take<std::uint16_t>(is, file);
  const double lx = take<double>(is, file);
  const int nx = take<std::int32_t>(is, file);
  const int ny = take<std::int32_t>(is, file);
  s.t = take<double>(is, file);
  s.eps = take<double>(is, file);
  const auto count = take<std::uint32_t>(is, file);
  if (count == 0 || count > 16)
    throw snapshot_error("snapshot " + file.string() + " has a bad field count");
  Grid g(lx, nx, ny);
  for (std::uint32_t i = 0; i < count; ++i) {
    Field f(g);
    if (!is.read(reinterpret_cast<char*>(f.raw()),
                 static_cast<std::streamsize>(f.raw_size() * sizeof(double))))
      throw snapshot_error("snapshot " + file.string() + " is truncated");
    s.fields.push_back(std::move(f));
  }
  if (is.peek() != std::char_traits<char>::eof())
    throw snapshot_error("snapshot " + file.string() + " has trailing bytes");
  return s;
}

}  // namespace gevflow
