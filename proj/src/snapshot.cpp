#include "ksns/snapshot.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "ksns/error.hpp"

namespace ksns {
namespace {

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

template <class T>
void put(std::ofstream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::ifstream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw ValidationError("snapshot: truncated header");
  return v;
}

}  // namespace

void write_field_file(const std::filesystem::path& path, const FieldFile& file) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ValidationError("snapshot: cannot open " + path.string() + " for writing");
  os.write("KSSF", 4);
  put<std::uint32_t>(os, kSnapshotVersion);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(file.dim));
  for (int d = 0; d < file.dim; ++d) put<std::uint32_t>(os, static_cast<std::uint32_t>(file.shape[d]));
  for (int d = 0; d < file.dim; ++d) put<double>(os, file.extents[d]);
  os.write(reinterpret_cast<const char*>(file.values.data()),
           static_cast<std::streamsize>(file.values.size() * sizeof(double)));
  if (!os) throw ValidationError("snapshot: write failed for " + path.string());
}

FieldFile read_field_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ValidationError("snapshot: cannot open " + path.string());
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "KSSF", 4) != 0) throw ValidationError("snapshot: bad magic in " + path.string());
  const auto version = get<std::uint32_t>(is);
  if (version != kSnapshotVersion) throw ValidationError("snapshot: unsupported version " + std::to_string(version));
  FieldFile file;
  file.dim = static_cast<int>(get<std::uint32_t>(is));
  if (file.dim != 2 && file.dim != 3) throw ValidationError("snapshot: bad dim");
  std::size_t count = 1;
  for (int d = 0; d < file.dim; ++d) {
    file.shape[d] = static_cast<int>(get<std::uint32_t>(is));
    count *= static_cast<std::size_t>(file.shape[d]);
  }
  for (int d = 0; d < file.dim; ++d) file.extents[d] = get<double>(is);
  file.values.resize(count);
  is.read(reinterpret_cast<char*>(file.values.data()), static_cast<std::streamsize>(count * sizeof(double)));
  if (!is) throw ValidationError("snapshot: truncated payload in " + path.string());
  return file;
}

FieldFile to_field_file(const ScalarField& f) {
  FieldFile file;
  file.dim = f.grid.dim;
  file.shape = f.grid.cells;
  file.extents = f.grid.extents;
  file.values = f.values;
  return file;
}

FieldFile to_field_file(const VectorField& u, int component) {
  FieldFile file;
  file.dim = u.grid.dim;
  file.shape = u.grid.face_shape(component);
  file.extents = u.grid.extents;
  file.values = u.comp[component];
  return file;
}

ScalarField scalar_from_file(const FieldFile& file) {
  std::vector<double> ext(file.extents.begin(), file.extents.begin() + file.dim);
  std::vector<int> cells(file.shape.begin(), file.shape.begin() + file.dim);
  ScalarField f(make_grid(file.dim, ext, cells));
  f.values = file.values;
  return f;
}

void write_snapshot(const std::filesystem::path& dir, const std::string& stem, const ScalarField& n,
                    const ScalarField& c, const VectorField& u, const ScalarField& P) {
  std::filesystem::create_directories(dir);
  write_field_file(dir / (stem + "_n.kssf"), to_field_file(n));
  write_field_file(dir / (stem + "_c.kssf"), to_field_file(c));
  write_field_file(dir / (stem + "_P.kssf"), to_field_file(P));
  static constexpr const char* names[] = {"u_x", "u_y", "u_z"};
  for (int d = 0; d < u.dim(); ++d)
    write_field_file(dir / (stem + "_" + names[d] + ".kssf"), to_field_file(u, d));
}

}  // namespace ksns
