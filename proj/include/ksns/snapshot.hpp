#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ksns/grid.hpp"

namespace ksns {

/// Binary field file: "KSSF", u32 version, u32 dim, u32 shape[dim],
/// f64 extents[dim], then f64 values x-fastest. All little-endian.
/// Cell fields store the cell counts as shape; a staggered velocity component
/// stores its face-array shape, so shape[d] == cells[d] + 1 on its own axis.
inline constexpr std::uint32_t kSnapshotVersion = 1;

struct FieldFile {
  int dim = 2;
  Index3 shape{1, 1, 1};
  Point extents{1.0, 1.0, 1.0};
  std::vector<double> values;
};

void write_field_file(const std::filesystem::path& path, const FieldFile& file);
FieldFile read_field_file(const std::filesystem::path& path);

FieldFile to_field_file(const ScalarField& f);
FieldFile to_field_file(const VectorField& u, int component);
ScalarField scalar_from_file(const FieldFile& file);

/// Writes n, c, P and every velocity component as <stem>_<name>.kssf.
void write_snapshot(const std::filesystem::path& dir, const std::string& stem, const ScalarField& n,
                    const ScalarField& c, const VectorField& u, const ScalarField& P);

}  // namespace ksns
