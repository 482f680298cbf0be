#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "cnls/grid.hpp"

namespace cnls {

inline constexpr std::uint32_t kFieldDumpVersion = 1;

/// Binary field dump, all little-endian:
///
///   "NLSF"                      4 bytes
///   format version              u32
///   N (dimensions)              u32
///   l (components)              u32
///   points per dimension        N x u32
///   box length per dimension    N x f64
///   component data              l x (row-major interleaved re, im f64)
void write_field_dump(std::ostream& out, const FieldVector& z);
void write_field_dump(const std::filesystem::path& path, const FieldVector& z);

/// Reads a dump onto a freshly created grid. Throws FormatError on a bad
/// magic, unknown version, invalid grid or truncated data.
FieldVector read_field_dump(std::istream& in);
FieldVector read_field_dump(const std::filesystem::path& path);

}  // namespace cnls
