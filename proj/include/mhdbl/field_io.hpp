#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "mhdbl/grid.hpp"

namespace mhdbl {

/// Snapshot header: "MBLF", u32 version, u32 nx, u32 ny, u8 parity; then
/// nx·ny samples (re, im pairs when complex) as little-endian f64, x-major.
struct SnapshotHeader {
    std::uint32_t version = 1;
    std::uint32_t nx = 0;
    std::uint32_t ny = 0;
    Parity parity = Parity::real;
};

void write_snapshot_header(std::ostream& os, const SnapshotHeader& h);
SnapshotHeader read_snapshot_header(std::istream& is);

template <class T>
void write_field(const std::filesystem::path& path, const BasicField<T>& f);

/// Reads a snapshot written by write_field; the grid must match the header.
template <class T>
BasicField<T> read_field(const std::filesystem::path& path, const Grid& grid);

/// CSV with columns x,y,value (x,y,value_re,value_im for complex fields).
template <class T>
void write_field_csv(const std::filesystem::path& path, const BasicField<T>& f);

}  // namespace mhdbl
