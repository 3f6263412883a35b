#include "mhdbl/field_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>

#include "mhdbl/text.hpp"

namespace mhdbl {
namespace {

static_assert(std::endian::native == std::endian::little, "snapshot files assume a little-endian host");

template <class V>
void put(std::ostream& os, V v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class V>
V get(std::istream& is) {
    V v{};
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!is) throw Error(ErrorKind::IoError, "truncated snapshot");
    return v;
}

}  // namespace

void write_snapshot_header(std::ostream& os, const SnapshotHeader& h) {
    os.write("MBLF", 4);
    put(os, h.version);
    put(os, h.nx);
    put(os, h.ny);
    put(os, static_cast<std::uint8_t>(h.parity));
}

SnapshotHeader read_snapshot_header(std::istream& is) {
    std::array<char, 4> magic{};
    is.read(magic.data(), 4);
    if (!is || std::memcmp(magic.data(), "MBLF", 4) != 0) throw Error(ErrorKind::IoError, "bad snapshot magic");
    SnapshotHeader h;
    h.version = get<std::uint32_t>(is);
    h.nx = get<std::uint32_t>(is);
    h.ny = get<std::uint32_t>(is);
    const auto p = get<std::uint8_t>(is);
    if (p > 1) throw Error(ErrorKind::IoError, "bad snapshot parity byte");
    h.parity = static_cast<Parity>(p);
    if (h.version != 1) throw Error(ErrorKind::IoError, "unsupported snapshot version");
    return h;
}

template <class T>
void write_field(const std::filesystem::path& path, const BasicField<T>& f) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error(ErrorKind::IoError, "cannot open " + path.string() + " for writing");
    SnapshotHeader h;
    h.nx = static_cast<std::uint32_t>(f.grid().nx());
    h.ny = static_cast<std::uint32_t>(f.grid().ny());
    h.parity = BasicField<T>::parity();
    write_snapshot_header(os, h);
    os.write(reinterpret_cast<const char*>(f.values().data()),
             static_cast<std::streamsize>(f.values().size() * sizeof(T)));
    if (!os) throw Error(ErrorKind::IoError, "write failed: " + path.string());
}

template <class T>
BasicField<T> read_field(const std::filesystem::path& path, const Grid& grid) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error(ErrorKind::IoError, "cannot open " + path.string());
    const auto h = read_snapshot_header(is);
    if (h.parity != BasicField<T>::parity())
        throw Error(ErrorKind::ShapeMismatch, "snapshot parity differs from requested field type");
    if (static_cast<int>(h.nx) != grid.nx() || static_cast<int>(h.ny) != grid.ny())
        throw Error(ErrorKind::ShapeMismatch, "snapshot dimensions differ from grid");
    BasicField<T> f(grid);
    is.read(reinterpret_cast<char*>(f.values().data()),
            static_cast<std::streamsize>(f.values().size() * sizeof(T)));
    if (!is) throw Error(ErrorKind::IoError, "truncated snapshot " + path.string());
    return f;
}

template <class T>
void write_field_csv(const std::filesystem::path& path, const BasicField<T>& f) {
    std::ofstream os(path);
    if (!os) throw Error(ErrorKind::IoError, "cannot open " + path.string() + " for writing");
    const Grid& g = f.grid();
    if constexpr (std::is_same_v<T, double>)
        os << "x,y,value\n";
    else
        os << "x,y,value_re,value_im\n";
    for (int i = 0; i < g.nx(); ++i)
        for (int j = 0; j < g.ny(); ++j) {
            os << fmt_double(g.x(i)) << ',' << fmt_double(g.y(j)) << ',';
            if constexpr (std::is_same_v<T, double>)
                os << fmt_double(f(i, j)) << '\n';
            else
                os << fmt_double(f(i, j).real()) << ',' << fmt_double(f(i, j).imag()) << '\n';
        }
    if (!os) throw Error(ErrorKind::IoError, "write failed: " + path.string());
}

template void write_field(const std::filesystem::path&, const Field&);
template void write_field(const std::filesystem::path&, const CField&);
template Field read_field(const std::filesystem::path&, const Grid&);
template CField read_field(const std::filesystem::path&, const Grid&);
template void write_field_csv(const std::filesystem::path&, const Field&);
template void write_field_csv(const std::filesystem::path&, const CField&);

}  // namespace mhdbl
