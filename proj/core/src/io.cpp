#include "chmhd/io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <vector>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace chmhd {

namespace {

constexpr char kMagic[6] = {'C', 'H', 'M', 'H', 'D', '1'};

template <class T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    std::memcpy(&v, b, sizeof(T));
    return v;
  }
}

class Writer {
 public:
  explicit Writer(const std::string& path) : os_(path, std::ios::binary) {
    if (!os_) throw FormatError("cannot write " + path);
  }
  template <class T>
  void put(T v) {
    v = to_little(v);
    os_.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  void bytes(const char* p, std::size_t n) { os_.write(p, static_cast<std::streamsize>(n)); }
  void finish(const std::string& path) {
    os_.flush();
    if (!os_) throw FormatError("write failed for " + path);
  }

 private:
  std::ofstream os_;
};

class Reader {
 public:
  explicit Reader(const std::string& path) : is_(path, std::ios::binary), path_(path) {
    if (!is_) throw FormatError("cannot open " + path);
  }
  template <class T>
  T get() {
    T v;
    bytes(reinterpret_cast<char*>(&v), sizeof(T));
    return to_little(v);
  }
  void bytes(char* p, std::size_t n) {
    is_.read(p, static_cast<std::streamsize>(n));
    if (!is_) throw FormatError(path_ + ": truncated snapshot");
  }

 private:
  std::ifstream is_;
  std::string path_;
};

std::uint8_t tag(Location loc) { return static_cast<std::uint8_t>(loc); }

Location location_of(std::uint8_t t) {
  if (t > static_cast<std::uint8_t>(Location::yface)) throw FormatError("unknown staggering tag");
  return static_cast<Location>(t);
}

void put_field(Writer& w, const std::string& name, const Field& f) {
  w.put(static_cast<std::uint16_t>(name.size()));
  w.bytes(name.data(), name.size());
  w.put(tag(f.location()));
  w.put(static_cast<std::int32_t>(f.ni()));
  w.put(static_cast<std::int32_t>(f.nj()));
  const auto data = f.storage();
  w.put(static_cast<std::uint64_t>(data.size()));
  for (double v : data) w.put(v);
}

}  // namespace

void write_vtk(const std::string& path, const State& s) {
  std::ofstream os(path);
  if (!os) throw FormatError("cannot write " + path);
  const GridSpec& g = s.phi.grid();
  fmt::print(os, "# vtk DataFile Version 3.0\nchmhd t={:.17g} step={}\nASCII\nDATASET STRUCTURED_POINTS\n", s.time,
             s.step);
  fmt::print(os, "DIMENSIONS {} {} 1\nORIGIN 0 0 0\nSPACING {:.17g} {:.17g} 1\nCELL_DATA {}\n", g.nx + 1, g.ny + 1,
             g.dx(), g.dy(), g.cells());
  auto scalar = [&](const char* name, auto&& value) {
    fmt::print(os, "SCALARS {} double 1\nLOOKUP_TABLE default\n", name);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) fmt::print(os, "{:.17g}\n", value(i, j));
  };
  scalar("phi", [&](int i, int j) { return s.phi(i, j); });
  scalar("w", [&](int i, int j) { return s.w(i, j); });
  scalar("p", [&](int i, int j) { return s.p(i, j); });
  if (s.n_aux) scalar("N", [&](int i, int j) { return (*s.n_aux)(i, j); });
  fmt::print(os, "VECTORS velocity double\n");
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      fmt::print(os, "{:.17g} {:.17g} 0\n", 0.5 * (s.v.x(i, j) + s.v.x(i + 1, j)),
                 0.5 * (s.v.y(i, j) + s.v.y(i, j + 1)));
  fmt::print(os, "VECTORS magnetic double\n");
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) fmt::print(os, "{:.17g} {:.17g} 0\n", s.b.x(i, j), s.b.y(i, j));
  if (!os) throw FormatError("write failed for " + path);
}

void write_snapshot(const std::string& path, const State& s) {
  const GridSpec& g = s.phi.grid();
  Writer w(path);
  w.bytes(kMagic, sizeof(kMagic));
  w.put(static_cast<std::int64_t>(s.step));
  w.put(s.time);
  w.put(static_cast<std::int32_t>(g.nx));
  w.put(static_cast<std::int32_t>(g.ny));
  w.put(g.lx);
  w.put(g.ly);
  std::vector<std::pair<std::string, const Field*>> fields{
      {"phi", &s.phi},         {"w", &s.w},     {"v.x", &s.v.x}, {"v.y", &s.v.y}, {"v_tilde.x", &s.v_tilde.x},
      {"v_tilde.y", &s.v_tilde.y}, {"p", &s.p}, {"b.x", &s.b.x}, {"b.y", &s.b.y}};
  if (s.n_aux) fields.emplace_back("N", &*s.n_aux);
  w.put(static_cast<std::uint32_t>(fields.size()));
  for (const auto& [name, f] : fields) put_field(w, name, *f);
  w.finish(path);
}

State read_snapshot(const std::string& path) {
  Reader r(path);
  char magic[sizeof(kMagic)];
  r.bytes(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) throw FormatError(path + ": not a CHMHD1 snapshot");
  const auto step = r.get<std::int64_t>();
  const auto time = r.get<double>();
  const auto nx = r.get<std::int32_t>();
  const auto ny = r.get<std::int32_t>();
  const auto lx = r.get<double>();
  const auto ly = r.get<double>();
  GridSpec grid;
  try {
    grid = GridSpec(nx, ny, lx, ly);
  } catch (const ConfigError& e) {
    throw FormatError(path + ": bad grid header (" + e.what() + ")");
  }
  const auto count = r.get<std::uint32_t>();
  if (count > 64) throw FormatError(path + ": implausible field count");
  std::map<std::string, Field> fields;
  for (std::uint32_t k = 0; k < count; ++k) {
    const auto len = r.get<std::uint16_t>();
    std::string name(len, '\0');
    r.bytes(name.data(), len);
    const Location loc = location_of(r.get<std::uint8_t>());
    const auto ni = r.get<std::int32_t>();
    const auto nj = r.get<std::int32_t>();
    const auto n = r.get<std::uint64_t>();
    Field f(grid, loc);
    if (f.ni() != ni || f.nj() != nj || f.storage().size() != n)
      throw FormatError(path + ": field '" + name + "' does not match the grid");
    for (double& v : f.storage()) v = r.get<double>();
    fields.emplace(std::move(name), std::move(f));
  }
  auto take = [&](const char* name, Location loc) {
    auto it = fields.find(name);
    if (it == fields.end()) throw FormatError(path + ": missing field '" + name + "'");
    if (it->second.location() != loc) throw FormatError(path + ": field '" + std::string(name) + "' misplaced");
    return std::move(it->second);
  };
  const bool aux = fields.count("N") != 0;
  State s = State::zeros(grid, aux);
  s.phi = take("phi", Location::cell);
  s.w = take("w", Location::cell);
  s.v.x = take("v.x", Location::xface);
  s.v.y = take("v.y", Location::yface);
  s.v_tilde.x = take("v_tilde.x", Location::xface);
  s.v_tilde.y = take("v_tilde.y", Location::yface);
  s.p = take("p", Location::cell);
  s.b.x = take("b.x", Location::cell);
  s.b.y = take("b.y", Location::cell);
  if (aux) s.n_aux = take("N", Location::cell);
  s.step = step;
  s.time = time;
  return s;
}

}  // namespace chmhd
