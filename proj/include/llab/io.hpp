#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "llab/grid.hpp"

namespace llab {

/// Flat binary field container:
/// magic "LLAB" | version u32 | N u32 | L f64 | kind u8 | row-major f64 payload.
/// Kinds: 0 real site, 1 complex site (re,im interleaved), 2 horizontal-edge,
/// 3 vertical-edge.
namespace io {

inline constexpr std::uint32_t kFormatVersion = 1;

enum class FieldKind : std::uint8_t { RealSite = 0, ComplexSite = 1, HEdge = 2, VEdge = 3 };

namespace detail {

inline void write_header(std::ostream& os, std::uint32_t N, double L, FieldKind kind) {
  os.write("LLAB", 4);
  std::uint32_t v = kFormatVersion;
  os.write(reinterpret_cast<const char*>(&v), 4);
  os.write(reinterpret_cast<const char*>(&N), 4);
  os.write(reinterpret_cast<const char*>(&L), 8);
  std::uint8_t k = static_cast<std::uint8_t>(kind);
  os.write(reinterpret_cast<const char*>(&k), 1);
}

struct Header {
  std::uint32_t N;
  double L;
  FieldKind kind;
};

inline Header read_header(std::istream& is) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "LLAB", 4) != 0)
    throw std::runtime_error("field container: bad magic");
  std::uint32_t version = 0, N = 0;
  double L = 0.0;
  std::uint8_t kind = 0;
  is.read(reinterpret_cast<char*>(&version), 4);
  is.read(reinterpret_cast<char*>(&N), 4);
  is.read(reinterpret_cast<char*>(&L), 8);
  is.read(reinterpret_cast<char*>(&kind), 1);
  if (!is) throw std::runtime_error("field container: truncated header");
  if (version != kFormatVersion)
    throw std::runtime_error("field container: unsupported version " + std::to_string(version));
  if (kind > 3) throw std::runtime_error("field container: unknown field kind");
  return {N, L, static_cast<FieldKind>(kind)};
}

template <Loc W>
constexpr FieldKind kind_of_real() {
  if constexpr (W == Loc::Site) return FieldKind::RealSite;
  else if constexpr (W == Loc::HEdge) return FieldKind::HEdge;
  else return FieldKind::VEdge;
}

}  // namespace detail

template <Loc W>
void save_field(const Field<double, W>& f, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("save_field: cannot open " + path.string());
  detail::write_header(os, static_cast<std::uint32_t>(f.N()), f.grid().L(),
                       detail::kind_of_real<W>());
  auto v = f.values();
  os.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * 8));
  if (!os) throw std::runtime_error("save_field: write failed for " + path.string());
}

inline void save_field(const ComplexField& f, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("save_field: cannot open " + path.string());
  detail::write_header(os, static_cast<std::uint32_t>(f.N()), f.grid().L(),
                       FieldKind::ComplexSite);
  auto v = f.values();
  os.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * 16));
  if (!os) throw std::runtime_error("save_field: write failed for " + path.string());
}

template <class FieldT>
FieldT load_field(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("load_field: cannot open " + path.string());
  const auto h = detail::read_header(is);
  Grid g(h.L, static_cast<int>(h.N));
  FieldT f(g);
  const bool complex_payload = std::is_same_v<FieldT, ComplexField>;
  if (complex_payload != (h.kind == FieldKind::ComplexSite))
    throw std::runtime_error("load_field: field kind mismatch in " + path.string());
  auto v = f.values();
  is.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(v.size() * sizeof(v[0])));
  if (!is) throw std::runtime_error("load_field: truncated payload in " + path.string());
  return f;
}

/// Debug CSV: one "j,k,value" row per site.
inline void export_csv(const ScalarField& f, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("export_csv: cannot open " + path.string());
  os << "j,k,value\n";
  os.precision(17);
  for (int j = 1; j <= f.N(); ++j)
    for (int k = 1; k <= f.N(); ++k) os << j << ',' << k << ',' << f(j, k) << '\n';
}

}  // namespace io
}  // namespace llab
