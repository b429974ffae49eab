#include "lod/basis_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace lod {

namespace {

constexpr char magic[4] = {'L', 'O', 'D', 'B'};
constexpr std::uint32_t format_version = 1;

template <class T>
constexpr bool is_complex = false;
template <>
constexpr bool is_complex<Complex> = true;

class Writer {
 public:
  explicit Writer(const std::string& path) : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot open '" + path + "' for writing");
  }
  void u8(std::uint8_t v) { out_.put(static_cast<char>(v)); }
  void uint(std::uint64_t v, int bytes) {
    for (int i = 0; i < bytes; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { uint(std::bit_cast<std::uint64_t>(v), 8); }
  void raw(const char* p, std::size_t n) { out_.write(p, static_cast<std::streamsize>(n)); }
  void finish() {
    out_.flush();
    if (!out_) throw std::runtime_error("write failed");
  }

 private:
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::string& path) : in_(path, std::ios::binary) {
    if (!in_) throw std::runtime_error("cannot open '" + path + "'");
  }
  std::uint8_t u8() {
    int c = in_.get();
    if (c == std::char_traits<char>::eof()) throw std::runtime_error("basis file is truncated");
    return static_cast<std::uint8_t>(c);
  }
  std::uint64_t uint(int bytes) {
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(u8()) << (8 * i);
    return v;
  }
  std::int32_t i32() { return static_cast<std::int32_t>(static_cast<std::uint32_t>(uint(4))); }
  double f64() { return std::bit_cast<double>(uint(8)); }
  bool at_end() { return in_.peek() == std::char_traits<char>::eof(); }

 private:
  std::ifstream in_;
};

}  // namespace

template <class S>
void write_basis(const std::string& path, const LodBasis<S>& basis) {
  Writer w(path);
  w.raw(magic, 4);
  w.uint(format_version, 4);
  w.u8(basis.mode == ConstraintMode::cg ? 0 : 1);
  w.u8(is_complex<S> ? 1 : 0);
  w.uint(0, 2);
  for (int v : {basis.p, basis.ell, basis.coarse_n, basis.fine_n, basis.q})
    w.uint(static_cast<std::uint32_t>(v), 4);
  w.uint(static_cast<std::uint64_t>(basis.num_dofs()), 8);
  w.uint(static_cast<std::uint64_t>(basis.size()), 8);
  const auto& phi = basis.phi;
  for (int j = 0; j < phi.outerSize(); ++j) {
    int begin = phi.outerIndexPtr()[j], end = phi.outerIndexPtr()[j + 1];
    w.uint(static_cast<std::uint64_t>(end - begin), 8);
    for (int k = begin; k < end; ++k) w.uint(static_cast<std::uint64_t>(phi.innerIndexPtr()[k]), 8);
    for (int k = begin; k < end; ++k) {
      if constexpr (is_complex<S>) {
        w.f64(phi.valuePtr()[k].real());
        w.f64(phi.valuePtr()[k].imag());
      } else {
        w.f64(phi.valuePtr()[k]);
      }
    }
  }
  w.finish();
}

template <class S>
LodBasis<S> read_basis(const std::string& path) {
  Reader r(path);
  char m[4];
  for (char& c : m) c = static_cast<char>(r.u8());
  if (std::memcmp(m, magic, 4) != 0) throw std::runtime_error("'" + path + "' is not a basis file");
  auto version = r.uint(4);
  if (version != format_version) throw std::runtime_error("unsupported basis format version " + std::to_string(version));
  LodBasis<S> basis;
  basis.mode = r.u8() == 0 ? ConstraintMode::cg : ConstraintMode::dg;
  bool complex_values = r.u8() != 0;
  if (complex_values != is_complex<S>) throw std::runtime_error("basis file scalar kind does not match");
  r.uint(2);
  basis.p = r.i32();
  basis.ell = r.i32();
  basis.coarse_n = r.i32();
  basis.fine_n = r.i32();
  basis.q = r.i32();
  auto n_dofs = r.uint(8), J = r.uint(8);
  if (n_dofs > INT32_MAX || J > INT32_MAX) throw std::runtime_error("basis dimensions out of range");
  std::vector<int> outer{0}, inner;
  std::vector<S> values;
  for (std::uint64_t j = 0; j < J; ++j) {
    auto count = r.uint(8);
    if (count > n_dofs) throw std::runtime_error("basis column larger than the dof count");
    std::size_t base = inner.size();
    for (std::uint64_t k = 0; k < count; ++k) {
      auto idx = r.uint(8);
      if (idx >= n_dofs || (k > 0 && static_cast<int>(idx) <= inner.back()))
        throw std::runtime_error("basis column indices out of range or unsorted");
      inner.push_back(static_cast<int>(idx));
    }
    for (std::uint64_t k = 0; k < count; ++k) {
      if constexpr (is_complex<S>) {
        double re = r.f64(), im = r.f64();
        values.emplace_back(re, im);
      } else {
        values.push_back(r.f64());
      }
    }
    outer.push_back(static_cast<int>(base + count));
  }
  if (!r.at_end()) throw std::runtime_error("trailing bytes after basis data");
  basis.phi.resize(static_cast<Eigen::Index>(n_dofs), static_cast<Eigen::Index>(J));
  basis.phi.resizeNonZeros(static_cast<Eigen::Index>(inner.size()));
  std::copy(outer.begin(), outer.end(), basis.phi.outerIndexPtr());
  std::copy(inner.begin(), inner.end(), basis.phi.innerIndexPtr());
  std::copy(values.begin(), values.end(), basis.phi.valuePtr());
  return basis;
}

template void write_basis(const std::string&, const LodBasis<double>&);
template void write_basis(const std::string&, const LodBasis<Complex>&);
template LodBasis<double> read_basis(const std::string&);
template LodBasis<Complex> read_basis(const std::string&);

}  // namespace lod
