#include "gradedrm/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace gradedrm {

namespace {

constexpr std::array<char, 8> kMagic{'G', 'R', 'A', 'D', 'E', 'D', 'H', '1'};

template <class T>
void put_le(std::ostream& out, T value) {
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(bytes.data(), bytes.size());
}

template <class T>
T get_le(std::istream& in) {
  std::array<char, sizeof(T)> bytes;
  if (!in.read(bytes.data(), bytes.size())) throw std::runtime_error("matrix dump truncated");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode) {
  std::ofstream out(path, mode);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

}  // namespace

void write_spectrum_csv(std::ostream& out, const SpectrumResult& spectrum) {
  out << "re,im,multiplicity\n" << std::setprecision(17);
  for (const auto& level : spectrum.levels)
    out << level.value.real() << ',' << level.value.imag() << ',' << level.multiplicity << '\n';
}

void write_spectrum_csv(const std::filesystem::path& path, const SpectrumResult& spectrum) {
  auto out = open_out(path, std::ios::out | std::ios::trunc);
  write_spectrum_csv(out, spectrum);
}

void write_matrix_dump(std::ostream& out, const MatrixDump& dump) {
  const auto& dim = dump.spec.dim;
  const long long side = ipow(dim.size(), dump.length);
  if (dump.matrix.rows() != side || dump.matrix.cols() != side)
    throw std::invalid_argument("matrix dump: matrix side must be n^L");
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, dim.size());
  put_le<std::uint32_t>(out, dim.n_even());
  put_le<std::uint32_t>(out, dim.n_odd());
  put_le<std::uint32_t>(out, dump.length);
  put_le<std::uint32_t>(out, dump.spec.family == Family::UqGlNM ? 0 : 1);
  put_le<double>(out, dump.spec.hbar.real());
  put_le<double>(out, dump.spec.hbar.imag());
  for (Eigen::Index r = 0; r < side; ++r)
    for (Eigen::Index c = 0; c < side; ++c) {
      put_le<double>(out, dump.matrix(r, c).real());
      put_le<double>(out, dump.matrix(r, c).imag());
    }
  if (!out) throw std::runtime_error("matrix dump: write failed");
}

void write_matrix_dump(const std::filesystem::path& path, const MatrixDump& dump) {
  auto out = open_out(path, std::ios::out | std::ios::trunc | std::ios::binary);
  write_matrix_dump(out, dump);
}

MatrixDump read_matrix_dump(std::istream& in) {
  std::array<char, 8> magic;
  if (!in.read(magic.data(), magic.size()) || magic != kMagic)
    throw std::runtime_error("matrix dump: bad magic");
  const auto n = get_le<std::uint32_t>(in);
  const auto n_even = get_le<std::uint32_t>(in);
  const auto n_odd = get_le<std::uint32_t>(in);
  const auto length = get_le<std::uint32_t>(in);
  const auto family = get_le<std::uint32_t>(in);
  if (n != n_even + n_odd || family > 1 || length < 1 || length > 64)
    throw std::runtime_error("matrix dump: inconsistent header");
  const double hr = get_le<double>(in);
  const double hi = get_le<double>(in);
  MatrixDump dump{RMatrixSpec{family == 0 ? Family::UqGlNM : Family::ZnGraded,
                              GradedDim(static_cast<int>(n_even), static_cast<int>(n_odd)),
                              cplx{hr, hi}},
                  static_cast<int>(length), {}};
  long long side = 1;
  for (int k = 0; k < dump.length; ++k)
    if ((side *= n) > ChainOperator::kDenseCap) throw std::runtime_error("matrix dump: side above dense cap");
  dump.matrix.resize(side, side);
  for (Eigen::Index r = 0; r < side; ++r)
    for (Eigen::Index c = 0; c < side; ++c) {
      const double re = get_le<double>(in);
      dump.matrix(r, c) = cplx{re, get_le<double>(in)};
    }
  return dump;
}

MatrixDump read_matrix_dump(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_matrix_dump(in);
}

}  // namespace gradedrm
