#pragma once

#include <filesystem>
#include <iosfwd>

#include "gradedrm/chain.hpp"

namespace gradedrm {

/// Columns re, im, multiplicity; one row per eigenvalue cluster.
void write_spectrum_csv(std::ostream& out, const SpectrumResult& spectrum);
void write_spectrum_csv(const std::filesystem::path& path, const SpectrumResult& spectrum);

/// Binary matrix dump, all fields little-endian:
///   char[8]   "GRADEDH1"
///   uint32    n, N, M, L, family (0 = uq, 1 = zn)
///   float64   hbar real, hbar imag
///   float64   entries row-major, each as (real, imag); side n^L
struct MatrixDump {
  RMatrixSpec spec;
  int length = 0;
  Matrix matrix;
};

void write_matrix_dump(std::ostream& out, const MatrixDump& dump);
void write_matrix_dump(const std::filesystem::path& path, const MatrixDump& dump);
MatrixDump read_matrix_dump(std::istream& in);
MatrixDump read_matrix_dump(const std::filesystem::path& path);

}  // namespace gradedrm
