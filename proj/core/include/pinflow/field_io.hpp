#pragma once

/// @file field_io.hpp
/// @brief CSV and PFLD1 binary serialization of grid fields
///
/// Binary layout: magic "PFLD1", nx and ny as uint64, Lx and Ly as float64,
/// then nx*ny*c float64 values in row-major order (c = 1 for scalars, c = 2
/// interleaved for vectors and complex values). All little-endian. The origin
/// is not part of the format; readers take it as an argument.

#include "pinflow/grid.hpp"

#include <iosfwd>
#include <string>

namespace pinflow {

void write_csv(std::ostream& os, const ScalarField& f, const std::string& name = "value");
void write_csv(std::ostream& os, const VectorField& f);
void write_csv(std::ostream& os, const ComplexField& f);

void write_binary(std::ostream& os, const ScalarField& f);
void write_binary(std::ostream& os, const VectorField& f);
void write_binary(std::ostream& os, const ComplexField& f);

ScalarField read_scalar_binary(std::istream& is, Vec2 origin = {0.0, 0.0});
VectorField read_vector_binary(std::istream& is, Vec2 origin = {0.0, 0.0});
ComplexField read_complex_binary(std::istream& is, Vec2 origin = {0.0, 0.0});

/// File-path conveniences; throw Error on I/O failure
void save_binary(const std::string& path, const ScalarField& f);
void save_binary(const std::string& path, const VectorField& f);
void save_binary(const std::string& path, const ComplexField& f);
ScalarField load_scalar_binary(const std::string& path, Vec2 origin = {0.0, 0.0});
void save_csv(const std::string& path, const ScalarField& f, const std::string& name = "value");

} // namespace pinflow
