#pragma once

#include <string>

#include "vifem/csr.hpp"

namespace vifem {

// MatrixMarket coordinate (matrices) and array (vectors) formats, used for
// debugging and exchanging systems with external oracles.
void write_matrix_market(const CsrMatrix& a, const std::string& path);
CsrMatrix read_matrix_market(const std::string& path);

void write_vector_market(std::span<const double> v, const std::string& path);
std::vector<double> read_vector_market(const std::string& path);

}  // namespace vifem
