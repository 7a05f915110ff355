#pragma once

#include <map>
#include <string>
#include <vector>

#include "vifem/mesh.hpp"

namespace vifem {

// Legacy-VTK ASCII unstructured grids with named point/cell scalar fields.
// Doubles are written with full precision so a round trip preserves values.
struct VtkFields {
  std::map<std::string, std::vector<double>> point_data;
  std::map<std::string, std::vector<double>> cell_data;
};

void write_vtk(const Mesh& mesh, const std::string& path, const VtkFields& fields = {});

struct VtkDataset {
  Mesh mesh;  // nodes/cells only; faces are not reconstructed
  VtkFields fields;
};
VtkDataset read_vtk(const std::string& path);

}  // namespace vifem
