#pragma once

#include <stdexcept>
#include <string>

#include "vifem/mesh.hpp"

namespace vifem {

struct GmshParseError : std::runtime_error {
  int line;
  GmshParseError(const std::string& msg, int line_no)
      : std::runtime_error(msg + " (line " + std::to_string(line_no) + ")"), line(line_no) {}
};

// Gmsh ASCII v2.2, triangles + physical lines only ($MeshFormat, optional
// $PhysicalNames, $Nodes, $Elements).
Mesh read_gmsh(const std::string& path);

void write_gmsh(const Mesh& mesh, const std::string& path);

}  // namespace vifem
