#include "vifem/vtk_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace vifem {

namespace {

int vtk_cell_type(CellKind kind) {
  switch (kind) {
    case CellKind::Tri3: return 5;
    case CellKind::Quad4: return 9;
    case CellKind::Hex8: return 12;
  }
  return 0;
}

CellKind kind_from_vtk(int t) {
  switch (t) {
    case 5: return CellKind::Tri3;
    case 9: return CellKind::Quad4;
    case 12: return CellKind::Hex8;
  }
  throw std::runtime_error("read_vtk: unsupported cell type " + std::to_string(t));
}

void write_scalars(std::ofstream& out, const std::map<std::string, std::vector<double>>& data) {
  char buf[64];
  for (const auto& [name, values] : data) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (double v : values) {
      std::snprintf(buf, sizeof buf, "%.17g\n", v);
      out << buf;
    }
  }
}

}  // namespace

void write_vtk(const Mesh& mesh, const std::string& path, const VtkFields& fields) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "# vtk DataFile Version 3.0\nvifem output\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.node_count() << " double\n";
  char buf[160];
  for (const Vec3& p : mesh.nodes) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", p[0], p[1], p[2]);
    out << buf;
  }
  const int npc = nodes_per_cell(mesh.kind);
  out << "CELLS " << mesh.cell_count() << " " << mesh.cell_count() * (npc + 1) << "\n";
  for (int c = 0; c < mesh.cell_count(); ++c) {
    out << npc;
    for (int a = 0; a < npc; ++a) out << " " << mesh.cell_node(c, a);
    out << "\n";
  }
  out << "CELL_TYPES " << mesh.cell_count() << "\n";
  for (int c = 0; c < mesh.cell_count(); ++c) out << vtk_cell_type(mesh.kind) << "\n";
  if (!fields.point_data.empty()) {
    out << "POINT_DATA " << mesh.node_count() << "\n";
    write_scalars(out, fields.point_data);
  }
  if (!fields.cell_data.empty()) {
    out << "CELL_DATA " << mesh.cell_count() << "\n";
    write_scalars(out, fields.cell_data);
  }
}

VtkDataset read_vtk(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open vtk file: " + path);
  VtkDataset ds;
  std::string tok;
  long npoints = 0, ncells = 0;
  enum { None, Point, Cell } section = None;
  while (in >> tok) {
    if (tok == "POINTS") {
      in >> npoints >> tok;
      ds.mesh.nodes.resize(npoints);
      for (long i = 0; i < npoints; ++i) in >> ds.mesh.nodes[i][0] >> ds.mesh.nodes[i][1] >> ds.mesh.nodes[i][2];
    } else if (tok == "CELLS") {
      long total;
      in >> ncells >> total;
      for (long c = 0; c < ncells; ++c) {
        int npc;
        in >> npc;
        for (int a = 0; a < npc; ++a) {
          int nd;
          in >> nd;
          ds.mesh.cell_nodes.push_back(nd);
        }
      }
    } else if (tok == "CELL_TYPES") {
      long n;
      in >> n;
      int t = 0;
      for (long i = 0; i < n; ++i) in >> t;
      ds.mesh.kind = kind_from_vtk(t);
      ds.mesh.dim = ds.mesh.kind == CellKind::Hex8 ? 3 : 2;
    } else if (tok == "POINT_DATA") {
      in >> npoints;
      section = Point;
    } else if (tok == "CELL_DATA") {
      in >> ncells;
      section = Cell;
    } else if (tok == "SCALARS") {
      std::string name, type;
      int comps = 1;
      in >> name >> type;
      if (in.peek() != '\n') in >> comps;
      in >> tok >> tok;  // LOOKUP_TABLE default
      const long n = section == Point ? npoints : ncells;
      std::vector<double> values(n);
      for (long i = 0; i < n; ++i) in >> values[i];
      (section == Point ? ds.fields.point_data : ds.fields.cell_data)[name] = std::move(values);
    }
  }
  return ds;
}

}  // namespace vifem
