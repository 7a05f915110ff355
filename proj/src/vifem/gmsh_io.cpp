#include "vifem/gmsh_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace vifem {

namespace {

struct LineReader {
  std::ifstream in;
  int line_no = 0;
  explicit LineReader(const std::string& path) : in(path) {}
  bool next(std::string& out) {
    if (!std::getline(in, out)) return false;
    ++line_no;
    if (!out.empty() && out.back() == '\r') out.pop_back();
    return true;
  }
  std::string expect(const std::string& what) {
    std::string s;
    if (!next(s)) throw GmshParseError("unexpected end of file while reading " + what, line_no);
    return s;
  }
};

}  // namespace

Mesh read_gmsh(const std::string& path) {
  LineReader r(path);
  if (!r.in) throw std::runtime_error("cannot open gmsh file: " + path);

  Mesh mesh;
  mesh.dim = 2;
  mesh.kind = CellKind::Tri3;

  std::map<long, int> node_index;  // gmsh node id -> dense index
  struct RawLine {
    int a, b, tag;
  };
  std::vector<RawLine> lines;
  std::map<int, std::string> names;

  std::string s;
  while (r.next(s)) {
    if (s.empty()) continue;
    if (s == "$MeshFormat") {
      std::istringstream iss(r.expect("$MeshFormat"));
      double version = 0;
      int file_type = 0, data_size = 0;
      iss >> version >> file_type >> data_size;
      if (version != 2.2) throw GmshParseError("unsupported gmsh version (need 2.2)", r.line_no);
      if (file_type != 0) throw GmshParseError("binary gmsh files are not supported", r.line_no);
      if (r.expect("$EndMeshFormat") != "$EndMeshFormat")
        throw GmshParseError("missing $EndMeshFormat", r.line_no);
    } else if (s == "$PhysicalNames") {
      const int count = std::stoi(r.expect("$PhysicalNames count"));
      for (int i = 0; i < count; ++i) {
        std::istringstream iss(r.expect("$PhysicalNames entry"));
        int dim = 0, id = 0;
        std::string name;
        iss >> dim >> id;
        std::getline(iss, name);
        name.erase(std::remove(name.begin(), name.end(), '"'), name.end());
        name.erase(0, name.find_first_not_of(' '));
        names[id] = name;
      }
      if (r.expect("$EndPhysicalNames") != "$EndPhysicalNames")
        throw GmshParseError("missing $EndPhysicalNames", r.line_no);
    } else if (s == "$Nodes") {
      long count = 0;
      try {
        count = std::stol(r.expect("$Nodes count"));
      } catch (const std::exception&) {
        throw GmshParseError("malformed node count in $Nodes", r.line_no);
      }
      mesh.nodes.reserve(count);
      for (long i = 0; i < count; ++i) {
        std::istringstream iss(r.expect("$Nodes"));
        long id;
        double x, y, z;
        if (!(iss >> id >> x >> y >> z)) throw GmshParseError("malformed node line in $Nodes", r.line_no);
        node_index[id] = mesh.node_count();
        mesh.nodes.push_back({x, y, z});
      }
      if (r.expect("$EndNodes") != "$EndNodes") throw GmshParseError("missing $EndNodes", r.line_no);
    } else if (s == "$Elements") {
      long count = 0;
      try {
        count = std::stol(r.expect("$Elements count"));
      } catch (const std::exception&) {
        throw GmshParseError("malformed element count in $Elements", r.line_no);
      }
      for (long i = 0; i < count; ++i) {
        std::istringstream iss(r.expect("$Elements"));
        long id;
        int type, ntags;
        if (!(iss >> id >> type >> ntags)) throw GmshParseError("malformed element line in $Elements", r.line_no);
        int physical = 0;
        for (int t = 0; t < ntags; ++t) {
          int tag;
          if (!(iss >> tag)) throw GmshParseError("malformed element tags in $Elements", r.line_no);
          if (t == 0) physical = tag;
        }
        auto read_node = [&]() {
          long nid;
          if (!(iss >> nid)) throw GmshParseError("missing node reference in $Elements", r.line_no);
          auto it = node_index.find(nid);
          if (it == node_index.end()) throw GmshParseError("element references unknown node", r.line_no);
          return it->second;
        };
        if (type == 1) {
          const int a = read_node(), b = read_node();
          lines.push_back({a, b, physical});
        } else if (type == 2) {
          const int a = read_node(), b = read_node(), c = read_node();
          mesh.cell_nodes.insert(mesh.cell_nodes.end(), {a, b, c});
          bool known = false;
          for (const auto& t : mesh.tags) known |= t.id == physical;
          if (!known && physical != 0) mesh.tags.push_back({physical, 2, TagRole::Volume, names[physical]});
        } else if (type == 15) {
          read_node();  // isolated points carry no benchmark meaning
        } else {
          throw GmshParseError("unsupported element type " + std::to_string(type), r.line_no);
        }
      }
      if (r.expect("$EndElements") != "$EndElements") throw GmshParseError("missing $EndElements", r.line_no);
    } else if (s[0] == '$') {
      if (s.rfind("$End", 0) == 0) continue;
      throw GmshParseError("unknown section " + s, r.line_no);
    }
  }
  if (mesh.cell_count() == 0) throw std::runtime_error("gmsh file contains no triangles: " + path);

  // attach tagged line elements to their owning cells
  std::map<std::pair<int, int>, int> edge_owner_count;
  std::map<std::pair<int, int>, int> edge_owner;
  for (int c = 0; c < mesh.cell_count(); ++c)
    for (int f = 0; f < 3; ++f) {
      const int* lf = local_face_nodes(CellKind::Tri3, f);
      const int a = mesh.cell_node(c, lf[0]), b = mesh.cell_node(c, lf[1]);
      const auto key = std::minmax(a, b);
      edge_owner[key] = c;
      ++edge_owner_count[key];
    }
  for (const RawLine& l : lines) {
    const auto key = std::minmax(l.a, l.b);
    auto it = edge_owner.find(key);
    if (it == edge_owner.end()) continue;  // stray construction line
    if (edge_owner_count[key] != 1) continue;
    mesh.boundary_faces.push_back({it->second, {l.a, l.b}, l.tag});
    bool known = false;
    for (const auto& t : mesh.tags) known |= t.id == l.tag;
    if (!known) {
      const TagRole role = (l.tag >= 16 && l.tag <= 19) ? TagRole::HoleBoundary : TagRole::OuterBoundary;
      mesh.tags.push_back({l.tag, 1, role, names[l.tag]});
    }
  }

  build_interior_faces(mesh);
  return mesh;
}

void write_gmsh(const Mesh& mesh, const std::string& path) {
  if (mesh.kind != CellKind::Tri3) throw std::invalid_argument("write_gmsh: only tri3 meshes are written");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n";
  out << "$Nodes\n" << mesh.node_count() << "\n";
  char buf[128];
  for (int i = 0; i < mesh.node_count(); ++i) {
    std::snprintf(buf, sizeof buf, "%d %.17g %.17g %.17g\n", i + 1, mesh.nodes[i][0], mesh.nodes[i][1],
                  mesh.nodes[i][2]);
    out << buf;
  }
  out << "$EndNodes\n$Elements\n" << (mesh.boundary_faces.size() + mesh.cell_count()) << "\n";
  long id = 1;
  for (const BoundaryFace& bf : mesh.boundary_faces)
    out << id++ << " 1 2 " << bf.tag << " " << bf.tag << " " << bf.nodes[0] + 1 << " " << bf.nodes[1] + 1 << "\n";
  for (int c = 0; c < mesh.cell_count(); ++c)
    out << id++ << " 2 2 20 20 " << mesh.cell_node(c, 0) + 1 << " " << mesh.cell_node(c, 1) + 1 << " "
        << mesh.cell_node(c, 2) + 1 << "\n";
  out << "$EndElements\n";
}

}  // namespace vifem
