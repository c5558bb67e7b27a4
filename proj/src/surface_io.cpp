#include "pshlab/error.hpp"
#include "pshlab/surface.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace pshlab::surface {

using nlohmann::json;

namespace {

Model parse_model(const std::string& name) {
  if (name == "hyperbolic_disk") return Model::HyperbolicDisk;
  if (name == "euclidean") return Model::Euclidean;
  throw Error(ErrorCode::InvalidMesh, "unknown model '" + name + "'", "mesh-io");
}

}  // namespace

std::string surface_to_json(const Surface& s) {
  const HalfEdgeMesh& m = s.mesh;
  json doc;
  doc["genus"] = m.genus();
  doc["vertices"] = m.num_vertices();
  json faces = json::array();
  for (int f = 0; f < m.num_faces(); ++f) {
    const auto v = m.face_vertices(f);
    faces.push_back({v[0], v[1], v[2]});
  }
  doc["faces"] = faces;
  json crossings = json::object();
  for (int h = 0; h < m.num_halfedges(); ++h)
    if (!m.label(h).empty()) crossings[std::to_string(h)] = m.label(h);
  doc["crossings"] = crossings;
  if (!s.dev.position.empty()) {
    doc["model"] = hypgeom::to_string(s.dev.model);
    json pos = json::array();
    for (const auto& p : s.dev.position) pos.push_back({p.coords.x(), p.coords.y()});
    doc["positions"] = pos;
    json gens = json::object();
    for (const auto& [letter, g] : s.dev.generators) {
      const std::string key(1, letter);
      if (g.kind() == ModelIsometry::Kind::Moebius) {
        const auto& a = g.matrix();
        gens[key] = {{a(0, 0), a(0, 1)}, {a(1, 0), a(1, 1)}};
      } else {
        gens[key] = {g.offset().x(), g.offset().y()};
      }
    }
    doc["generators"] = gens;
  }
  return doc.dump(1);
}

Surface surface_from_json(const std::string& text) {
  Surface s;
  try {
    const json doc = json::parse(text);
    const int genus = doc.at("genus").get<int>();
    const int nv = doc.at("vertices").get<int>();
    std::vector<std::array<int, 3>> faces;
    for (const auto& f : doc.at("faces")) {
      if (f.size() != 3) throw Error(ErrorCode::InvalidMesh, "faces must be triangles", "mesh-io");
      faces.push_back({f[0].get<int>(), f[1].get<int>(), f[2].get<int>()});
    }
    std::vector<Word> labels(3 * faces.size());
    if (doc.contains("crossings")) {
      for (const auto& [key, value] : doc["crossings"].items()) {
        const size_t h = std::stoul(key);
        if (h >= labels.size())
          throw Error(ErrorCode::InvalidMesh, "crossing for unknown halfedge " + key, "mesh-io");
        labels[h] = value.get<std::string>();
        for (char c : labels[h])
          if (!is_crossing_letter(c))
            throw Error(ErrorCode::InvalidMesh, "invalid letter in crossing " + key, "mesh-io");
      }
    }
    s.mesh = HalfEdgeMesh::from_faces(nv, faces, labels, genus);
    if (doc.contains("positions")) {
      s.dev.model = parse_model(doc.at("model").get<std::string>());
      for (const auto& p : doc["positions"]) {
        const double x = p.at(0).get<double>();
        const double y = p.at(1).get<double>();
        s.dev.position.push_back(s.dev.model == Model::HyperbolicDisk ? ModelPoint::disk(x, y)
                                                                      : ModelPoint::euclid(x, y));
      }
      if (static_cast<int>(s.dev.position.size()) != nv)
        throw Error(ErrorCode::InvalidMesh, "position count differs from vertex count", "mesh-io");
      for (const auto& [key, value] : doc.at("generators").items()) {
        if (key.size() != 1 || !is_crossing_letter(key[0]))
          throw Error(ErrorCode::InvalidMesh, "bad generator name '" + key + "'", "mesh-io");
        if (s.dev.model == Model::HyperbolicDisk) {
          Eigen::Matrix2d a;
          a << value.at(0).at(0).get<double>(), value.at(0).at(1).get<double>(),
              value.at(1).at(0).get<double>(), value.at(1).at(1).get<double>();
          s.dev.generators.emplace(key[0], ModelIsometry::moebius(a));
        } else {
          s.dev.generators.emplace(
              key[0], ModelIsometry::translation({value.at(0).get<double>(), value.at(1).get<double>()}));
        }
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidMesh, std::string("malformed mesh document: ") + e.what(), "mesh-io");
  } catch (const std::logic_error& e) {
    throw Error(ErrorCode::InvalidMesh, std::string("malformed mesh document: ") + e.what(), "mesh-io");
  } catch (const Error& e) {
    throw e.stage().empty() ? e.with_stage("mesh-io") : e;
  }
  return s;
}

Surface load_surface(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open mesh file " + path, "mesh-io");
  std::stringstream ss;
  ss << in.rdbuf();
  return surface_from_json(ss.str());
}

void save_surface(const Surface& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write mesh file " + path, "mesh-io");
  out << surface_to_json(s) << '\n';
}

}  // namespace pshlab::surface
