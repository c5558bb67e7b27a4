#include "pshlab/surface.hpp"

#include "pshlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <set>
#include <tuple>

namespace pshlab::surface {

using hypgeom::cplx;
using hypgeom::Vec2;

// --- half-edge mesh ----------------------------------------------------------

HalfEdgeMesh HalfEdgeMesh::from_raw(int num_vertices, std::vector<Halfedge> halfedges,
                                    std::vector<Word> labels, int genus) {
  HalfEdgeMesh m;
  m.num_vertices_ = num_vertices;
  m.genus_ = genus;
  m.halfedges_ = std::move(halfedges);
  m.labels_ = std::move(labels);
  return m;
}

HalfEdgeMesh HalfEdgeMesh::from_faces(int num_vertices, const std::vector<std::array<int, 3>>& faces,
                                      const std::vector<Word>& labels, int genus) {
  const int nh = static_cast<int>(faces.size()) * 3;
  if (static_cast<int>(labels.size()) != nh)
    throw Error(ErrorCode::InvalidMesh, "need one crossing label per halfedge");
  std::vector<Halfedge> hes(nh);
  std::vector<Word> reduced(nh);
  std::map<std::tuple<int, int, Word>, int> lookup;
  for (int f = 0; f < static_cast<int>(faces.size()); ++f) {
    for (int k = 0; k < 3; ++k) {
      const int h = 3 * f + k;
      const int u = faces[f][k];
      if (u < 0 || u >= num_vertices)
        throw Error(ErrorCode::InvalidMesh, "face " + std::to_string(f) + " has a bad vertex index");
      hes[h].origin = u;
      hes[h].next = 3 * f + (k + 1) % 3;
      hes[h].face = f;
      reduced[h] = free_reduce(labels[h]);
      const auto key = std::make_tuple(u, faces[f][(k + 1) % 3], reduced[h]);
      if (!lookup.emplace(key, h).second)
        throw Error(ErrorCode::InvalidMesh,
                    "halfedge " + std::to_string(h) + " duplicates an oriented edge");
    }
  }
  for (int h = 0; h < nh; ++h) {
    const int u = hes[h].origin;
    const int v = hes[hes[h].next].origin;
    auto it = lookup.find(std::make_tuple(v, u, inverse_word(reduced[h])));
    if (it == lookup.end())
      throw Error(ErrorCode::InvalidMesh, "halfedge " + std::to_string(h) + " has no twin");
    hes[h].twin = it->second;
  }
  HalfEdgeMesh m = from_raw(num_vertices, std::move(hes), std::move(reduced), genus);
  m.validate_or_throw();
  return m;
}

std::array<int, 3> HalfEdgeMesh::face_vertices(int f) const {
  return {origin(3 * f), origin(3 * f + 1), origin(3 * f + 2)};
}

std::vector<int> HalfEdgeMesh::edges() const {
  std::vector<int> out;
  out.reserve(halfedges_.size() / 2);
  for (int h = 0; h < num_halfedges(); ++h)
    if (is_edge_owner(h)) out.push_back(h);
  return out;
}

Word HalfEdgeMesh::face_word(int f) const {
  return free_reduce(labels_[3 * f] + labels_[3 * f + 1] + labels_[3 * f + 2]);
}

ValidationReport HalfEdgeMesh::validate() const {
  ValidationReport r;
  auto problem = [&](const std::string& s) { r.problems.push_back(s); };
  const int nh = num_halfedges();
  if (genus_ != 1 && genus_ != 2) problem("unsupported genus " + std::to_string(genus_));
  if (nh == 0 || nh % 3 != 0) problem("halfedge count must be a positive multiple of 3");
  if (static_cast<int>(labels_.size()) != nh) problem("label count differs from halfedge count");
  if (!r.ok()) return r;

  bool structural = true;
  for (int h = 0; h < nh; ++h) {
    const Halfedge& e = halfedges_[h];
    const std::string tag = "halfedge " + std::to_string(h);
    if (e.origin < 0 || e.origin >= num_vertices_) {
      problem(tag + ": origin out of range");
      structural = false;
    }
    if (e.face != h / 3 || e.next != 3 * (h / 3) + (h % 3 + 1) % 3) {
      problem(tag + ": face/next inconsistent with the triangle layout");
      structural = false;
    }
    if (e.twin < 0 || e.twin >= nh) {
      problem(tag + ": twin out of range");
      structural = false;
      continue;
    }
    if (e.twin == h) problem(tag + ": twin is a fixed point");
    if (halfedges_[e.twin].twin != h) problem(tag + ": twin is not an involution");
  }
  if (!structural || !r.ok()) return r;

  for (int h = 0; h < nh; ++h) {
    const int t = twin(h);
    const std::string tag = "halfedge " + std::to_string(h);
    // Opposite orientation: twin runs v -> u.
    if (origin(t) != dest(h) || dest(t) != origin(h))
      problem(tag + ": twin does not have opposite orientation");
    for (char c : labels_[h])
      if (!is_crossing_letter(c)) problem(tag + ": invalid letter in label");
    if (free_reduce(labels_[h]) != inverse_word(free_reduce(labels_[t])))
      problem(tag + ": label is not the inverse of its twin's label");
  }
  if (!r.ok()) return r;

  const int expected_chi = 2 - 2 * genus_;
  if (euler_characteristic() != expected_chi)
    problem("Euler characteristic " + std::to_string(euler_characteristic()) +
            " does not match genus " + std::to_string(genus_));

  SurfaceGroup group(genus_);
  for (int f = 0; f < num_faces(); ++f)
    if (!group.is_trivial(face_word(f)))
      problem("face " + std::to_string(f) + ": crossing word around the face is nontrivial");

  // Every vertex link must be a single cycle: walk twin(prev(h)) around each vertex.
  std::vector<int> out_degree(num_vertices_, 0);
  for (int h = 0; h < nh; ++h) ++out_degree[origin(h)];
  std::vector<char> seen(nh, 0);
  std::vector<int> cycles(num_vertices_, 0);
  for (int h = 0; h < nh; ++h) {
    if (seen[h]) continue;
    int cur = h;
    do {
      seen[cur] = 1;
      const int prev = next(next(cur));
      cur = twin(prev);
    } while (cur != h && !seen[cur]);
    ++cycles[origin(h)];
  }
  for (int v = 0; v < num_vertices_; ++v) {
    if (out_degree[v] == 0) problem("vertex " + std::to_string(v) + " is isolated");
    else if (cycles[v] != 1) problem("vertex " + std::to_string(v) + " is not a manifold vertex");
  }
  return r;
}

void HalfEdgeMesh::validate_or_throw() const {
  const ValidationReport r = validate();
  if (!r.ok()) throw Error(ErrorCode::InvalidMesh, r.problems.front(), "surface");
}

// --- development --------------------------------------------------------------

ModelIsometry Development::evaluate(const Word& w) const {
  ModelIsometry g = ModelIsometry::identity(model);
  for (char c : w) {
    const char lower = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    auto it = generators.find(lower);
    if (it == generators.end())
      throw Error(ErrorCode::InvalidArgument, std::string("no generator for letter ") + c);
    g = g.compose(c == lower ? it->second : it->second.inverse());
  }
  return g;
}

std::array<ModelPoint, 3> Surface::face_lift(int f) const {
  if (dev.position.size() != static_cast<size_t>(mesh.num_vertices()))
    throw Error(ErrorCode::InvalidArgument, "surface has no development");
  const auto v = mesh.face_vertices(f);
  const Word w0 = mesh.label(3 * f);
  const Word w01 = free_reduce(w0 + mesh.label(3 * f + 1));
  return {dev.position[v[0]], dev.evaluate(w0).apply(dev.position[v[1]]),
          dev.evaluate(w01).apply(dev.position[v[2]])};
}

// --- polygon assembly ----------------------------------------------------------

namespace {

constexpr double kMatchTol = 1e-8;

// A triangulated fundamental polygon: copies of vertices at model positions,
// faces on the copies, and the side pairings gluing the boundary.
struct PolygonComplex {
  Model model = Model::Euclidean;
  int genus = 1;
  std::vector<ModelPoint> copies;
  std::vector<std::array<int, 3>> faces;
  std::map<char, ModelIsometry> pairings;
};

Surface assemble(const PolygonComplex& pc) {
  const int nc = static_cast<int>(pc.copies.size());
  const int nf = static_cast<int>(pc.faces.size());

  // Directed copy edges -> halfedge id.
  std::map<std::pair<int, int>, int> directed;
  for (int f = 0; f < nf; ++f)
    for (int k = 0; k < 3; ++k)
      directed[{pc.faces[f][k], pc.faces[f][(k + 1) % 3]}] = 3 * f + k;

  std::vector<char> on_boundary(nc, 0);
  for (const auto& [uv, h] : directed)
    if (!directed.count({uv.second, uv.first})) on_boundary[uv.first] = on_boundary[uv.second] = 1;

  // image[c][letter] = copy reached from c by applying the letter's isometry.
  std::vector<std::map<char, int>> image(nc);
  std::vector<std::vector<std::pair<int, char>>> adj(nc);
  for (const auto& [letter, g] : pc.pairings) {
    for (int c = 0; c < nc; ++c) {
      if (!on_boundary[c]) continue;
      const cplx target = g.apply_chart(pc.copies[c].z());
      for (int d = 0; d < nc; ++d) {
        if (!on_boundary[d] || std::abs(pc.copies[d].z() - target) > kMatchTol) continue;
        image[c][letter] = d;
        image[d][inverse_letter(letter)] = c;
        adj[c].push_back({d, letter});
        adj[d].push_back({c, inverse_letter(letter)});
      }
    }
  }

  // Vertex ids in order of first copy; BFS over the gluing graph assigns words with
  // copy(c') = rho(word(c')) * canonical.
  std::vector<int> vertex_of(nc, -1);
  std::vector<Word> word(nc);
  std::vector<ModelPoint> canonical;
  for (int c = 0; c < nc; ++c) {
    if (vertex_of[c] >= 0) continue;
    const int id = static_cast<int>(canonical.size());
    canonical.push_back(pc.copies[c]);
    vertex_of[c] = id;
    std::queue<int> queue;
    queue.push(c);
    while (!queue.empty()) {
      const int x = queue.front();
      queue.pop();
      for (const auto& [y, letter] : adj[x]) {
        if (vertex_of[y] >= 0) continue;
        vertex_of[y] = id;
        word[y] = free_reduce(Word(1, letter) + word[x]);
        queue.push(y);
      }
    }
  }
  std::vector<Halfedge> hes(3 * nf);
  std::vector<Word> labels(3 * nf);
  for (int f = 0; f < nf; ++f) {
    for (int k = 0; k < 3; ++k) {
      const int h = 3 * f + k;
      const int a = pc.faces[f][k];
      const int b = pc.faces[f][(k + 1) % 3];
      hes[h] = {vertex_of[a], -1, 3 * f + (k + 1) % 3, f};
      auto inner = directed.find({b, a});
      if (inner != directed.end()) {
        hes[h].twin = inner->second;
        continue;
      }
      // Seam: the partner is the image of this side under a single letter.
      for (const auto& [letter, a2] : image[a]) {
        auto bt = image[b].find(letter);
        if (bt == image[b].end()) continue;
        auto partner = directed.find({bt->second, a2});
        if (partner != directed.end()) {
          hes[h].twin = partner->second;
          break;
        }
      }
      if (hes[h].twin < 0)
        throw Error(ErrorCode::InvalidMesh, "unmatched boundary side during assembly");
    }
  }
  for (int h = 0; h < 3 * nf; ++h) {
    if (h > hes[h].twin) continue;
    const int f = h / 3;
    const int a = pc.faces[f][h % 3];
    const int b = pc.faces[f][(h % 3 + 1) % 3];
    labels[h] = free_reduce(inverse_word(word[a]) + word[b]);
    labels[hes[h].twin] = inverse_word(labels[h]);
  }

  Surface s;
  s.mesh = HalfEdgeMesh::from_raw(static_cast<int>(canonical.size()), std::move(hes),
                                  std::move(labels), pc.genus);
  s.mesh.validate_or_throw();
  s.dev.model = pc.model;
  s.dev.position = std::move(canonical);
  s.dev.generators = pc.pairings;
  return s;
}

}  // namespace

// --- builders ---------------------------------------------------------------------

namespace {

ModelPoint geodesic_midpoint(const ModelPoint& p, const ModelPoint& q) {
  hypgeom::TangentVec v = hypgeom::log_map(p, q);
  v.components *= 0.5;
  return hypgeom::exp_map(v);
}

int find_or_add_copy(std::vector<ModelPoint>& copies, const ModelPoint& p) {
  for (int i = 0; i < static_cast<int>(copies.size()); ++i)
    if ((copies[i].coords - p.coords).norm() < 1e-10) return i;
  copies.push_back(p);
  return static_cast<int>(copies.size()) - 1;
}

// Recursive 1 -> 4 split of a copy-level triangle.
void subdivide_into(PolygonComplex& pc, const std::array<ModelPoint, 3>& t, int depth) {
  if (depth == 0) {
    std::array<int, 3> face;
    for (int k = 0; k < 3; ++k) face[k] = find_or_add_copy(pc.copies, t[k]);
    pc.faces.push_back(face);
    return;
  }
  const ModelPoint m0 = geodesic_midpoint(t[0], t[1]);
  const ModelPoint m1 = geodesic_midpoint(t[1], t[2]);
  const ModelPoint m2 = geodesic_midpoint(t[2], t[0]);
  subdivide_into(pc, {t[0], m0, m2}, depth - 1);
  subdivide_into(pc, {t[1], m1, m0}, depth - 1);
  subdivide_into(pc, {t[2], m2, m1}, depth - 1);
  subdivide_into(pc, {m0, m1, m2}, depth - 1);
}

Eigen::Matrix2cd su11_rotation(double theta) {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  m(0, 0) = std::polar(1.0, theta / 2.0);
  m(1, 1) = std::polar(1.0, -theta / 2.0);
  return m;
}

Eigen::Matrix2cd su11_translation(double d) {
  Eigen::Matrix2cd m;
  m << std::cosh(d / 2.0), std::sinh(d / 2.0), std::sinh(d / 2.0), std::cosh(d / 2.0);
  return m;
}

}  // namespace

Surface build_torus(int n) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "torus grid needs n >= 2");
  PolygonComplex pc;
  pc.model = Model::Euclidean;
  pc.genus = 1;
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      pc.copies.push_back(ModelPoint::euclid(static_cast<double>(i) / n, static_cast<double>(j) / n));
  auto id = [n](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      pc.faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      pc.faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  pc.pairings.emplace('a', ModelIsometry::translation(Vec2(1.0, 0.0)));
  pc.pairings.emplace('b', ModelIsometry::translation(Vec2(0.0, 1.0)));
  return assemble(pc);
}

double octagon_corner_radius() {
  const double r = std::acosh(3.0 + 2.0 * std::sqrt(2.0));
  return std::tanh(r / 2.0);
}

std::map<char, ModelIsometry> octagon_side_pairings() {
  const double pi = std::acos(-1.0);
  const double inradius = std::acosh(std::cos(pi / 8.0) / std::sin(pi / 8.0));
  auto side_angle = [pi](int k) { return (2 * k + 1) * pi / 8.0; };
  // Maps side j onto side k, reversing its direction.
  auto pairing = [&](int j, int k) {
    const Eigen::Matrix2cd m = su11_rotation(side_angle(k)) * su11_translation(2.0 * inradius) *
                               su11_rotation(pi - side_angle(j));
    return ModelIsometry::moebius_from_disk(m);
  };
  return {{'a', pairing(2, 0)}, {'b', pairing(1, 3)}, {'c', pairing(6, 4)}, {'d', pairing(5, 7)}};
}

Surface build_genus2_octagon(int levels) {
  if (levels < 0) throw Error(ErrorCode::InvalidArgument, "refinement level must be >= 0");
  PolygonComplex pc;
  pc.model = Model::HyperbolicDisk;
  pc.genus = 2;
  pc.pairings = octagon_side_pairings();
  const double pi = std::acos(-1.0);
  const double rc = octagon_corner_radius();
  const ModelPoint centre = ModelPoint::disk(0.0, 0.0);
  for (int k = 0; k < 8; ++k) {
    const ModelPoint c0 = ModelPoint::disk(rc * std::cos(k * pi / 4.0), rc * std::sin(k * pi / 4.0));
    const ModelPoint c1 =
        ModelPoint::disk(rc * std::cos((k + 1) * pi / 4.0), rc * std::sin((k + 1) * pi / 4.0));
    subdivide_into(pc, {centre, c0, c1}, 2);
  }
  Surface s = assemble(pc);
  for (int l = 0; l < levels; ++l) s = refine(s).child;
  return s;
}

RefinementMap refine(const Surface& s) {
  const HalfEdgeMesh& m = s.mesh;
  const int nv = m.num_vertices();
  const int nh = m.num_halfedges();
  if (s.dev.position.size() != static_cast<size_t>(nv))
    throw Error(ErrorCode::InvalidArgument, "refinement needs a development");

  // Edge index per halfedge, shared by both halves of an edge.
  std::vector<int> edge_of(nh, -1);
  const std::vector<int> owners = m.edges();
  for (int e = 0; e < static_cast<int>(owners.size()); ++e) {
    edge_of[owners[e]] = e;
    edge_of[m.twin(owners[e])] = e;
  }

  RefinementMap out;
  out.parent = s;
  Development& dev = out.child.dev;
  dev.model = s.dev.model;
  dev.generators = s.dev.generators;
  dev.position = s.dev.position;
  out.provenance.assign(nv, {});
  for (int v = 0; v < nv; ++v) out.provenance[v] = {VertexProvenance::Kind::OldVertex, v};
  for (int h : owners) {
    // The midpoint is placed next to the canonical lift of origin(h).
    const ModelPoint far = s.dev.evaluate(m.label(h)).apply(s.dev.position[m.dest(h)]);
    dev.position.push_back(geodesic_midpoint(s.dev.position[m.origin(h)], far));
    out.provenance.push_back({VertexProvenance::Kind::EdgeMidpoint, h});
  }

  std::vector<std::array<int, 3>> faces;
  std::vector<Word> labels;
  faces.reserve(4 * m.num_faces());
  labels.reserve(12 * m.num_faces());
  for (int f = 0; f < m.num_faces(); ++f) {
    const auto v = m.face_vertices(f);
    std::array<Word, 3> w;
    std::array<bool, 3> own;
    std::array<int, 3> mid;
    for (int k = 0; k < 3; ++k) {
      const int h = 3 * f + k;
      w[k] = m.label(h);
      own[k] = m.is_edge_owner(h);
      mid[k] = nv + edge_of[h];
    }
    // Deck words of the corner and midpoint lifts in the frame of corner 0.
    const std::array<Word, 4> gv{Word{}, w[0], free_reduce(w[0] + w[1]), Word{}};
    std::array<Word, 3> gm;
    for (int k = 0; k < 3; ++k) gm[k] = own[k] ? gv[k] : gv[k + 1];

    auto first_half = [&](int k) { return own[k] ? Word{} : w[k]; };   // v_k -> m_k
    auto second_half = [&](int k) { return own[k] ? w[k] : Word{}; };  // m_k -> v_{k+1}
    auto between = [&](int a, int b) { return free_reduce(inverse_word(gm[a]) + gm[b]); };

    faces.push_back({v[0], mid[0], mid[2]});
    labels.insert(labels.end(), {first_half(0), between(0, 2), second_half(2)});
    faces.push_back({v[1], mid[1], mid[0]});
    labels.insert(labels.end(), {first_half(1), between(1, 0), second_half(0)});
    faces.push_back({v[2], mid[2], mid[1]});
    labels.insert(labels.end(), {first_half(2), between(2, 1), second_half(1)});
    faces.push_back({mid[0], mid[1], mid[2]});
    labels.insert(labels.end(), {between(0, 1), between(1, 2), between(2, 0)});
  }
  out.child.mesh = HalfEdgeMesh::from_faces(static_cast<int>(dev.position.size()), faces, labels,
                                            m.genus());
  return out;
}

}  // namespace pshlab::surface
