#pragma once

// Closed oriented triangulated surfaces as half-edge meshes whose halfedges
// carry deck-transformation words, plus the developed positions of a
// fundamental domain used to derive conformal structures and initial maps.

#include "pshlab/hypgeom.hpp"
#include "pshlab/words.hpp"

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pshlab::surface {

using hypgeom::Model;
using hypgeom::ModelIsometry;
using hypgeom::ModelPoint;

struct Halfedge {
  int origin = -1;
  int twin = -1;
  int next = -1;
  int face = -1;
};

struct ValidationReport {
  std::vector<std::string> problems;
  bool ok() const { return problems.empty(); }
};

/// Triangle mesh; face f owns halfedges 3f, 3f+1, 3f+2, with halfedge 3f+k
/// running from corner k to corner k+1. `label(h)` is the deck word such that
/// the lift of dest(h) adjacent to the lift of origin(h) is rho(label) * dest.
class HalfEdgeMesh {
public:
  HalfEdgeMesh() = default;

  /// Builds twins by matching (u -> v, w) with (v -> u, w^-1) and validates.
  static HalfEdgeMesh from_faces(int num_vertices, const std::vector<std::array<int, 3>>& faces,
                                 const std::vector<Word>& labels, int genus);

  /// No checks; used to construct corrupt fixtures for `validate`.
  static HalfEdgeMesh from_raw(int num_vertices, std::vector<Halfedge> halfedges,
                               std::vector<Word> labels, int genus);

  int num_vertices() const { return num_vertices_; }
  int num_faces() const { return static_cast<int>(halfedges_.size() / 3); }
  int num_halfedges() const { return static_cast<int>(halfedges_.size()); }
  int num_edges() const { return num_halfedges() / 2; }
  int genus() const { return genus_; }
  int euler_characteristic() const { return num_vertices_ - num_edges() + num_faces(); }

  const Halfedge& halfedge(int h) const { return halfedges_[h]; }
  int origin(int h) const { return halfedges_[h].origin; }
  int dest(int h) const { return halfedges_[halfedges_[h].next].origin; }
  int twin(int h) const { return halfedges_[h].twin; }
  int next(int h) const { return halfedges_[h].next; }
  const Word& label(int h) const { return labels_[h]; }
  const std::vector<Word>& labels() const { return labels_; }

  std::array<int, 3> face_vertices(int f) const;
  /// True for the halfedge of each edge pair with the smaller id.
  bool is_edge_owner(int h) const { return h < halfedges_[h].twin; }
  /// Owner halfedges in increasing id order, one per edge.
  std::vector<int> edges() const;

  /// Product of the three labels of face f (free reduced).
  Word face_word(int f) const;

  ValidationReport validate() const;
  void validate_or_throw() const;

private:
  int num_vertices_ = 0;
  int genus_ = 0;
  std::vector<Halfedge> halfedges_;
  std::vector<Word> labels_;
};

/// Canonical lifts of the vertices in a model and the deck group acting on
/// that model (the domain representation of the crossing letters).
struct Development {
  Model model = Model::Euclidean;
  std::vector<ModelPoint> position;
  std::map<char, ModelIsometry> generators;

  ModelIsometry evaluate(const Word& w) const;
};

struct Surface {
  HalfEdgeMesh mesh;
  Development dev;

  /// Corner lifts of face f in the sheet of its corner 0.
  std::array<ModelPoint, 3> face_lift(int f) const;
};

struct VertexProvenance {
  enum class Kind { OldVertex, EdgeMidpoint };
  Kind kind = Kind::OldVertex;
  int parent = -1;  ///< parent vertex id or parent owner halfedge id
};

struct RefinementMap {
  Surface parent;
  Surface child;
  std::vector<VertexProvenance> provenance;
};

/// n x n grid on the unit-square torus, 2n^2 triangles, generators a, b.
Surface build_torus(int n);

/// Regular hyperbolic octagon with side pairing abABcdCD, triangulated by a
/// twice-subdivided eight-sector fan, then refined `levels` times.
Surface build_genus2_octagon(int levels);

/// 1 -> 4 midpoint subdivision; midpoints are model geodesic midpoints.
RefinementMap refine(const Surface& s);

/// Deck generators of the regular octagon (45 degree corners) as SL(2,R)
/// matrices; shared with the Fuchsian target.
std::map<char, ModelIsometry> octagon_side_pairings();

/// Disk radius of the octagon corners.
double octagon_corner_radius();

// Mesh file IO (JSON document; see README for the schema).
Surface load_surface(const std::string& path);
void save_surface(const Surface& s, const std::string& path);
std::string surface_to_json(const Surface& s);
Surface surface_from_json(const std::string& text);

}  // namespace pshlab::surface
