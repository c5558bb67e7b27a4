#include "pshlab/target.hpp"

#include "pshlab/error.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

namespace pshlab::target {

namespace {

void require_factors(const Target& t, size_t n) {
  if (static_cast<size_t>(t.num_factors()) != n)
    throw Error(ErrorCode::ModelMismatch, "target vector has the wrong number of factors", "target");
}

}  // namespace

Target::Target(std::vector<Model> factors, std::map<char, std::vector<ModelIsometry>> rep, std::string name)
    : factors_(std::move(factors)), rep_(std::move(rep)), name_(std::move(name)) {
  for (const auto& [letter, gs] : rep_) {
    if (!is_crossing_letter(letter) || letter != std::tolower(static_cast<unsigned char>(letter)))
      throw Error(ErrorCode::InvalidArgument, "representation keys must be lower-case letters", "target");
    if (gs.size() != factors_.size())
      throw Error(ErrorCode::InvalidArgument, "representation entry per factor required", "target");
    for (size_t k = 0; k < gs.size(); ++k)
      if (gs[k].model() != factors_[k])
        throw Error(ErrorCode::ModelMismatch, "isometry does not act on its factor", "target");
  }
}

ModelIsometry Target::evaluate(const Word& w, int factor) const {
  ModelIsometry g = ModelIsometry::identity(factors_[factor]);
  for (char c : w) {
    const char lower = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    auto it = rep_.find(lower);
    if (it == rep_.end()) continue;
    const ModelIsometry& h = it->second[factor];
    g = g.compose(c == lower ? h : h.inverse());
  }
  return g;
}

double Target::face_word_defect(const surface::HalfEdgeMesh& mesh) const {
  double worst = 0.0;
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const Word w = mesh.label(3 * f) + mesh.label(3 * f + 1) + mesh.label(3 * f + 2);
    for (int k = 0; k < num_factors(); ++k) worst = std::max(worst, evaluate(w, k).deviation_from_identity());
  }
  return worst;
}

double Target::relator_defect(int genus) const {
  const SurfaceGroup group(genus);
  double worst = 0.0;
  for (int k = 0; k < num_factors(); ++k)
    worst = std::max(worst, evaluate(group.relator(), k).deviation_from_identity());
  return worst;
}

double Target::distance(const TargetPoint& p, const TargetPoint& q) const {
  require_factors(*this, p.size());
  require_factors(*this, q.size());
  double d2 = 0.0;
  for (size_t k = 0; k < p.size(); ++k) d2 += std::pow(hypgeom::distance(p[k], q[k]), 2);
  return std::sqrt(d2);
}

TargetVec Target::log(const TargetPoint& p, const TargetPoint& q) const {
  require_factors(*this, p.size());
  require_factors(*this, q.size());
  TargetVec v;
  for (size_t k = 0; k < p.size(); ++k) v.parts.push_back(hypgeom::log_map(p[k], q[k]));
  return v;
}

TargetPoint Target::exp(const TargetVec& v) const {
  require_factors(*this, v.parts.size());
  TargetPoint p;
  for (const auto& part : v.parts) p.push_back(hypgeom::exp_map(part));
  return p;
}

TargetVec Target::transport(const TargetVec& v, const TargetPoint& to) const {
  require_factors(*this, v.parts.size());
  require_factors(*this, to.size());
  TargetVec out;
  for (size_t k = 0; k < to.size(); ++k) out.parts.push_back(hypgeom::transport(v.parts[k], to[k]));
  return out;
}

double Target::inner(const TargetVec& x, const TargetVec& y) const {
  require_factors(*this, x.parts.size());
  require_factors(*this, y.parts.size());
  double s = 0.0;
  for (size_t k = 0; k < x.parts.size(); ++k) s += hypgeom::inner(x.parts[k], y.parts[k]);
  return s;
}

double Target::curvature(const TargetVec& x, const TargetVec& y, const TargetVec& z,
                         const TargetVec& w) const {
  double s = 0.0;
  for (int k = 0; k < num_factors(); ++k)
    s += hypgeom::curvature(x.parts[k], y.parts[k], z.parts[k], w.parts[k]);
  return s;
}

cplx Target::complex_curvature(const ComplexTargetVec& x, const ComplexTargetVec& y,
                               const ComplexTargetVec& z, const ComplexTargetVec& w) const {
  require_factors(*this, x.parts.size());
  cplx s = 0.0;
  // The product metric has block-diagonal curvature: factors do not mix.
  for (int k = 0; k < num_factors(); ++k)
    s += hypgeom::complex_curvature(x.parts[k], y.parts[k], z.parts[k], w.parts[k]);
  return s;
}

double Target::hermitian_curvature(const ComplexTargetVec& x, const ComplexTargetVec& y) const {
  ComplexTargetVec xc, yc;
  for (const auto& p : x.parts) xc.parts.push_back(p.conj());
  for (const auto& p : y.parts) yc.parts.push_back(p.conj());
  return complex_curvature(x, y, xc, yc).real();
}

// --- instances ------------------------------------------------------------------

Target flat_torus_target(const Eigen::Matrix2d& basis, const std::map<char, std::array<int, 2>>& degree) {
  if (std::abs(basis.determinant()) < 1e-12)
    throw Error(ErrorCode::DegenerateLattice, "torus lattice basis is degenerate", "target");
  std::map<char, std::vector<ModelIsometry>> rep;
  for (const auto& [letter, d] : degree) {
    const hypgeom::Vec2 shift = d[0] * basis.col(0) + d[1] * basis.col(1);
    rep[letter] = {ModelIsometry::translation(shift)};
  }
  return Target({Model::Euclidean}, std::move(rep), "torus");
}

Target flat_torus_target(const Eigen::Matrix2d& basis, const Eigen::Matrix2i& degree) {
  return flat_torus_target(basis, {{'a', {degree(0, 0), degree(0, 1)}}, {'b', {degree(1, 0), degree(1, 1)}}});
}

Target octagon_generators() {
  std::map<char, std::vector<ModelIsometry>> rep;
  for (const auto& [letter, g] : surface::octagon_side_pairings()) rep[letter] = {g};
  return Target({Model::HyperbolicDisk}, std::move(rep), "genus2");
}

Target product_target(const Target& t1, const Target& t2) {
  std::vector<Model> factors;
  for (int k = 0; k < t1.num_factors(); ++k) factors.push_back(t1.factor_model(k));
  for (int k = 0; k < t2.num_factors(); ++k) factors.push_back(t2.factor_model(k));
  std::map<char, std::vector<ModelIsometry>> rep;
  std::string letters;
  for (const auto& [l, g] : t1.representation()) letters += l;
  for (const auto& [l, g] : t2.representation()) letters += l;
  for (char l : letters) {
    if (rep.count(l)) continue;
    std::vector<ModelIsometry> gs;
    for (int k = 0; k < t1.num_factors(); ++k) gs.push_back(t1.evaluate(Word(1, l), k));
    for (int k = 0; k < t2.num_factors(); ++k) gs.push_back(t2.evaluate(Word(1, l), k));
    rep[l] = std::move(gs);
  }
  return Target(std::move(factors), std::move(rep), t1.name() + "x" + t2.name());
}

Target with_representation_file(const Target& t, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open representation file " + path, "target");
  std::vector<Model> factors;
  for (int k = 0; k < t.num_factors(); ++k) factors.push_back(t.factor_model(k));
  std::map<char, std::vector<ModelIsometry>> rep;
  for (char l : std::string("abcd")) {
    std::vector<ModelIsometry> gs;
    for (int k = 0; k < t.num_factors(); ++k) gs.push_back(t.evaluate(Word(1, l), k));
    rep[l] = std::move(gs);
  }
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    char letter;
    int factor;
    if (!(ls >> letter)) continue;
    const std::string where = path + ":" + std::to_string(lineno);
    if (!(ls >> factor) || factor < 0 || factor >= t.num_factors() || !rep.count(letter))
      throw Error(ErrorCode::Config, where + ": bad letter or factor", "target");
    std::vector<double> v;
    for (double x; ls >> x;) v.push_back(x);
    if (factors[factor] == Model::HyperbolicDisk && v.size() == 4) {
      Eigen::Matrix2d m;
      m << v[0], v[1], v[2], v[3];
      rep[letter][factor] = ModelIsometry::moebius(m);
    } else if (factors[factor] == Model::Euclidean && v.size() == 2) {
      rep[letter][factor] = ModelIsometry::translation({v[0], v[1]});
    } else {
      throw Error(ErrorCode::Config, where + ": wrong number of entries", "target");
    }
  }
  return Target(std::move(factors), std::move(rep), t.name());
}

TorusOracle torus_harmonic_oracle(cplx domain_modulus, const Eigen::Matrix2d& lattice,
                                  const Eigen::Matrix2i& degree) {
  if (!(domain_modulus.imag() > 0.0))
    throw Error(ErrorCode::DegenerateLattice, "domain modulus must lie in the upper half plane", "target");
  if (std::abs(lattice.determinant()) < 1e-12)
    throw Error(ErrorCode::DegenerateLattice, "torus lattice basis is degenerate", "target");
  // Images of the domain periods 1 and tau.
  Eigen::Matrix2d images;
  images.col(0) = lattice * degree.row(0).transpose().cast<double>();
  images.col(1) = lattice * degree.row(1).transpose().cast<double>();
  Eigen::Matrix2d periods;
  periods << 1.0, domain_modulus.real(), 0.0, domain_modulus.imag();
  TorusOracle out;
  out.linear = images * periods.inverse();
  out.energy = 0.5 * out.linear.squaredNorm() * domain_modulus.imag();
  return out;
}

double sample_max_hermitian_curvature(const Target& t, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  auto gauss = [&] {
    // Box-Muller on the portable uniform source.
    const double u1 = 1.0 - unit(), u2 = unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::acos(-1.0) * u2);
  };
  double worst = -std::numeric_limits<double>::infinity();
  for (int n = 0; n < samples; ++n) {
    ComplexTargetVec x, y;
    for (int k = 0; k < t.num_factors(); ++k) {
      ModelPoint p;
      if (t.factor_model(k) == Model::HyperbolicDisk) {
        const double r = 0.9 * std::sqrt(unit()), a = 2.0 * std::acos(-1.0) * unit();
        p = ModelPoint::disk(r * std::cos(a), r * std::sin(a));
      } else {
        p = ModelPoint::euclid(unit(), unit());
      }
      ComplexTangentVec xv{p, {}}, yv{p, {}};
      for (int i = 0; i < 2; ++i) {
        xv.components[i] = {gauss(), gauss()};
        yv.components[i] = {gauss(), gauss()};
      }
      x.parts.push_back(xv);
      y.parts.push_back(yv);
    }
    worst = std::max(worst, t.hermitian_curvature(x, y));
  }
  return worst;
}

}  // namespace pshlab::target
