#include "pshlab/conformal.hpp"

#include "pshlab/error.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace pshlab::conformal {

using hypgeom::Model;

namespace {

constexpr double kMinQuality = 1e-6;
const double kPi = std::acos(-1.0);

double frob(const Mat2& m) { return m.norm(); }

// Portable uniform double in [0, 1) from the raw 64-bit engine output.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double bump_profile(double t) {
  if (t >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - t * t));
}

cplx face_chart_centre(const surface::Surface& s, int f) {
  const auto t = s.face_lift(f);
  return (t[0].z() + t[1].z() + t[2].z()) / 3.0;
}

double model_distance(const surface::Surface& s, cplx p, cplx q) {
  if (s.dev.model == Model::Euclidean) {
    // Unit-lattice torus: distance to the nearest translate.
    double dx = p.real() - q.real(), dy = p.imag() - q.imag();
    dx -= std::round(dx);
    dy -= std::round(dy);
    return std::hypot(dx, dy);
  }
  return hypgeom::disk::distance(p, q);
}

}  // namespace

// --- structures ------------------------------------------------------------------

ConformalStructure structure_from_surface(const surface::Surface& s) {
  ConformalStructure c;
  c.z2.resize(s.mesh.num_faces());
  for (int f = 0; f < s.mesh.num_faces(); ++f) {
    const auto t = s.face_lift(f);
    if (s.dev.model == Model::Euclidean) {
      c.z2[f] = (t[2].z() - t[0].z()) / (t[1].z() - t[0].z());
    } else {
      // Law of cosines on the geodesic side lengths.
      const double l01 = hypgeom::distance(t[0], t[1]);
      const double l12 = hypgeom::distance(t[1], t[2]);
      const double l20 = hypgeom::distance(t[2], t[0]);
      const double x = (l20 * l20 + l01 * l01 - l12 * l12) / (2.0 * l01 * l01);
      const double r = l20 / l01;
      c.z2[f] = {x, std::sqrt(std::max(0.0, r * r - x * x))};
    }
  }
  require_nondegenerate(c);
  return c;
}

double shape_quality(cplx z2) {
  const double a = std::abs(z2 - 1.0), b = std::abs(z2), c = 1.0;
  const double area = 0.5 * z2.imag();
  if (area <= 0.0) return 0.0;
  const double perimeter = a + b + c;
  const double inradius = 2.0 * area / perimeter;
  const double circumradius = a * b * c / (4.0 * area);
  return inradius / circumradius;
}

void require_nondegenerate(const ConformalStructure& c) {
  for (int f = 0; f < c.num_faces(); ++f)
    if (!(shape_quality(c.z2[f]) >= kMinQuality))
      throw Error(ErrorCode::DegenerateShape, "face " + std::to_string(f) + " is degenerate", "conformal");
}

// --- Beltrami fields ---------------------------------------------------------------

double BeltramiField::max_abs() const {
  double m = 0.0;
  for (cplx v : mu) m = std::max(m, std::abs(v));
  return m;
}

BeltramiField BeltramiField::zero(int num_faces) { return {std::vector<cplx>(num_faces, 0.0)}; }

BeltramiField BeltramiField::from_model(const surface::Surface& s, const std::vector<cplx>& model_mu) {
  if (static_cast<int>(model_mu.size()) != s.mesh.num_faces())
    throw Error(ErrorCode::InvalidArgument, "need one coefficient per face", "conformal");
  BeltramiField b;
  b.mu.resize(model_mu.size());
  for (int f = 0; f < s.mesh.num_faces(); ++f) {
    const auto t = s.face_lift(f);
    const cplx edge = t[1].z() - t[0].z();
    b.mu[f] = model_mu[f] * std::conj(edge) / edge;
  }
  return b;
}

BeltramiField BeltramiField::constant(const surface::Surface& s, cplx model_mu) {
  return from_model(s, std::vector<cplx>(s.mesh.num_faces(), model_mu));
}

BeltramiField BeltramiField::bump(const surface::Surface& s, cplx centre, double radius, cplx amplitude) {
  std::vector<cplx> v(s.mesh.num_faces());
  for (int f = 0; f < s.mesh.num_faces(); ++f)
    v[f] = amplitude * bump_profile(model_distance(s, face_chart_centre(s, f), centre) / radius);
  return from_model(s, v);
}

BeltramiField BeltramiField::random(const surface::Surface& s, std::uint64_t seed, double amplitude) {
  std::mt19937_64 rng(seed);
  auto coeff = [&] { return cplx(2.0 * uniform01(rng) - 1.0, 2.0 * uniform01(rng) - 1.0); };
  const int nf = s.mesh.num_faces();
  std::vector<cplx> v(nf, 0.0);
  if (s.dev.model == Model::Euclidean) {
    // Low-order trigonometric polynomial on the unit torus.
    for (int k1 = -2; k1 <= 2; ++k1) {
      for (int k2 = -2; k2 <= 2; ++k2) {
        const cplx c = coeff();
        for (int f = 0; f < nf; ++f) {
          const cplx p = face_chart_centre(s, f);
          v[f] += c * std::polar(1.0, 2.0 * kPi * (k1 * p.real() + k2 * p.imag()));
        }
      }
    }
  } else {
    // Three bumps supported inside the fundamental octagon.
    for (int k = 0; k < 3; ++k) {
      const cplx centre = std::polar(0.3 * std::sqrt(uniform01(rng)), 2.0 * kPi * uniform01(rng));
      const cplx c = coeff();
      for (int f = 0; f < nf; ++f)
        v[f] += c * bump_profile(model_distance(s, face_chart_centre(s, f), centre) / 0.8);
    }
  }
  double peak = 0.0;
  for (cplx x : v) peak = std::max(peak, std::abs(x));
  if (peak > 0.0)
    for (cplx& x : v) x *= amplitude / peak;
  return from_model(s, v);
}

BeltramiField BeltramiField::load(const std::string& path, int num_faces) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open Beltrami file " + path, "conformal");
  BeltramiField b = zero(num_faces);
  std::vector<char> seen(num_faces, 0);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    int f;
    double re, im;
    if (!(ls >> f)) continue;
    if (!(ls >> re >> im) || f < 0 || f >= num_faces)
      throw Error(ErrorCode::Config, path + ":" + std::to_string(lineno) + ": bad Beltrami entry", "conformal");
    b.mu[f] = {re, im};
    seen[f] = 1;
  }
  for (int f = 0; f < num_faces; ++f)
    if (!seen[f]) throw Error(ErrorCode::Config, path + ": missing face " + std::to_string(f), "conformal");
  if (b.max_abs() >= 1.0) throw Error(ErrorCode::Config, path + ": |mu| must be < 1", "conformal");
  return b;
}

void BeltramiField::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write Beltrami file " + path, "conformal");
  out.precision(17);
  out << "# face re im\n";
  for (size_t f = 0; f < mu.size(); ++f) out << f << ' ' << mu[f].real() << ' ' << mu[f].imag() << '\n';
}

BeltramiField BeltramiField::parse(const std::string& spec, const surface::Surface& s) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  try {
    if (parts[0] == "random" && parts.size() == 3)
      return random(s, std::stoull(parts[1]), std::stod(parts[2]));
    if (parts[0] == "const" && parts.size() == 3)
      return constant(s, {std::stod(parts[1]), std::stod(parts[2])});
    if (parts[0] == "bump" && parts.size() == 6)
      return bump(s, {std::stod(parts[1]), std::stod(parts[2])}, std::stod(parts[3]),
                  {std::stod(parts[4]), std::stod(parts[5])});
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::Config, "malformed Beltrami spec '" + spec + "'", "conformal");
  }
  if (parts[0] == "random" || parts[0] == "const" || parts[0] == "bump")
    throw Error(ErrorCode::Config, "malformed Beltrami spec '" + spec + "'", "conformal");
  return load(spec, s.mesh.num_faces());
}

// --- disk families ------------------------------------------------------------------

DiskFamily::DiskFamily(ConformalStructure base_, BeltramiField direction_, double radius_)
    : base(std::move(base_)), direction(std::move(direction_)), radius(radius_) {
  if (static_cast<int>(direction.mu.size()) != base.num_faces())
    throw Error(ErrorCode::InvalidArgument, "Beltrami field size differs from face count", "conformal");
  if (radius * direction.max_abs() >= 1.0)
    throw Error(ErrorCode::OutsideFamily, "disk radius times max |mu| must be < 1", "conformal");
}

cplx DiskFamily::coefficient(int face, cplx u) const {
  cplx nu = u * direction.mu[face];
  if (!second_order.mu.empty()) nu += u * u * second_order.mu[face];
  return nu;
}

ConformalStructure family_at(const DiskFamily& fam, cplx u) {
  if (std::abs(u) > fam.radius * (1.0 + 1e-12))
    throw Error(ErrorCode::OutsideFamily, "parameter outside the family disk", "conformal");
  ConformalStructure out;
  out.z2.resize(fam.base.z2.size());
  for (int f = 0; f < fam.base.num_faces(); ++f) {
    const cplx nu = fam.coefficient(f, u);
    if (std::abs(nu) >= 1.0)
      throw Error(ErrorCode::DegenerateShape, "face " + std::to_string(f) + ": |u mu| >= 1", "conformal");
    const cplx z = fam.base.z2[f];
    // Image of (0, 1, z) under z -> z + nu conj z, rescaled so 1 stays at 1.
    out.z2[f] = (z + nu * std::conj(z)) / (1.0 + nu);
  }
  return out;
}

// --- endomorphisms -----------------------------------------------------------------

namespace {

// Real matrix of z -> alpha z + beta conj z.
Mat2 real_linear(cplx alpha, cplx beta) {
  Mat2 m;
  m << alpha.real() + beta.real(), -alpha.imag() + beta.imag(),
      alpha.imag() + beta.imag(), alpha.real() - beta.real();
  return m;
}

const Mat2& rot90() {
  static const Mat2 r = (Mat2() << 0.0, -1.0, 1.0, 0.0).finished();
  return r;
}

}  // namespace

cplx antilinear_coefficient(const Mat2& h) {
  return {0.5 * (h(0, 0) - h(1, 1)), 0.5 * (h(0, 1) + h(1, 0))};
}

Mat2 antilinear_matrix(cplx m) { return real_linear(0.0, m); }

StructureEndo endo_J(const ConformalStructure& c, const ConformalStructure& chart) {
  if (c.num_faces() != chart.num_faces())
    throw Error(ErrorCode::InvalidArgument, "structures have different face counts", "conformal");
  require_nondegenerate(c);
  StructureEndo out;
  out.m.resize(c.z2.size());
  for (int f = 0; f < c.num_faces(); ++f) {
    const cplx b = chart.z2[f], z = c.z2[f];
    const cplx beta = (z - b) / (std::conj(b) - b);
    const Mat2 l = real_linear(1.0 - beta, beta);
    out.m[f] = l.inverse() * rot90() * l;
  }
  return out;
}

StructureEndo endo_J(const ConformalStructure& c) { return endo_J(c, c); }

StructureEndo fd_dJ_ds(const DiskFamily& fam, double h) {
  auto central = [&](double step) {
    const StructureEndo p = endo_J(family_at(fam, step), fam.base);
    const StructureEndo m = endo_J(family_at(fam, -step), fam.base);
    StructureEndo d;
    d.m.resize(p.m.size());
    for (size_t f = 0; f < p.m.size(); ++f) d.m[f] = (p.m[f] - m.m[f]) / (2.0 * step);
    return d;
  };
  const StructureEndo coarse = central(h), fine = central(h / 2.0);
  StructureEndo out;
  out.m.resize(coarse.m.size());
  for (size_t f = 0; f < out.m.size(); ++f) out.m[f] = (4.0 * fine.m[f] - coarse.m[f]) / 3.0;
  return out;
}

Calibration calibrate_s(const DiskFamily& fam, double h) {
  const StructureEndo dj = fd_dJ_ds(fam, h);
  const double cutoff = 1e-3 * fam.direction.max_abs();
  cplx num = 0.0;
  double den = 0.0;
  std::vector<cplx> per_face;
  for (int f = 0; f < fam.base.num_faces(); ++f) {
    const cplx mu = fam.direction.mu[f];
    if (std::abs(mu) <= cutoff || std::abs(mu) == 0.0) continue;
    const cplx m = antilinear_coefficient(dj.m[f]);
    num += std::conj(mu) * m;
    den += std::norm(mu);
    per_face.push_back(m / mu);
  }
  if (per_face.empty())
    throw Error(ErrorCode::InvalidArgument, "calibration needs a nonzero Beltrami field", "conformal");
  Calibration c;
  c.s = num / den;
  c.faces_used = static_cast<int>(per_face.size());
  double var = 0.0;
  for (cplx v : per_face) var += std::norm(v - c.s);
  c.relative_spread = std::sqrt(var / per_face.size()) / std::abs(c.s);
  return c;
}

StructureEndo endo_H(const DiskFamily& fam, cplx s) {
  StructureEndo out;
  out.m.resize(fam.base.z2.size());
  for (int f = 0; f < fam.base.num_faces(); ++f) out.m[f] = antilinear_matrix(s * fam.direction.mu[f]);
  return out;
}

double verify_cr(const FamilyFn& fam, const ConformalStructure& chart, cplx u, double h) {
  const cplx i(0.0, 1.0);
  const StructureEndo j = endo_J(fam(u), chart);
  const StructureEndo sp = endo_J(fam(u + h), chart), sm = endo_J(fam(u - h), chart);
  const StructureEndo tp = endo_J(fam(u + i * h), chart), tm = endo_J(fam(u - i * h), chart);
  double worst = 0.0;
  for (size_t f = 0; f < j.m.size(); ++f) {
    const Mat2 ds = (sp.m[f] - sm.m[f]) / (2.0 * h);
    const Mat2 dt = (tp.m[f] - tm.m[f]) / (2.0 * h);
    worst = std::max(worst, frob(dt - j.m[f] * ds));
  }
  return worst;
}

double verify_cr(const DiskFamily& fam, cplx u, double h) {
  if (std::abs(u) + h > fam.radius)
    throw Error(ErrorCode::OutsideFamily, "CR stencil leaves the family disk", "conformal");
  return verify_cr([&](cplx v) { return family_at(fam, v); }, fam.base, u, h);
}

LaplacianCheck verify_laplacian_J(const DiskFamily& fam, double h) {
  if (h > fam.radius)
    throw Error(ErrorCode::OutsideFamily, "Laplacian stencil leaves the family disk", "conformal");
  const cplx i(0.0, 1.0);
  auto j_at = [&](cplx u) { return endo_J(family_at(fam, u), fam.base); };
  const StructureEndo j0 = j_at(0.0), sp = j_at(h), sm = j_at(-h), tp = j_at(i * h), tm = j_at(-i * h);
  LaplacianCheck out;
  for (size_t f = 0; f < j0.m.size(); ++f) {
    const Mat2 lap = (sp.m[f] + sm.m[f] + tp.m[f] + tm.m[f] - 4.0 * j0.m[f]) / (h * h);
    const Mat2 ds = (sp.m[f] - sm.m[f]) / (2.0 * h);
    const Mat2 jhh = j0.m[f] * ds * ds;
    out.residual = std::max(out.residual, frob(lap - 2.0 * jhh));
    out.literal_residual = std::max(out.literal_residual, frob(lap - jhh));
    out.laplacian_norm = std::max(out.laplacian_norm, frob(lap));
  }
  return out;
}

// --- cotangent weights ----------------------------------------------------------------

double opposite_cot(cplx z2, int k) {
  const std::array<cplx, 3> p{cplx(0.0), cplx(1.0), z2};
  const cplx corner = p[(k + 2) % 3];
  const cplx prod = std::conj(p[k] - corner) * (p[(k + 1) % 3] - corner);
  return prod.real() / std::abs(prod.imag());
}

CotanWeights cotan_weights(const ConformalStructure& c, const surface::HalfEdgeMesh& mesh) {
  if (c.num_faces() != mesh.num_faces())
    throw Error(ErrorCode::InvalidArgument, "structure and mesh have different face counts", "conformal");
  require_nondegenerate(c);
  CotanWeights out;
  for (int h : mesh.edges()) {
    const int t = mesh.twin(h);
    out.w.push_back(0.5 * (opposite_cot(c.z2[h / 3], h % 3) + opposite_cot(c.z2[t / 3], t % 3)));
  }
  return out;
}

}  // namespace pshlab::conformal
