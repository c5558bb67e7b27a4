#include "pshlab/variation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

namespace pshlab::variation {

using hypgeom::Model;

namespace {

cplx log_at(Model m, cplx p, cplx q) { return m == Model::Euclidean ? q - p : hypgeom::disk::log(p, q); }

double dist2(Model m, cplx p, cplx q) {
  if (m == Model::Euclidean) return std::norm(q - p);
  const double d = hypgeom::disk::distance(p, q);
  return d * d;
}

double metric2(Model m, cplx p) {
  if (m == Model::Euclidean) return 1.0;
  const double l = hypgeom::disk::lambda(p);
  return l * l;
}

cplx transport_at(Model m, cplx p, cplx q) {
  return m == Model::Euclidean ? cplx(1.0) : hypgeom::disk::transport_factor(p, q);
}

}  // namespace

// --- stencil -------------------------------------------------------------------------

const StencilNode& StencilGrid::at(int i, int j) const {
  for (const auto& n : nodes)
    if (n.i == i && n.j == j) return n;
  throw Error(ErrorCode::InvalidArgument, "stencil has no node (" + std::to_string(i) + ", " + std::to_string(j) + ")",
              "stencil");
}

bool StencilGrid::has(int i, int j) const {
  return std::any_of(nodes.begin(), nodes.end(), [&](const StencilNode& n) { return n.i == i && n.j == j; });
}

std::vector<std::pair<int, int>> stencil_offsets() {
  return {{0, 0},  {1, 0},  {-1, 0}, {0, 1},  {0, -1}, {1, 1},  {1, -1},
          {-1, 1}, {-1, -1}, {2, 0}, {-2, 0}, {0, 2},  {0, -2}};
}

double default_step(const conformal::BeltramiField& mu) {
  const double m = mu.max_abs();
  if (m == 0.0) throw Error(ErrorCode::InvalidArgument, "zero Beltrami direction", "stencil");
  return 1e-2 / m;
}

StencilGrid energy_stencil(const conformal::DiskFamily& fam, const surface::HalfEdgeMesh& mesh,
                           const target::Target& target, const EquivariantMap& initial,
                           const StencilOptions& opt) {
  StencilGrid grid;
  grid.h = opt.h > 0.0 ? opt.h : default_step(fam.direction);
  const auto offsets = stencil_offsets();
  if (2.0 * std::sqrt(2.0) * grid.h >= fam.radius)
    throw Error(ErrorCode::OutsideFamily, "stencil leaves the family disk", "stencil");

  auto solve_node = [&](int i, int j, const EquivariantMap& start) {
    StencilNode n;
    n.i = i;
    n.j = j;
    n.structure = conformal::family_at(fam, cplx(i, j) * grid.h);
    const harmonic::EnergyProblem p(mesh, n.structure, target);
    auto r = harmonic::solve_harmonic(p, start, opt.solver);
    n.map = std::move(r.map);
    n.report = std::move(r.report);
    n.energy = p.energy(n.map);
    return n;
  };

  try {
    grid.nodes.push_back(solve_node(0, 0, initial));
  } catch (const harmonic::NonConvergenceError& e) {
    throw StencilError(std::string("centre node: ") + e.what(), grid);
  }
  const EquivariantMap centre = grid.nodes[0].map;

  const int rest = static_cast<int>(offsets.size()) - 1;
  std::vector<std::optional<StencilNode>> solved(rest);
  std::vector<std::string> errors(rest);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int k = next++; k < rest; k = next++) {
      try {
        solved[k] = solve_node(offsets[k + 1].first, offsets[k + 1].second, centre);
      } catch (const Error& e) {
        errors[k] = e.what();
      }
    }
  };
  const int threads = std::clamp(opt.threads, 1, rest);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  std::string failure;
  for (int k = 0; k < rest; ++k) {
    if (solved[k]) grid.nodes.push_back(std::move(*solved[k]));
    else if (failure.empty())
      failure = "node (" + std::to_string(offsets[k + 1].first) + ", " + std::to_string(offsets[k + 1].second) +
                "): " + errors[k];
  }
  if (!failure.empty()) throw StencilError(failure, grid);
  return grid;
}

double five_point(double e0, double ep, double em, double etp, double etm, double h) {
  // Differences first, so the large common energy cancels before summing.
  return ((ep - e0) + (em - e0) + (etp - e0) + (etm - e0)) / (h * h);
}

double laplacian_E(const StencilGrid& g, int scale) {
  if (scale != 1 && scale != 2) throw Error(ErrorCode::InvalidArgument, "stencil scale must be 1 or 2", "stencil");
  return five_point(g.energy(0, 0), g.energy(scale, 0), g.energy(-scale, 0), g.energy(0, scale),
                    g.energy(0, -scale), scale * g.h);
}

// --- variation field ------------------------------------------------------------------

const char* to_string(WConvention c) { return c == WConvention::TPlusIS ? "t+is" : "s+it"; }

Variation variation_W(const StencilGrid& g, const harmonic::EnergyProblem& centre) {
  const EquivariantMap& f0 = g.at(0, 0).map;
  const target::Target& t = centre.target();
  const int nv = f0.num_vertices(), nk = f0.num_factors;

  // Flat factors are determined only up to translation; align each node to the centre.
  auto aligned = [&](const EquivariantMap& f) {
    EquivariantMap out = f;
    for (int k = 0; k < nk; ++k) {
      if (t.factor_model(k) != Model::Euclidean) continue;
      cplx shift = 0.0;
      for (int v = 0; v < nv; ++v) shift += f.at(v, k) - f0.at(v, k);
      shift /= static_cast<double>(nv);
      for (int v = 0; v < nv; ++v) out.at(v, k) -= shift;
    }
    return out;
  };
  auto derivative = [&](int i, int j) {
    const EquivariantMap fp = aligned(g.at(i, j).map), fm = aligned(g.at(-i, -j).map);
    VertexField d = VertexField::zeros(f0);
    for (int v = 0; v < nv; ++v)
      for (int k = 0; k < nk; ++k) {
        const Model m = t.factor_model(k);
        d.at(v, k) = (log_at(m, f0.at(v, k), fp.at(v, k)) - log_at(m, f0.at(v, k), fm.at(v, k))) / (2.0 * g.h);
      }
    return d;
  };
  return {derivative(1, 0), derivative(0, 1)};
}

std::pair<VertexField, VertexField> assemble_W(const Variation& v, WConvention c) {
  return c == WConvention::TPlusIS ? std::make_pair(v.ft, v.fs) : std::make_pair(v.fs, v.ft);
}

// --- face frames ------------------------------------------------------------------------

FaceFrames::FaceFrames(const surface::HalfEdgeMesh& mesh, const conformal::ConformalStructure& c,
                       const target::Target& target)
    : mesh_(mesh), target_(target) {
  if (c.num_faces() != mesh.num_faces())
    throw Error(ErrorCode::InvalidArgument, "structure does not match the mesh", "variation");
  for (int f = 0; f < mesh.num_faces(); ++f) {
    Face face;
    face.v = mesh.face_vertices(f);
    face.z2 = c.z2[f];
    const Word w0 = mesh.label(3 * f);
    const Word w01 = free_reduce(w0 + mesh.label(3 * f + 1));
    for (int k = 0; k < target.num_factors(); ++k) {
      face.corner[0].push_back(hypgeom::ModelIsometry::identity(target.factor_model(k)));
      face.corner[1].push_back(target.evaluate(w0, k));
      face.corner[2].push_back(target.evaluate(w01, k));
    }
    faces_.push_back(std::move(face));
  }
}

FaceFrames::Jet FaceFrames::jet(const EquivariantMap& f, int face) const {
  const Face& fc = faces_[face];
  const int nk = target_.num_factors();
  Jet j;
  j.bary.resize(nk);
  Eigen::VectorXd d1(2 * nk), d2(2 * nk);
  std::array<std::vector<cplx>, 3> x;
  for (int c = 0; c < 3; ++c)
    for (int k = 0; k < nk; ++k) x[c].push_back(fc.corner[c][k].apply_chart(f.at(fc.v[c], k)));
  for (int k = 0; k < nk; ++k) {
    const Model m = target_.factor_model(k);
    cplx b = (x[0][k] + x[1][k] + x[2][k]) / 3.0;
    if (m == Model::HyperbolicDisk) {
      b = x[0][k];
      for (int it = 0; it < 6; ++it) {
        const cplx mean = (log_at(m, b, x[0][k]) + log_at(m, b, x[1][k]) + log_at(m, b, x[2][k])) / 3.0;
        b = hypgeom::disk::exp(b, mean);
      }
    }
    j.bary[k] = b;
    const cplx y0 = log_at(m, b, x[0][k]), y1 = log_at(m, b, x[1][k]), y2 = log_at(m, b, x[2][k]);
    d1(2 * k) = (y1 - y0).real();
    d1(2 * k + 1) = (y1 - y0).imag();
    d2(2 * k) = (y2 - y0).real();
    d2(2 * k + 1) = (y2 - y0).imag();
  }
  const double p = fc.z2.real(), q = fc.z2.imag();
  const Eigen::VectorXd fx = d1, fy = (d2 - p * d1) / q;
  j.fz = 0.5 * (fx.cast<cplx>() - cplx(0.0, 1.0) * fy.cast<cplx>());
  // Halfedge k joins corners k and k+1.
  for (int e = 0; e < 3; ++e) {
    double d = 0.0;
    for (int k = 0; k < nk; ++k) d += dist2(target_.factor_model(k), x[e][k], x[(e + 1) % 3][k]);
    j.edge2[e] = d;
    j.energy += 0.25 * conformal::opposite_cot(fc.z2, e) * d;
  }
  return j;
}

FaceFrames::WJet FaceFrames::w_jet(const EquivariantMap& f, const Jet& j, const VertexField& re,
                                   const VertexField& im, int face) const {
  const Face& fc = faces_[face];
  const int nk = target_.num_factors();
  std::array<Eigen::VectorXcd, 3> w;
  for (int c = 0; c < 3; ++c) {
    w[c].resize(2 * nk);
    for (int k = 0; k < nk; ++k) {
      const cplx z = f.at(fc.v[c], k);
      const cplx x = fc.corner[c][k].apply_chart(z);
      const cplx mult = fc.corner[c][k].derivative_chart(z) * transport_at(target_.factor_model(k), x, j.bary[k]);
      const cplx r = mult * re.at(fc.v[c], k), i = mult * im.at(fc.v[c], k);
      w[c](2 * k) = cplx(r.real(), i.real());
      w[c](2 * k + 1) = cplx(r.imag(), i.imag());
    }
  }
  const double p = fc.z2.real(), q = fc.z2.imag();
  const Eigen::VectorXcd wx = w[1] - w[0], wy = (w[2] - w[0] - p * wx) / q;
  return {(w[0] + w[1] + w[2]) / 3.0, 0.5 * (wx + cplx(0.0, 1.0) * wy)};
}

double FaceFrames::norm2(const Jet& j, const Eigen::VectorXcd& x) const {
  double s = 0.0;
  for (int k = 0; k < target_.num_factors(); ++k)
    s += metric2(target_.factor_model(k), j.bary[k]) * (std::norm(x(2 * k)) + std::norm(x(2 * k + 1)));
  return s;
}

cplx FaceFrames::bilinear(const Jet& j, const Eigen::VectorXcd& x, const Eigen::VectorXcd& y) const {
  cplx s = 0.0;
  for (int k = 0; k < target_.num_factors(); ++k)
    s += metric2(target_.factor_model(k), j.bary[k]) * (x(2 * k) * y(2 * k) + x(2 * k + 1) * y(2 * k + 1));
  return s;
}

cplx FaceFrames::hermitian(const Jet& j, const Eigen::VectorXcd& x, const Eigen::VectorXcd& y) const {
  return bilinear(j, x, y.conjugate());
}

cplx FaceFrames::curvature(const Jet& j, const Eigen::VectorXcd& x, const Eigen::VectorXcd& y,
                           const Eigen::VectorXcd& z, const Eigen::VectorXcd& w) const {
  auto wrap = [&](const Eigen::VectorXcd& v) {
    target::ComplexTargetVec t;
    for (int k = 0; k < target_.num_factors(); ++k) {
      hypgeom::ModelPoint b{target_.factor_model(k), hypgeom::Vec2(j.bary[k].real(), j.bary[k].imag())};
      t.parts.push_back({b, hypgeom::CVec2(v(2 * k), v(2 * k + 1))});
    }
    return t;
  };
  return target_.complex_curvature(wrap(x), wrap(y), wrap(z), wrap(w));
}

// --- Hopf differential and first variation ---------------------------------------------

HopfDifferential hopf(const FaceFrames& frames, const EquivariantMap& f) {
  HopfDifferential out;
  for (int face = 0; face < frames.num_faces(); ++face) {
    const auto j = frames.jet(f, face);
    // Pullback metric g on the shape chart from the three target edge lengths,
    // then Q = <f_z, f_z> = (g11 - g22 - 2i g12) / 4.
    const cplx z2 = frames.shape(face);
    const double p = z2.real(), q = z2.imag();
    const double g11 = j.edge2[0];
    const double g12 = (j.edge2[2] - j.edge2[1] - (2.0 * p - 1.0) * g11) / (2.0 * q);
    const double g22 = (j.edge2[2] - p * p * g11 - 2.0 * p * q * g12) / (q * q);
    const cplx qf = 0.25 * cplx(g11 - g22, -2.0 * g12);
    out.q.push_back(qf);
    out.norm += std::abs(qf) * frames.area(face);
    out.energy += j.energy;
  }
  return out;
}

FirstVariation first_variation_check(const StencilGrid& g, const HopfDifferential& q,
                                     const conformal::BeltramiField& mu, const FaceFrames& frames) {
  if (mu.mu.size() != q.q.size())
    throw Error(ErrorCode::InvalidArgument, "Beltrami field does not match the mesh", "variation");
  auto central = [&](int i, int j, int scale) {
    return (g.energy(scale * i, scale * j) - g.energy(-scale * i, -scale * j)) / (2.0 * scale * g.h);
  };
  FirstVariation out;
  const double s1 = central(1, 0, 1), s2 = central(1, 0, 2), t1 = central(0, 1, 1), t2 = central(0, 1, 2);
  out.dEs = (4.0 * s1 - s2) / 3.0;
  out.dEt = (4.0 * t1 - t2) / 3.0;
  for (size_t f = 0; f < q.q.size(); ++f) out.pairing += mu.mu[f] * q.q[f] * frames.area(static_cast<int>(f));
  // dE(mu) = c Re(P) and dE(i mu) = -c Im(P).
  const double fd_error = (std::abs(s1 - s2) + std::abs(t1 - t2)) / 3.0 + 1e-13 * q.energy / g.h;
  // The identity is exact for the discrete energy, so the only floors are
  // rounding in the pairing sum and the difference error.
  const double p = std::abs(out.pairing);
  if (p < 1e-10 * mu.max_abs() * q.energy || 4.0 * p < 10.0 * fd_error) return out;
  const double c = (out.dEs * out.pairing.real() - out.dEt * out.pairing.imag()) / (p * p);
  out.c = c;
  const double gn = std::hypot(out.dEs, out.dEt);
  out.residual = std::hypot(out.dEs - c * out.pairing.real(), out.dEt + c * out.pairing.imag()) / gn;
  return out;
}

// --- tangency -----------------------------------------------------------------------------

Tangency tangency_diagnostic(const FaceFrames& frames, const EquivariantMap& f, const VertexField& re,
                             const VertexField& im, const std::vector<cplx>& m) {
  if (static_cast<int>(m.size()) != frames.num_faces())
    throw Error(ErrorCode::InvalidArgument, "coefficient count differs from face count", "variation");
  std::vector<FaceFrames::Jet> jets;
  double mean_fz = 0.0;
  for (int face = 0; face < frames.num_faces(); ++face) {
    jets.push_back(frames.jet(f, face));
    mean_fz += frames.norm2(jets.back(), jets.back().fz) / frames.num_faces();
  }
  Tangency out;
  double wedge = 0.0, scale = 0.0, plus = 0.0, minus = 0.0, total = 0.0;
  for (int face = 0; face < frames.num_faces(); ++face) {
    const auto& j = jets[face];
    const double nf = frames.norm2(j, j.fz);
    if (nf < 1e-12 * mean_fz) {
      ++out.excluded;
      continue;
    }
    const auto w = frames.w_jet(f, j, re, im, face);
    const double nw = frames.norm2(j, w.w);
    const double a = frames.area(face);
    wedge += std::sqrt(std::max(0.0, nf * nw - std::norm(frames.hermitian(j, j.fz, w.w)))) * a;
    scale += std::sqrt(nf * nw) * a;
    const Eigen::VectorXcd mf = m[face] * j.fz;
    plus += frames.norm2(j, w.dbar - mf) * a;
    minus += frames.norm2(j, w.dbar + mf) * a;
    total += (frames.norm2(j, w.dbar) + frames.norm2(j, mf)) * a;
  }
  out.defect = scale > 0.0 ? wedge / scale : 0.0;
  out.parallel_residual = total > 0.0 ? std::sqrt(std::min(plus, minus) / total) : 0.0;
  return out;
}

std::pair<VertexField, VertexField> synthetic_tangent_field(const FaceFrames& frames, const EquivariantMap& f,
                                                            const std::vector<double>& lambda) {
  const surface::HalfEdgeMesh& mesh = frames.mesh();
  if (static_cast<int>(lambda.size()) != mesh.num_vertices())
    throw Error(ErrorCode::InvalidArgument, "lambda count differs from vertex count", "variation");
  const target::Target& t = frames.target();
  const int nk = t.num_factors();
  VertexField re = VertexField::zeros(f), im = VertexField::zeros(f);
  std::vector<int> count(mesh.num_vertices(), 0);
  for (int face = 0; face < frames.num_faces(); ++face) {
    const auto j = frames.jet(f, face);
    const auto v = mesh.face_vertices(face);
    const Word w0 = mesh.label(3 * face);
    const Word w01 = free_reduce(w0 + mesh.label(3 * face + 1));
    for (int c = 0; c < 3; ++c) {
      for (int k = 0; k < nk; ++k) {
        const auto g = c == 0 ? hypgeom::ModelIsometry::identity(t.factor_model(k))
                              : t.evaluate(c == 1 ? w0 : w01, k);
        const cplx z = f.at(v[c], k);
        const cplx x = g.apply_chart(z);
        // Transport from the barycentre to the corner, then pull back to the canonical lift.
        const cplx mult = transport_at(t.factor_model(k), j.bary[k], x) / g.derivative_chart(z);
        const cplx r(j.fz(2 * k).real(), j.fz(2 * k + 1).real()), i(j.fz(2 * k).imag(), j.fz(2 * k + 1).imag());
        re.at(v[c], k) += mult * r;
        im.at(v[c], k) += mult * i;
      }
      ++count[v[c]];
    }
  }
  for (int vtx = 0; vtx < mesh.num_vertices(); ++vtx)
    for (int k = 0; k < nk; ++k) {
      re.at(vtx, k) *= lambda[vtx] / count[vtx];
      im.at(vtx, k) *= lambda[vtx] / count[vtx];
    }
  return {re, im};
}

// --- second variation -------------------------------------------------------------------

SecondVariation second_variation_identity(const LedgerInputs& in, const Variation& v) {
  const StencilGrid& g = in.grid;
  const EquivariantMap& f0 = g.at(0, 0).map;
  const harmonic::EnergyProblem centre(in.mesh, g.at(0, 0).structure, in.target);
  SecondVariation out;
  out.lhs = ((g.energy(1, 0) - g.energy(0, 0)) + (g.energy(-1, 0) - g.energy(0, 0))) / (g.h * g.h);
  const auto t0 = centre.edge_terms(f0);
  const auto tp = harmonic::EnergyProblem(in.mesh, g.at(1, 0).structure, in.target).edge_terms(f0);
  const auto tm = harmonic::EnergyProblem(in.mesh, g.at(-1, 0).structure, in.target).edge_terms(f0);
  double structure = 0.0;
  for (size_t e = 0; e < t0.size(); ++e) structure += (tp[e] - t0[e]) + (tm[e] - t0[e]);
  structure /= g.h * g.h;
  harmonic::IndexFormOptions iopt;
  iopt.tol = in.solver_tol;
  out.rhs = -harmonic::index_form(centre, f0, v.fs, iopt) + structure;
  out.residual = std::abs(out.lhs - out.rhs);
  return out;
}

// --- ledger -----------------------------------------------------------------------------

const char* to_string(Verdict v) { return v == Verdict::Pass ? "PASS" : "FAIL"; }

PshCertificate ledger(const LedgerInputs& in) {
  const StencilGrid& g = in.grid;
  const conformal::DiskFamily& fam = in.fam;
  const EquivariantMap& f0 = g.at(0, 0).map;
  const harmonic::EnergyProblem centre(in.mesh, g.at(0, 0).structure, in.target);
  PshCertificate c;

  c.delta_E = laplacian_E(g, 1);
  c.delta_E_2h = laplacian_E(g, 2);
  c.delta_E_extrapolated = (4.0 * c.delta_E - c.delta_E_2h) / 3.0;
  c.extrapolation_error = std::abs(c.delta_E - c.delta_E_2h) / 3.0;

  const Variation v = variation_W(g, centre);
  harmonic::IndexFormOptions iopt;
  iopt.tol = in.solver_tol;
  c.a = harmonic::index_form(centre, f0, v.fs, iopt) + harmonic::index_form(centre, f0, v.ft, iopt);

  const FaceFrames frames(in.mesh, fam.base, in.target);
  // The zero direction has no calibration to measure; m = 0 either way.
  c.calibration_s = fam.direction.max_abs() > 0.0 ? conformal::calibrate_s(fam).s : cplx(0.0, 2.0);
  std::vector<cplx> m(frames.num_faces());
  std::vector<FaceFrames::Jet> jets;
  for (int face = 0; face < frames.num_faces(); ++face) {
    m[face] = c.calibration_s * fam.direction.mu[face];
    jets.push_back(frames.jet(f0, face));
    c.b += std::norm(m[face]) * 2.0 * jets.back().energy;
  }

  for (WConvention conv : {WConvention::TPlusIS, WConvention::SPlusIT}) {
    const auto [re, im] = assemble_W(v, conv);
    ConventionLedger l;
    for (int face = 0; face < frames.num_faces(); ++face) {
      const auto& j = jets[face];
      const auto w = frames.w_jet(f0, j, re, im, face);
      const double a = frames.area(face);
      l.alpha += 2.0 * frames.norm2(j, w.dbar) * a;
      l.rho += frames.curvature(j, j.fz, w.w, j.fz.conjugate(), w.w.conjugate()).real() * a;
      l.pairing += 4.0 * frames.hermitian(j, m[face] * j.fz, w.dbar).real() * a;
    }
    l.mm_residual = std::abs(l.alpha - 0.5 * c.a - 2.0 * l.rho);
    l.pairing_residual = std::abs(std::abs(l.pairing) - c.a);
    c.by_convention[conv] = l;
  }
  const auto& ts = c.by_convention[WConvention::TPlusIS];
  const auto& st = c.by_convention[WConvention::SPlusIT];
  // Both fields satisfy the Micallef-Moore identity; only one also reproduces a
  // through the pairing that the Schwarz step bounds.
  const double ts_score = std::max(ts.mm_residual, ts.pairing_residual);
  const double st_score = std::max(st.mm_residual, st.pairing_residual);
  c.convention = ts_score <= st_score ? WConvention::TPlusIS : WConvention::SPlusIT;
  const ConventionLedger& chosen = c.by_convention[c.convention];
  c.alpha = chosen.alpha;
  c.rho = chosen.rho;

  c.r1 = std::abs(c.delta_E - (c.b - c.a));
  c.r2 = chosen.mm_residual;
  c.r3 = std::max(0.0, c.a - c.alpha - 0.5 * c.b);
  c.r4 = std::max(0.0, c.a - c.b - 4.0 * c.rho);
  const double floor = 1e-8 * std::max({std::abs(c.a), std::abs(c.b), 1e-300});
  c.epsilon = 3.0 * std::max({c.extrapolation_error, c.r1, c.r2, floor});

  const auto [re, im] = assemble_W(v, c.convention);
  const Tangency tan = tangency_diagnostic(frames, f0, re, im, m);
  c.tangency_defect = tan.defect;
  c.parallel_residual = tan.parallel_residual;
  c.excluded_faces = tan.excluded;

  const HopfDifferential q = hopf(frames, f0);
  c.hopf_norm = q.norm;
  c.first_variation = first_variation_check(g, q, fam.direction, frames);
  c.second_variation_residual = second_variation_identity(in, v).residual;

  const double e = c.epsilon;
  if (c.delta_E < -e) c.failures.push_back("delta_E below -epsilon");
  if (c.r3 > e) c.failures.push_back("a exceeds alpha + b/2 by more than epsilon");
  if (c.r4 > e) c.failures.push_back("a exceeds b + 4 rho by more than epsilon");
  if (c.a < -e) c.failures.push_back("a negative");
  if (c.alpha < -e) c.failures.push_back("alpha negative");
  if (c.b < -e) c.failures.push_back("b negative");
  if (c.rho > e) c.failures.push_back("rho positive");
  c.verdict = c.failures.empty() ? Verdict::Pass : Verdict::Fail;
  return c;
}

}  // namespace pshlab::variation
