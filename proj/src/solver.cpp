#include "pshlab/harmonic.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace pshlab::harmonic {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

VertexField precondition(const EnergyProblem& p, const VertexField& g) {
  VertexField s = g;
  const auto& diag = p.diagonal();
  for (int i = 0; i < p.num_vertices(); ++i)
    for (int k = 0; k < g.num_factors; ++k) s.at(i, k) /= diag[i];
  return s;
}

VertexField combine(double a, const VertexField& x, double b, const VertexField& y) {
  VertexField out = x;
  for (size_t i = 0; i < out.v.size(); ++i) out.v[i] = a * x.v[i] + b * y.v[i];
  return out;
}

struct Trial {
  double t = 0.0;
  EquivariantMap x;
  VertexField g;
  double energy = 0.0;
  double slope = 0.0;  // directional derivative along the geodesic
};

Trial evaluate(const EnergyProblem& p, const EquivariantMap& x, const VertexField& d, double t) {
  Trial tr;
  tr.t = t;
  tr.x = p.exp(x, d, t);
  tr.g = p.gradient(tr.x);
  tr.energy = p.energy(tr.x);
  tr.slope = p.inner(tr.x, tr.g, p.transport(x, tr.x, d));
  return tr;
}

// Lower energy wins, unless the energies agree to rounding; then the smaller
// directional derivative does.
bool better(const Trial& a, const Trial& b) {
  if (std::abs(a.energy - b.energy) <= 4.0 * kEps * std::abs(b.energy)) return std::abs(a.slope) < std::abs(b.slope);
  return a.energy < b.energy;
}

// Minimizes the convex restriction t -> E(exp(t d)) by bracketing and
// safeguarded secant steps on its derivative.
Trial line_search(const EnergyProblem& p, const EquivariantMap& x, const VertexField& d, double slope0,
                  double guess) {
  double lo = 0.0, slope_lo = slope0;
  Trial hi = evaluate(p, x, d, guess);
  Trial best = hi;
  int expand = 0;
  while (hi.slope < 0.0 && expand++ < 40) {
    lo = hi.t;
    slope_lo = hi.slope;
    hi = evaluate(p, x, d, 2.0 * hi.t);
    if (better(hi, best)) best = hi;
  }
  if (hi.slope < 0.0) return best;
  for (int it = 0; it < 30; ++it) {
    if (std::abs(best.slope) <= 0.1 * std::abs(slope0) && best.t > 0.0) break;
    double t = lo - slope_lo * (hi.t - lo) / (hi.slope - slope_lo);
    const double width = hi.t - lo;
    if (!(t > lo + 0.01 * width && t < hi.t - 0.01 * width)) t = 0.5 * (lo + hi.t);
    Trial mid = evaluate(p, x, d, t);
    if (better(mid, best)) best = mid;
    if (mid.slope < 0.0) {
      lo = mid.t;
      slope_lo = mid.slope;
    } else {
      hi = mid;
    }
    if (width < 1e-14 * hi.t) break;
  }
  return best;
}

}  // namespace

SolveResult solve_harmonic(const EnergyProblem& p, const EquivariantMap& f0, const SolverOptions& opt) {
  if (opt.method != "cg" && opt.method != "gd")
    throw Error(ErrorCode::Config, "solver method must be cg or gd", "solver");
  SolveResult res{f0, {}};
  SolverReport& rep = res.report;
  rep.method = opt.method;
  EquivariantMap x = f0;
  double e = p.energy(x);
  VertexField g = p.gradient(x);
  VertexField s = precondition(p, g);
  VertexField d = combine(-1.0, s, 0.0, s);
  rep.energy_trace.push_back(e);
  double step_guess = 1.0;
  bool last_was_reset = true;

  while (true) {
    rep.gradient_norm = p.gradient_sup_norm(g, x);
    if (rep.gradient_norm <= opt.tol) {
      rep.converged = true;
      break;
    }
    if (rep.iterations >= opt.max_iters) break;
    double slope = p.inner(x, g, d);
    if (!(slope < 0.0)) {
      d = combine(-1.0, s, 0.0, s);
      slope = p.inner(x, g, d);
      last_was_reset = true;
    }
    const Trial tr = line_search(p, x, d, slope, step_guess);
    // Near the minimum energy differences drop below the rounding of the sum;
    // a step that resolved the directional derivative is still a descent step.
    const bool decreased = tr.energy <= e + 4.0 * kEps * std::abs(e);
    const bool resolved = std::abs(tr.slope) <= 0.5 * std::abs(slope);
    if (!(tr.t > 0.0) || !(decreased || resolved)) {
      if (last_was_reset) break;  // no descent even along the preconditioned gradient
      d = combine(-1.0, s, 0.0, s);
      last_was_reset = true;
      continue;
    }
    ++rep.iterations;
    VertexField s_new = precondition(p, tr.g);
    if (opt.method == "cg") {
      // Polak-Ribiere+, with previous vectors transported to the new point.
      const VertexField s_old = p.transport(x, tr.x, s);
      const VertexField d_old = p.transport(x, tr.x, d);
      const double num = p.inner(tr.x, tr.g, combine(1.0, s_new, -1.0, s_old));
      const double den = p.inner(x, g, s);
      const double beta = den > 0.0 ? std::max(0.0, num / den) : 0.0;
      d = combine(-1.0, s_new, beta, d_old);
    } else {
      d = combine(-1.0, s_new, 0.0, s_new);
    }
    last_was_reset = opt.method == "gd";
    step_guess = std::max(tr.t, 1e-8);
    x = tr.x;
    g = tr.g;
    s = std::move(s_new);
    e = tr.energy;
    rep.energy_trace.push_back(e);
  }
  res.map = x;
  if (!rep.converged)
    throw NonConvergenceError("harmonic solver stopped at gradient " + [&] { char b[32]; std::snprintf(b, sizeof b, "%.3e", rep.gradient_norm); return std::string(b); }() +
                                  " after " + std::to_string(rep.iterations) + " iterations",
                              rep);
  return res;
}

}  // namespace pshlab::harmonic
