#include "fracslip/saddle_solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <string>

#include "fracslip/error.hpp"

namespace fracslip {

namespace {

enum class Comp { U, V, P };

struct Term {
  Comp c;
  int i;
  int j;
  double coef;
};

// Row stencils of the discrete momentum / continuity operator. Terms reference grid nodes,
// possibly outside the grid or inactive; `resolve` maps them to unknowns.
class Stencil {
 public:
  Stencil(const MacGrid& g, double mu, const StaggeredField* adv) : g_(g), mu_(mu), adv_(adv) {}

  void u_row(int i, int j, std::vector<Term>& out) const {
    const double h = g_.h;
    const double k = mu_ / (h * h);
    out.push_back({Comp::U, i, j, 4.0 * k});
    out.push_back({Comp::U, i + 1, j, -k});
    out.push_back({Comp::U, i - 1, j, -k});
    out.push_back({Comp::U, i, j + 1, -k});
    out.push_back({Comp::U, i, j - 1, -k});
    out.push_back({Comp::P, i, j, 1.0 / h});
    out.push_back({Comp::P, i - 1, j, -1.0 / h});
    if (adv_ == nullptr) return;
    const auto& w = *adv_;
    const double ue = 0.5 * (w.u_ext(i, j) + w.u_ext(i + 1, j));
    const double uw = 0.5 * (w.u_ext(i - 1, j) + w.u_ext(i, j));
    const double vn = 0.5 * (w.v_ext(i - 1, j + 1) + w.v_ext(i, j + 1));
    const double vs = 0.5 * (w.v_ext(i - 1, j) + w.v_ext(i, j));
    const double c = 0.5 / h;
    out.push_back({Comp::U, i, j, c * (ue - uw + vn - vs)});
    out.push_back({Comp::U, i + 1, j, c * ue});
    out.push_back({Comp::U, i - 1, j, -c * uw});
    out.push_back({Comp::U, i, j + 1, c * vn});
    out.push_back({Comp::U, i, j - 1, -c * vs});
  }

  void v_row(int i, int jv, std::vector<Term>& out) const {
    const double h = g_.h;
    const double k = mu_ / (h * h);
    out.push_back({Comp::V, i, jv, 4.0 * k});
    out.push_back({Comp::V, i + 1, jv, -k});
    out.push_back({Comp::V, i - 1, jv, -k});
    out.push_back({Comp::V, i, jv + 1, -k});
    out.push_back({Comp::V, i, jv - 1, -k});
    out.push_back({Comp::P, i, jv, 1.0 / h});
    out.push_back({Comp::P, i, jv - 1, -1.0 / h});
    if (adv_ == nullptr) return;
    const auto& w = *adv_;
    const double ue = 0.5 * (w.u_ext(i + 1, jv - 1) + w.u_ext(i + 1, jv));
    const double uw = 0.5 * (w.u_ext(i, jv - 1) + w.u_ext(i, jv));
    const double vn = 0.5 * (w.v_ext(i, jv) + w.v_ext(i, jv + 1));
    const double vs = 0.5 * (w.v_ext(i, jv - 1) + w.v_ext(i, jv));
    const double c = 0.5 / h;
    out.push_back({Comp::V, i, jv, c * (ue - uw + vn - vs)});
    out.push_back({Comp::V, i + 1, jv, c * ue});
    out.push_back({Comp::V, i - 1, jv, -c * uw});
    out.push_back({Comp::V, i, jv + 1, c * vn});
    out.push_back({Comp::V, i, jv - 1, -c * vs});
  }

  // Negative divergence so the assembled matrix is symmetric for Stokes.
  void continuity_row(int i, int j, std::vector<Term>& out) const {
    const double c = 1.0 / g_.h;
    out.push_back({Comp::U, i + 1, j, -c});
    out.push_back({Comp::U, i, j, c});
    out.push_back({Comp::V, i, j + 1, -c});
    out.push_back({Comp::V, i, j, c});
  }

 private:
  const MacGrid& g_;
  double mu_;
  const StaggeredField* adv_;
};

// Maps a term to (kind, i, j) of an existing unknown; false when the node is identically zero.
bool resolve(const MacGrid& g, const DofMap& d, Term& t) {
  t.i = g.wrap(t.i);
  switch (t.c) {
    case Comp::U:
      if (t.j < 0) {
        if (g.bottom != WallKind::Slip) return false;
        t.j = 0;
      } else if (t.j >= g.ny) {
        if (g.top != WallKind::Slip) return false;
        t.j = g.ny - 1;
      }
      return d.u_active(t.i, t.j);
    case Comp::V:
      if (t.j <= 0 || t.j >= g.ny) return false;
      return d.v_active(t.i, t.j);
    case Comp::P:
      if (t.j < 0 || t.j >= g.ny) return false;
      return d.p_active(t.i, t.j);
  }
  return false;
}

double value_of(const StaggeredField& f, const Term& t) {
  switch (t.c) {
    case Comp::U: return f.U(t.i, t.j);
    case Comp::V: return f.V(t.i, t.j);
    case Comp::P: return f.P(t.i, t.j);
  }
  return 0.0;
}

struct Rhs {
  std::vector<double> fu;
  std::vector<double> fv;
};

Rhs build_rhs(const SaddleProblem& pb) {
  const MacGrid& g = *pb.grid;
  Rhs r;
  r.fu.assign(static_cast<std::size_t>(g.nx * g.ny), 0.0);
  r.fv.assign(static_cast<std::size_t>(g.nx * (g.ny + 1)), 0.0);
  if (!pb.force_u.empty()) {
    if (pb.force_u.size() != r.fu.size()) throw Error(ErrorCode::InvalidArgument, "force_u has the wrong size");
    r.fu = pb.force_u;
  }
  if (!pb.force_v.empty()) {
    if (pb.force_v.size() != r.fv.size()) throw Error(ErrorCode::InvalidArgument, "force_v has the wrong size");
    r.fv = pb.force_v;
  }
  if (pb.jump) {
    const int row = pb.jump->row;
    if (row < 0 || row >= g.ny) throw Error(ErrorCode::InvalidArgument, "jump row outside the grid");
    for (int i = 0; i < g.nx; ++i) r.fu[static_cast<std::size_t>(i + g.nx * row)] -= pb.jump->sigma / g.h;
  }
  return r;
}

int pin_cell(const SaddleProblem& pb, const DofMap& d) {
  const MacGrid& g = *pb.grid;
  if (pb.gauge.kind == PressureGauge::Kind::Point) {
    const int j = pb.gauge.j;
    if (j >= 0 && j < g.ny && d.p_active(pb.gauge.i, j)) return d.p_id(pb.gauge.i, j);
    throw Error(ErrorCode::InvalidArgument, "pressure gauge cell is not a fluid cell");
  }
  return 0;
}

void apply_gauge(const SaddleProblem& pb, StaggeredField& f) {
  if (pb.gauge.kind != PressureGauge::Kind::FractureMean) return;
  const MacGrid& g = *pb.grid;
  if (!g.interface_row) throw Error(ErrorCode::InvalidArgument, "fracture-mean gauge needs an interface row");
  const int r0 = *g.interface_row;
  double sum = 0.0;
  double weight = 0.0;
  for (int j = r0; j < g.ny; ++j) {
    const double wj = j == r0 ? 0.5 : 1.0;
    for (int i = 0; i < g.nx; ++i) {
      if (g.solid_cell(i, j)) continue;
      sum += wj * f.P(i, j);
      weight += wj;
    }
  }
  const double mean = sum / weight;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (!g.solid_cell(i, j)) f.P(i, j) -= mean;
    }
  }
}

struct LinearResult {
  StaggeredField field;
  double residual = 0.0;
};

// One linear saddle solve with optional Oseen convection frozen at `adv`.
LinearResult linear_solve(const SaddleProblem& pb, const DofMap& d, const Rhs& rhs, const StaggeredField* adv) {
  const MacGrid& g = *pb.grid;
  const int nvel = d.n_velocity();
  const int pin = pin_cell(pb, d);
  const int n = nvel + d.n_p() - 1;
  const auto pcol = [&](int pid) { return pid < pin ? nvel + pid : nvel + pid - 1; };
  const auto column = [&](const Term& t) {
    switch (t.c) {
      case Comp::U: return d.u_id(t.i, t.j);
      case Comp::V: return d.v_id(t.i, t.j);
      case Comp::P: {
        const int pid = d.p_id(t.i, t.j);
        return pid == pin ? -1 : pcol(pid);
      }
    }
    return -1;
  };

  Stencil st(g, pb.viscosity, adv);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(nvel) * 12 + static_cast<std::size_t>(d.n_p()) * 4);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  std::vector<Term> terms;
  const auto emit = [&](int row) {
    for (Term t : terms) {
      if (!resolve(g, d, t)) continue;
      const int col = column(t);
      if (col >= 0) trips.emplace_back(row, col, t.coef);
    }
  };
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (d.u_active(i, j)) {
        terms.clear();
        st.u_row(i, j, terms);
        const int row = d.u_id(i, j);
        emit(row);
        b[row] = rhs.fu[static_cast<std::size_t>(i + g.nx * j)];
      }
    }
  }
  for (int jv = 1; jv < g.ny; ++jv) {
    for (int i = 0; i < g.nx; ++i) {
      if (d.v_active(i, jv)) {
        terms.clear();
        st.v_row(i, jv, terms);
        const int row = d.v_id(i, jv);
        emit(row);
        b[row] = rhs.fv[static_cast<std::size_t>(i + g.nx * jv)];
      }
    }
  }
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (!d.p_active(i, j) || d.p_id(i, j) == pin) continue;
      terms.clear();
      st.continuity_row(i, j, terms);
      emit(pcol(d.p_id(i, j)));
    }
  }

  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(trips.begin(), trips.end());
  A.makeCompressed();

  LinearResult out{StaggeredField::zeros(pb.grid), 0.0};
  const double bnorm = b.norm();
  if (bnorm == 0.0) return out;

  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(A);
  lu.factorize(A);
  if (lu.info() != Eigen::Success) {
    throw Error(ErrorCode::SingularSystem,
                "sparse LU factorisation failed (" + std::to_string(n) + " unknowns): " + lu.lastErrorMessage());
  }
  Eigen::VectorXd x = lu.solve(b);
  if (lu.info() != Eigen::Success || !x.allFinite()) {
    throw Error(ErrorCode::SingularSystem, "sparse LU solve failed");
  }
  Eigen::VectorXd r = b - A * x;
  x += lu.solve(r);
  r = b - A * x;
  out.residual = r.norm() / bnorm;
  if (!(out.residual < 1e-8)) {
    throw Error(ErrorCode::NonConvergence, "linear residual " + std::to_string(out.residual) + " after refinement");
  }

  auto& f = out.field;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (d.u_active(i, j)) f.U(i, j) = x[d.u_id(i, j)];
      if (d.p_active(i, j)) {
        const int pid = d.p_id(i, j);
        f.P(i, j) = pid == pin ? 0.0 : x[pcol(pid)];
      }
    }
  }
  for (int jv = 1; jv < g.ny; ++jv) {
    for (int i = 0; i < g.nx; ++i) {
      if (d.v_active(i, jv)) f.V(i, jv) = x[d.v_id(i, jv)];
    }
  }
  return out;
}

void fill_stats(const SaddleProblem& pb, const StaggeredField& f, SolveStats& s) {
  const auto r = residual(pb, f);
  s.momentum_residual = r.momentum;
  s.divergence_norm = r.divergence;
}

}  // namespace

std::pair<StaggeredField, SolveStats> solve_stokes(const SaddleProblem& problem) {
  if (!problem.grid) throw Error(ErrorCode::InvalidArgument, "problem has no grid");
  if (!(problem.viscosity > 0.0)) throw Error(ErrorCode::InvalidArgument, "viscosity must be positive");
  const DofMap d(*problem.grid);
  if (d.n_p() == 0) throw Error(ErrorCode::SingularSystem, "grid has no fluid cells");
  const Rhs rhs = build_rhs(problem);
  auto lin = linear_solve(problem, d, rhs, nullptr);
  apply_gauge(problem, lin.field);
  SolveStats stats;
  stats.linear_residual = lin.residual;
  SaddleProblem stokes = problem;
  stokes.convection = false;
  fill_stats(stokes, lin.field, stats);
  return {std::move(lin.field), std::move(stats)};
}

std::pair<StaggeredField, SolveStats> solve_navier_stokes(const SaddleProblem& problem, const PicardOptions& options) {
  auto [x, stats] = solve_stokes(problem);
  if (!problem.convection) return {std::move(x), std::move(stats)};
  const DofMap d(*problem.grid);
  const Rhs rhs = build_rhs(problem);

  double theta = options.damping;
  double res = residual(problem, x).momentum;
  stats.picard_history.push_back(res);
  int growth = 0;
  for (int it = 1; it <= options.max_iter; ++it) {
    if (res <= options.tol) {
      stats.picard_iterations = it - 1;
      apply_gauge(problem, x);
      fill_stats(problem, x, stats);
      return {std::move(x), std::move(stats)};
    }
    auto lin = linear_solve(problem, d, rhs, &x);
    stats.linear_residual = lin.residual;
    StaggeredField next = x;
    for (std::size_t k = 0; k < next.u.size(); ++k) next.u[k] = theta * lin.field.u[k] + (1.0 - theta) * x.u[k];
    for (std::size_t k = 0; k < next.v.size(); ++k) next.v[k] = theta * lin.field.v[k] + (1.0 - theta) * x.v[k];
    for (std::size_t k = 0; k < next.p.size(); ++k) next.p[k] = theta * lin.field.p[k] + (1.0 - theta) * x.p[k];
    const double next_res = residual(problem, next).momentum;
    stats.picard_history.push_back(next_res);
    if (!std::isfinite(next_res)) {
      throw Error(ErrorCode::PicardDiverged, "non-finite residual at iteration " + std::to_string(it));
    }
    if (next_res > res) {
      ++growth;
      theta = std::max(theta * 0.5, 1.0 / 64.0);
      if (growth >= options.growth_limit) {
        throw Error(ErrorCode::PicardDiverged, "residual grew " + std::to_string(growth) + " consecutive times");
      }
    } else {
      growth = 0;
    }
    x = std::move(next);
    res = next_res;
  }
  if (res <= options.tol) {
    stats.picard_iterations = options.max_iter;
    apply_gauge(problem, x);
    fill_stats(problem, x, stats);
    return {std::move(x), std::move(stats)};
  }
  throw Error(ErrorCode::MaxIterExceeded,
              "Picard residual " + std::to_string(res) + " after " + std::to_string(options.max_iter) + " iterations");
}

std::vector<double> discrete_divergence(const StaggeredField& f) {
  const MacGrid& g = *f.grid;
  std::vector<double> div(static_cast<std::size_t>(g.nx * g.ny), 0.0);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (g.solid_cell(i, j)) continue;
      div[f.p_index(i, j)] = (f.U(i + 1, j) - f.U(i, j) + f.V(i, j + 1) - f.V(i, j)) / g.h;
    }
  }
  return div;
}

std::pair<std::vector<double>, std::vector<double>> convection(const StaggeredField& advecting,
                                                               const StaggeredField& transported) {
  const MacGrid& g = *transported.grid;
  const DofMap d(g);
  // Viscosity 0 leaves only the pressure and convection terms; pressure terms are skipped below.
  Stencil st(g, 0.0, &advecting);
  std::vector<double> cu(transported.u.size(), 0.0);
  std::vector<double> cv(transported.v.size(), 0.0);
  std::vector<Term> terms;
  const auto apply = [&]() {
    double s = 0.0;
    for (Term t : terms) {
      if (t.c == Comp::P || !resolve(g, d, t)) continue;
      s += t.coef * value_of(transported, t);
    }
    return s;
  };
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (!d.u_active(i, j)) continue;
      terms.clear();
      st.u_row(i, j, terms);
      cu[transported.u_index(i, j)] = apply();
    }
  }
  for (int jv = 1; jv < g.ny; ++jv) {
    for (int i = 0; i < g.nx; ++i) {
      if (!d.v_active(i, jv)) continue;
      terms.clear();
      st.v_row(i, jv, terms);
      cv[transported.v_index(i, jv)] = apply();
    }
  }
  return {std::move(cu), std::move(cv)};
}

ResidualReport residual(const SaddleProblem& problem, const StaggeredField& f) {
  const MacGrid& g = *problem.grid;
  const DofMap d(g);
  const Rhs rhs = build_rhs(problem);
  Stencil st(g, problem.viscosity, problem.convection ? &f : nullptr);
  std::vector<Term> terms;
  double rr = 0.0;
  double ff = 0.0;
  const auto apply = [&]() {
    double s = 0.0;
    for (Term t : terms) {
      if (resolve(g, d, t)) s += t.coef * value_of(f, t);
    }
    return s;
  };
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (!d.u_active(i, j)) continue;
      terms.clear();
      st.u_row(i, j, terms);
      const double fi = rhs.fu[f.u_index(i, j)];
      const double r = apply() - fi;
      rr += r * r;
      ff += fi * fi;
    }
  }
  for (int jv = 1; jv < g.ny; ++jv) {
    for (int i = 0; i < g.nx; ++i) {
      if (!d.v_active(i, jv)) continue;
      terms.clear();
      st.v_row(i, jv, terms);
      const double fi = rhs.fv[f.v_index(i, jv)];
      const double r = apply() - fi;
      rr += r * r;
      ff += fi * fi;
    }
  }
  ResidualReport rep;
  rep.momentum = ff > 0.0 ? std::sqrt(rr / ff) : std::sqrt(rr);
  for (double v : discrete_divergence(f)) rep.divergence = std::max(rep.divergence, std::abs(v));
  return rep;
}

Region parse_region(std::string_view name) {
  if (name == "omega" || name == "full") return Region::Full;
  if (name == "omega2" || name == "porous") return Region::Porous;
  if (name == "omega1" || name == "fracture") return Region::Fracture;
  if (name == "sigma" || name == "interface") return Region::Interface;
  throw Error(ErrorCode::UnknownRegion, "unknown region '" + std::string(name) + "'");
}

namespace {

// Weight of a quadrature point at height k * h / 2 relative to the interface.
double region_weight(Region region, int half_steps) {
  switch (region) {
    case Region::Full: return 1.0;
    case Region::Fracture: return half_steps > 0 ? 1.0 : (half_steps == 0 ? 0.5 : 0.0);
    case Region::Porous: return half_steps < 0 ? 1.0 : (half_steps == 0 ? 0.5 : 0.0);
    case Region::Interface: return 0.0;
  }
  return 0.0;
}

double trace_norm(const StaggeredField& f) {
  const MacGrid& g = *f.grid;
  const int r0 = *g.interface_row;
  double s = 0.0;
  for (int i = 0; i < g.nx; ++i) {
    const double u = f.U(i, r0);
    const double v = 0.5 * (f.v_ext(i, r0) + f.v_ext(i, r0 + 1));
    s += g.h * (u * u + v * v);
  }
  return std::sqrt(s);
}

}  // namespace

FieldNorms norms(const StaggeredField& f, Region region) {
  const MacGrid& g = *f.grid;
  if (region != Region::Full && !g.interface_row) {
    throw Error(ErrorCode::UnknownRegion, "grid has no interface, only the full region is defined");
  }
  FieldNorms out;
  if (g.interface_row) out.trace = trace_norm(f);
  if (region == Region::Interface) {
    out.l2 = out.trace;
    return out;
  }
  const int r0 = g.interface_row.value_or(0);
  const double h2 = g.h * g.h;
  double l2 = 0.0;
  double gr = 0.0;
  // u nodes at height (j - r0) h and their edges.
  for (int j = -1; j < g.ny; ++j) {
    const int m2 = 2 * (j - r0);
    for (int i = 0; i < g.nx; ++i) {
      if (j >= 0) {
        const double u = f.U(i, j);
        const double w = region_weight(region, m2);
        l2 += w * h2 * u * u;
        const double dx = f.U(i + 1, j) - u;
        gr += w * dx * dx;
      }
      const double dy = f.u_ext(i, j + 1) - f.u_ext(i, j);
      gr += region_weight(region, m2 + 1) * dy * dy;
    }
  }
  // v nodes at height (jv - r0 - 1/2) h.
  for (int jv = 0; jv <= g.ny; ++jv) {
    const int m2 = 2 * (jv - r0) - 1;
    for (int i = 0; i < g.nx; ++i) {
      const double v = f.V(i, jv);
      const double w = region_weight(region, m2);
      l2 += w * h2 * v * v;
      const double dx = f.V(i + 1, jv) - v;
      gr += w * dx * dx;
      if (jv < g.ny) {
        const double dy = f.V(i, jv + 1) - v;
        gr += region_weight(region, m2 + 1) * dy * dy;
      }
    }
  }
  out.l2 = std::sqrt(l2);
  out.grad = std::sqrt(gr);
  return out;
}

double gradient_energy(const StaggeredField& f) {
  const double g = norms(f, Region::Full).grad;
  return g * g;
}

}  // namespace fracslip
