#include "qoptics5/kernels.hpp"

#include <cmath>
#include <sstream>

namespace qoptics5 {

std::string to_string(KernelMethod m) {
  switch (m) {
    case KernelMethod::exhaustive: return "exhaustive";
    case KernelMethod::transfer_matrix: return "transfer-matrix";
    case KernelMethod::sampled: return "sampled";
    case KernelMethod::sliced: return "sliced";
    case KernelMethod::closed_form: return "closed-form";
  }
  return "unknown";
}

double action_D(const std::vector<Vec4>& path, const MatrixField4& gt, const VectorField4& A,
                double q, Branch branch, const Units& u) {
  if (path.size() < 2) return 0.0;
  const double k = q / (u.c * u.c);
  const double s = sign_of(branch);
  double D = 0.0;
  for (size_t i = 0; i + 1 < path.size(); ++i) {
    const Vec4 dx = path[i + 1] - path[i];
    const Vec4 mid = 0.5 * (path[i + 1] + path[i]);
    const double len2 = -dx.dot(gt(mid) * dx);
    if (!(len2 > 0.0)) {
      std::ostringstream os;
      os << "segment " << i << " from " << format_point(path[i]) << " is not timelike";
      throw PreconditionError(os.str());
    }
    const double orient = dx[0] >= 0.0 ? 1.0 : -1.0;
    D += s * orient * std::sqrt(len2);
    if (A) D -= k * A(mid).dot(dx);
  }
  return D;
}

namespace {

void check_model(const LatticePathModel& m) {
  if (m.dims != 1 && m.dims != 2) throw PreconditionError("lattice dims must be 1 or 2");
  if (m.steps < 0) throw PreconditionError("lattice step count must be >= 0");
  if (!(m.a > 0.0)) throw PreconditionError("lattice spacing must be positive");
}

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw OverflowError("lattice path count overflows 64 bits");
  return r;
}

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("lattice path count overflows 64 bits");
  return r;
}

/// Full (Δx, Δx⁵) count grid after n steps; index [(dx+n)*(2n+1) + (d5+n)].
std::vector<std::uint64_t> count_grid(int n, int dims) {
  const int w = 2 * n + 1;
  std::vector<std::uint64_t> cur(static_cast<size_t>(w) * w, 0), nxt(cur.size());
  auto at = [w](std::vector<std::uint64_t>& g, int x, int y) -> std::uint64_t& {
    return g[static_cast<size_t>(x) * w + y];
  };
  at(cur, n, n) = 1;
  for (int s = 1; s <= n; ++s) {
    std::fill(nxt.begin(), nxt.end(), 0);
    // only the band |x|,|y| ≤ s can be occupied
    for (int x = n - s; x <= n + s; ++x)
      for (int y = n - s; y <= n + s; ++y) {
        std::uint64_t v = 0;
        if (dims == 2) {
          if (x > 0) v = checked_add(v, at(cur, x - 1, y));
          if (x + 1 < w) v = checked_add(v, at(cur, x + 1, y));
        }
        if (y > 0) v = checked_add(v, at(cur, x, y - 1));
        if (y + 1 < w) v = checked_add(v, at(cur, x, y + 1));
        at(nxt, x, y) = v;
      }
    std::swap(cur, nxt);
  }
  return cur;
}

MicroCount parity_filter(const LatticePathModel& m, int dx5) {
  MicroCount r;
  if (m.dims == 1 && m.dx != 0) {
    r.parity_ok = false;
    r.flag = "dims = 1 has no x moves, so dx must be 0";
  } else if (std::abs(m.dx) + std::abs(dx5) > m.steps) {
    r.parity_ok = false;
    r.flag = "|dx| + |dx5| exceeds the step count";
  } else if (((m.dx + dx5 + m.steps) % 2 + 2) % 2 != 0) {
    r.parity_ok = false;
    r.flag = "parity of dx + dx5 differs from the step count";
  }
  return r;
}

void enumerate_rec(int remaining, int dims, int x, int y, std::vector<std::uint64_t>& grid, int n) {
  if (remaining == 0) {
    ++grid[static_cast<size_t>(x + n) * (2 * n + 1) + (y + n)];
    return;
  }
  if (dims == 2) {
    enumerate_rec(remaining - 1, dims, x + 1, y, grid, n);
    enumerate_rec(remaining - 1, dims, x - 1, y, grid, n);
  }
  enumerate_rec(remaining - 1, dims, x, y + 1, grid, n);
  enumerate_rec(remaining - 1, dims, x, y - 1, grid, n);
}

std::uint64_t binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  uint128 r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  if (r > UINT64_MAX) throw OverflowError("binomial overflows 64 bits");
  return static_cast<std::uint64_t>(r);
}

}  // namespace

MicroCount count_null_paths_micro(const LatticePathModel& model, int dx5) {
  check_model(model);
  MicroCount r = parity_filter(model, dx5);
  if (!r.parity_ok) return r;
  const int n = model.steps;
  const auto grid = count_grid(n, model.dims);
  r.count = grid[static_cast<size_t>(model.dx + n) * (2 * n + 1) + (dx5 + n)];
  return r;
}

MicroCount count_null_paths_enumerate(const LatticePathModel& model, int dx5) {
  check_model(model);
  if (model.steps > 24) throw PreconditionError("exhaustive enumeration is limited to N <= 24");
  MicroCount r = parity_filter(model, dx5);
  if (!r.parity_ok) return r;
  const int n = model.steps;
  std::vector<std::uint64_t> grid(static_cast<size_t>(2 * n + 1) * (2 * n + 1), 0);
  enumerate_rec(n, model.dims, 0, 0, grid, n);
  r.count = grid[static_cast<size_t>(model.dx + n) * (2 * n + 1) + (dx5 + n)];
  return r;
}

std::vector<std::uint64_t> micro_histogram(const LatticePathModel& model) {
  check_model(model);
  const int n = model.steps;
  if (std::abs(model.dx) > n) return std::vector<std::uint64_t>(2 * n + 1, 0);
  const auto grid = count_grid(n, model.dims);
  std::vector<std::uint64_t> h(2 * n + 1);
  for (int d = -n; d <= n; ++d) h[d + n] = grid[static_cast<size_t>(model.dx + n) * (2 * n + 1) + d + n];
  return h;
}

std::uint64_t count_multinomial(int steps, int dx, int dx5, int dims) {
  std::uint64_t total = 0;
  for (int nx = 0; nx <= steps; ++nx) {
    if (dims == 1 && nx > 0) break;
    const int n5 = steps - nx;
    if ((nx + dx) % 2 != 0 || (n5 + dx5) % 2 != 0) continue;
    if (std::abs(dx) > nx || std::abs(dx5) > n5) continue;
    std::uint64_t term = checked_mul(binom(steps, nx), binom(nx, (nx + dx) / 2));
    term = checked_mul(term, binom(n5, (n5 + dx5) / 2));
    total = checked_add(total, term);
  }
  return total;
}

SelfConsistency microcanonical_selfconsistency(const LatticePathModel& model, int split,
                                               bool all_endpoints, int dx5) {
  check_model(model);
  const int n = model.steps;
  if (split < 0 || split > n) throw PreconditionError("split must lie in [0, N]");
  const int n1 = split, n2 = n - split;
  const auto g = count_grid(n, model.dims);
  const auto g1 = count_grid(n1, model.dims);
  const auto g2 = count_grid(n2, model.dims);
  auto get = [](const std::vector<std::uint64_t>& grid, int m, int x, int y) -> std::uint64_t {
    if (std::abs(x) > m || std::abs(y) > m) return 0;
    return grid[static_cast<size_t>(x + m) * (2 * m + 1) + (y + m)];
  };
  SelfConsistency sc;
  auto check = [&](int X, int D) {
    int128 rhs = 0;
    for (int x3 = -n1; x3 <= n1; ++x3)
      for (int d1 = -n1; d1 <= n1; ++d1) {
        const std::uint64_t a = get(g1, n1, x3, d1);
        if (!a) continue;
        rhs += static_cast<int128>(a) * get(g2, n2, X - x3, D - d1);
      }
    const int128 lhs = get(g, n, X, D);
    sc.lhs += lhs;
    sc.rhs += rhs;
    const int128 diff = lhs > rhs ? lhs - rhs : rhs - lhs;
    sc.residual = std::max<std::int64_t>(sc.residual, static_cast<std::int64_t>(diff));
    ++sc.endpoints_checked;
  };
  if (all_endpoints) {
    for (int X = -n; X <= n; ++X)
      for (int D = -n; D <= n; ++D) check(X, D);
  } else {
    check(model.dx, dx5);
  }
  return sc;
}

double LatticeGauge::link(double t, double x, double dt, double dx) const {
  const double tm = t + 0.5 * dt, xm = x + 0.5 * dx;
  double v = 0.0;
  if (A0) v += A0(tm, xm) * dt;
  if (A1) v += A1(tm, xm) * dx;
  if (chi) v += chi(t + dt, x + dx) - chi(t, x);
  return v;
}

std::vector<cplx> propagate_qm(double lambda_inv, const LatticePathModel& model, Branch branch,
                               const LatticeGauge& gauge, int start_step,
                               const std::vector<cplx>* init) {
  check_model(model);
  const int n = model.steps + start_step;  // half-width large enough for all offsets
  const int w = 2 * n + 1;
  const double a = model.a;
  const double s = sign_of(branch);
  const double k = gauge.q / (gauge.units.c * gauge.units.c);
  std::vector<cplx> cur(w, 0.0), nxt(w);
  if (init) {
    if (static_cast<int>(init->size()) != w) throw PreconditionError("propagate_qm: bad init size");
    cur = *init;
  } else {
    cur[n] = 1.0;
  }
  const cplx up = std::polar(1.0, lambda_inv * s * a);
  const cplx down = std::polar(1.0, -lambda_inv * s * a);
  const bool plain = gauge.trivial() || k == 0.0;
  for (int step = start_step; step < start_step + model.steps; ++step) {
    std::fill(nxt.begin(), nxt.end(), 0.0);
    const double t = step * a;
    for (int j = 0; j < w; ++j) {
      const cplx amp = cur[j];
      if (amp == 0.0) continue;
      const double x = (j - n) * a;
      auto phase = [&](double dx) {
        return plain ? cplx(1.0) : std::polar(1.0, -lambda_inv * k * gauge.link(t, x, a, dx));
      };
      const cplx stay = phase(0.0);
      nxt[j] += amp * stay * (up + down);
      if (model.dims == 2) {
        if (j + 1 < w) nxt[j + 1] += amp * phase(a);
        if (j > 0) nxt[j - 1] += amp * phase(-a);
      }
    }
    std::swap(cur, nxt);
  }
  return cur;
}

KernelEstimate canonical_kernel_qm(double lambda_inv, const LatticePathModel& model, Branch branch,
                                   const LatticeGauge& gauge) {
  if (!std::isfinite(lambda_inv)) throw PreconditionError("lambda^-1 must be finite");
  KernelEstimate e;
  e.method = KernelMethod::transfer_matrix;
  e.steps = model.steps;
  e.spacing = model.a;
  if (std::abs(model.dx) > model.steps) return e;
  const auto amps = propagate_qm(lambda_inv, model, branch, gauge);
  e.value = amps[model.dx + model.steps];
  return e;
}

namespace {

void enumerate_qm_rec(int remaining, int step, int j, double D, const LatticePathModel& m,
                      double lambda_inv, double s, double k, const LatticeGauge& g, bool plain,
                      cplx& acc) {
  if (remaining == 0) {
    if (j == m.dx) acc += std::polar(1.0, lambda_inv * D);
    return;
  }
  if (std::abs(m.dx - j) > remaining) return;
  const double a = m.a, t = step * a, x = j * a;
  auto link = [&](double dx) { return plain ? 0.0 : k * g.link(t, x, a, dx); };
  const double l0 = link(0.0);
  enumerate_qm_rec(remaining - 1, step + 1, j, D + s * a - l0, m, lambda_inv, s, k, g, plain, acc);
  enumerate_qm_rec(remaining - 1, step + 1, j, D - s * a - l0, m, lambda_inv, s, k, g, plain, acc);
  if (m.dims == 2) {
    enumerate_qm_rec(remaining - 1, step + 1, j + 1, D - link(a), m, lambda_inv, s, k, g, plain, acc);
    enumerate_qm_rec(remaining - 1, step + 1, j - 1, D - link(-a), m, lambda_inv, s, k, g, plain, acc);
  }
}

}  // namespace

KernelEstimate canonical_kernel_qm_enumerate(double lambda_inv, const LatticePathModel& model,
                                             Branch branch, const LatticeGauge& gauge) {
  check_model(model);
  if (model.steps > 24) throw PreconditionError("exhaustive enumeration is limited to N <= 24");
  KernelEstimate e;
  e.method = KernelMethod::exhaustive;
  e.steps = model.steps;
  e.spacing = model.a;
  const double k = gauge.q / (gauge.units.c * gauge.units.c);
  cplx acc = 0.0;
  enumerate_qm_rec(model.steps, 0, 0, 0.0, model, lambda_inv, sign_of(branch), k, gauge,
                   gauge.trivial() || k == 0.0, acc);
  e.value = acc;
  return e;
}

cplx fourier_of_counts(double lambda_inv, const LatticePathModel& model, Branch branch) {
  const auto h = micro_histogram(model);
  const int n = model.steps;
  const double s = sign_of(branch);
  cplx acc = 0.0;
  for (int d = -n; d <= n; ++d)
    if (h[d + n]) acc += static_cast<double>(h[d + n]) * std::polar(1.0, lambda_inv * s * d * model.a);
  return acc;
}

LoopIdentity quantum_probability_identity(double lambda_inv, int split, int dims, Branch branch,
                                          const LatticeGauge& gauge) {
  if (split < 0) throw PreconditionError("split must be >= 0");
  LatticePathModel m;
  m.dims = dims;
  m.steps = split;
  const auto fwd = propagate_qm(lambda_inv, m, branch, gauge);
  // Past-cone leg: the action of a path walked from 3 back to 1 is minus the action
  // of the same path walked forward, which flips every phase.
  const auto back = propagate_qm(-lambda_inv, m, branch, gauge);
  LoopIdentity r;
  for (size_t j = 0; j < fwd.size(); ++j) {
    r.loop += back[j] * fwd[j];
    r.sum_sq += std::norm(fwd[j]);
  }
  r.residual = std::abs(r.loop - r.sum_sq) / std::max(1.0, std::abs(r.sum_sq));
  return r;
}

GaugeReport gauge_transform_kernel(double lambda_inv, const LatticePathModel& model, Branch branch,
                                   const LatticeGauge& gauge,
                                   std::function<double(double, double)> chi, int loop_split) {
  GaugeReport r;
  LatticeGauge shifted = gauge;
  auto base_chi = gauge.chi;
  shifted.chi = [base_chi, chi](double t, double x) {
    return (base_chi ? base_chi(t, x) : 0.0) + chi(t, x);
  };
  r.open_before = canonical_kernel_qm(lambda_inv, model, branch, gauge).value;
  r.open_after = canonical_kernel_qm(lambda_inv, model, branch, shifted).value;
  const double k = gauge.q / (gauge.units.c * gauge.units.c);
  const double dchi = chi(model.steps * model.a, model.dx * model.a) - chi(0.0, 0.0);
  r.predicted_phase = std::polar(1.0, -lambda_inv * k * dchi);
  r.measured_phase = r.open_after / r.open_before;
  r.phase_error = std::abs(r.measured_phase - r.predicted_phase);
  r.loop_before = quantum_probability_identity(lambda_inv, loop_split, model.dims, branch, gauge).loop;
  r.loop_after = quantum_probability_identity(lambda_inv, loop_split, model.dims, branch, shifted).loop;
  r.loop_delta = std::abs(r.loop_after - r.loop_before) / std::max(1.0, std::abs(r.loop_before));
  return r;
}

}  // namespace qoptics5
