#include "qoptics5/limits.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace qoptics5 {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI(0.0, 1.0);

int mode_index(int j, int n) { return j < n / 2 ? j : j - n; }

void check_params(const X3Params& p) {
  if (!(p.pz > 0.0)) throw PreconditionError("x3 kernel needs p_z > 0");
  if (!(p.m > 0.0)) throw PreconditionError("x3 kernel needs m > 0");
  if (p.n_transverse < 2 || p.n5 < 2) throw PreconditionError("x3 kernel grids need >= 2 points");
  if (!(p.h > 0.0)) throw PreconditionError("x3 kernel needs a positive transverse spacing");
  if (p.mode5 < 1 || p.mode5 >= (p.n5 + 1) / 2)
    throw PreconditionError("x3 kernel mode5 must lie strictly inside the x5 Nyquist band");
  if (!(p.t > 0.0)) throw PreconditionError("x3 kernel needs t > 0");
}

}  // namespace

double x3_offset(const X3Params& p) {
  const double c = p.units.c, c2 = c * c;
  const double w = p.m * c + p.pz * p.q * p.A0 / c2;
  return c / (2 * p.pz) * w * w + p.pz * p.V / (p.m * c) + p.pz * c;
}

X3Report x3_foliation_kernel(const X3Params& p) {
  check_params(p);
  const double c = p.units.c, c2 = c * c, hb = p.units.hbar;
  X3Report r;
  r.validity_ratio = p.pz / std::max(p.m * c, std::abs(p.p_transverse));
  if (r.validity_ratio < 1.0) {
    std::ostringstream os;
    os << "x3 reduction invalid: p_z/max(mc, p_perp) = " << r.validity_ratio << " < 1";
    throw PreconditionError(os.str());
  }
  r.warning = r.validity_ratio < 10.0;
  r.offset = x3_offset(p);
  const int N = p.n_transverse, N5 = p.n5;
  const double L = N * p.h;
  const double L5 = 2 * kPi * p.mode5 * hb / (p.m * c);
  r.h5 = L5 / N5;
  const double sgn = sign_of(p.branch);
  const double k5star = 2 * kPi * p.mode5 / L5;
  auto kx = [&](int j) { return 2 * kPi * mode_index(j, N) / L; };
  // separable transverse factors
  auto transverse_phase = [&](int jx, int jy) {
    const double k2 = kx(jx) * kx(jx) + kx(jy) * kx(jy);
    return c / (2 * p.pz) * hb * hb * k2;
  };
  auto energy = [&](int jx, int jy, double k5) {
    const double w = hb * k5 + p.pz * p.q * p.A0 / c2;
    return transverse_phase(jx, jy) + c / (2 * p.pz) * w * w + p.pz * p.V / (p.m * c) + p.pz * c;
  };
  // 3D kernel on the full (x, y, x5) grid, then projected onto exp(i k5* x5)
  std::vector<cplx> K3(static_cast<size_t>(N) * N * N5, 0.0);
  const double vol = L * L * L5;
  for (int jx = 0; jx < N; ++jx)
    for (int jy = 0; jy < N; ++jy)
      for (int j5 = 0; j5 < N5; ++j5) {
        const double k5 = 2 * kPi * mode_index(j5, N5) / L5;
        const cplx amp = std::exp(kI * sgn * p.t * energy(jx, jy, k5) / hb) / vol;
        for (int ix = 0; ix < N; ++ix)
          for (int iy = 0; iy < N; ++iy) {
            const double ph_t = kx(jx) * ix * p.h + kx(jy) * iy * p.h;
            const cplx base = amp * std::exp(kI * ph_t);
            for (int i5 = 0; i5 < N5; ++i5)
              K3[(static_cast<size_t>(ix) * N + iy) * N5 + i5] += base * std::exp(kI * k5 * (i5 * r.h5));
          }
      }
  r.projected.assign(static_cast<size_t>(N) * N, 0.0);
  for (int ix = 0; ix < N; ++ix)
    for (int iy = 0; iy < N; ++iy) {
      cplx acc = 0.0;
      for (int i5 = 0; i5 < N5; ++i5)
        acc += r.h5 * std::exp(-kI * k5star * (i5 * r.h5)) * K3[(static_cast<size_t>(ix) * N + iy) * N5 + i5];
      r.projected[static_cast<size_t>(ix) * N + iy] = acc;
    }
  // reduced 2D kernel with the offset constant
  r.reduced.assign(static_cast<size_t>(N) * N, 0.0);
  for (int jx = 0; jx < N; ++jx)
    for (int jy = 0; jy < N; ++jy) {
      const cplx amp = std::exp(kI * sgn * p.t * (transverse_phase(jx, jy) + r.offset) / hb) / (L * L);
      for (int ix = 0; ix < N; ++ix)
        for (int iy = 0; iy < N; ++iy)
          r.reduced[static_cast<size_t>(ix) * N + iy] +=
              amp * std::exp(kI * (kx(jx) * ix * p.h + kx(jy) * iy * p.h));
    }
  for (size_t i = 0; i < r.reduced.size(); ++i) {
    r.max_abs = std::max(r.max_abs, std::abs(r.reduced[i]));
    r.max_abs_diff = std::max(r.max_abs_diff, std::abs(r.reduced[i] - r.projected[i]));
  }
  return r;
}

double x3_spreading_rate(const X3Params& p, double sigma0, int grid, double spacing) {
  if (!(sigma0 > 0.0) || grid < 8 || !(spacing > 0.0))
    throw PreconditionError("spreading rate needs sigma0 > 0, grid >= 8, spacing > 0");
  if (!(p.pz > 0.0) || !(p.t > 0.0)) throw PreconditionError("spreading rate needs p_z > 0, t > 0");
  const double c = p.units.c, hb = p.units.hbar;
  const double L = grid * spacing;
  auto xpos = [&](int i) { return (i - grid / 2) * spacing; };
  std::vector<cplx> psi(grid), spec(grid);
  for (int i = 0; i < grid; ++i) psi[i] = std::exp(-xpos(i) * xpos(i) / (4 * sigma0 * sigma0));
  const double sgn = sign_of(p.branch);
  // free transverse propagation; the offset only contributes a global phase
  for (int j = 0; j < grid; ++j) {
    const double k = 2 * kPi * mode_index(j, grid) / L;
    cplx acc = 0.0;
    for (int i = 0; i < grid; ++i) acc += psi[i] * std::exp(-kI * k * xpos(i));
    spec[j] = acc * std::exp(kI * sgn * p.t * c * hb * k * k / (2 * p.pz));
  }
  auto width2 = [&](const std::vector<cplx>& f) {
    double n = 0.0, m1 = 0.0, m2 = 0.0;
    for (int i = 0; i < grid; ++i) {
      const double w = std::norm(f[i]);
      n += w;
      m1 += w * xpos(i);
      m2 += w * xpos(i) * xpos(i);
    }
    m1 /= n;
    return m2 / n - m1 * m1;
  };
  const double s0 = width2(psi);
  std::vector<cplx> out(grid);
  for (int i = 0; i < grid; ++i) {
    cplx acc = 0.0;
    for (int j = 0; j < grid; ++j) acc += spec[j] * std::exp(kI * (2 * kPi * mode_index(j, grid) / L) * xpos(i));
    out[i] = acc / static_cast<double>(grid);
  }
  const double st = width2(out);
  if (!(st > s0)) throw ConvergenceError("packet did not spread; increase t or resolution");
  return std::sqrt(st - s0) / p.t;
}

}  // namespace qoptics5
