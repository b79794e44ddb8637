#include "qoptics5/kernels.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <thread>

namespace qoptics5 {

namespace {

void check_lattice(const StatLattice& lat) {
  if (lat.dims != 1 && lat.dims != 2) throw PreconditionError("stat lattice dims must be 1 or 2");
  if (lat.side < 1) throw PreconditionError("stat lattice side must be >= 1");
  if (!(lat.a > 0.0)) throw PreconditionError("stat lattice spacing must be positive");
  if (lat.max_steps < 0) throw PreconditionError("stat lattice max_steps must be >= 0");
}

void check_site(const StatLattice& lat, int s) {
  if (s < 0 || s >= lat.sites()) throw PreconditionError("site index out of range");
}

/// Neighbor lists. Periodic rings of side 1 or 2 keep their multi-edges so every
/// site has degree 2·dims, which is what the step-counting formulas assume.
std::vector<std::vector<int>> neighbors(const StatLattice& lat) {
  const int L = lat.side;
  std::vector<std::vector<int>> nb(lat.sites());
  auto idx = [&](int x, int y) { return lat.dims == 1 ? x : x * L + y; };
  for (int x = 0; x < L; ++x)
    for (int y = 0; y < (lat.dims == 1 ? 1 : L); ++y) {
      auto& list = nb[idx(x, y)];
      for (int axis = 0; axis < lat.dims; ++axis)
        for (int d : {-1, 1}) {
          int nx = x, ny = y;
          (axis == 0 ? nx : ny) += d;
          int& c = axis == 0 ? nx : ny;
          if (lat.boundary == Boundary::periodic) {
            c = ((c % L) + L) % L;
          } else if (c < 0 || c >= L) {
            continue;
          }
          list.push_back(idx(nx, ny));
        }
    }
  return nb;
}

std::vector<double> step(const std::vector<std::vector<int>>& nb, const std::vector<double>& v) {
  std::vector<double> out(v.size(), 0.0);
  for (size_t i = 0; i < v.size(); ++i) {
    if (v[i] == 0.0) continue;
    for (int j : nb[i]) out[j] += v[i];
  }
  return out;
}

bool counts(const StatLattice& lat, int n) { return n * lat.a >= lat.d_min * (1.0 - 1e-12); }

ThermoValue log_or_sentinel(double sum, double kB) {
  ThermoValue t;
  if (sum > 0.0) {
    t.value = kB * std::log(sum);
  } else {
    t.value = -std::numeric_limits<double>::infinity();
    t.degenerate = true;
  }
  return t;
}

/// Σ_i ρ(n; i → i) for n = 0..max_steps.
std::vector<double> trace_series(const StatLattice& lat) {
  const auto nb = neighbors(lat);
  const int S = lat.sites();
  std::vector<double> tr(lat.max_steps + 1, 0.0);
  for (int i = 0; i < S; ++i) {
    std::vector<double> v(S, 0.0);
    v[i] = 1.0;
    for (int n = 0; n <= lat.max_steps; ++n) {
      tr[n] += v[i];
      if (n < lat.max_steps) v = step(nb, v);
    }
  }
  return tr;
}

}  // namespace

std::vector<double> rho_series(const StatLattice& lat, int from, int to) {
  check_lattice(lat);
  check_site(lat, from);
  check_site(lat, to);
  const auto nb = neighbors(lat);
  std::vector<double> v(lat.sites(), 0.0), out;
  v[from] = 1.0;
  for (int n = 0; n <= lat.max_steps; ++n) {
    out.push_back(v[to]);
    if (n < lat.max_steps) v = step(nb, v);
  }
  return out;
}

double laplace_of_counts(double Lambda_inv, const StatLattice& lat, const std::vector<double>& rho) {
  double k = 0.0;
  for (size_t n = 0; n < rho.size(); ++n)
    if (counts(lat, static_cast<int>(n))) k += std::exp(-static_cast<double>(n) * lat.a * Lambda_inv) * rho[n];
  return k;
}

KernelEstimate canonical_kernel_sm(double Lambda_inv, const StatLattice& lat, int from, int to) {
  if (!(Lambda_inv > 0.0)) throw PreconditionError("Lambda^-1 must be positive");
  check_lattice(lat);
  check_site(lat, from);
  check_site(lat, to);
  const auto nb = neighbors(lat);
  const double w = std::exp(-lat.a * Lambda_inv);
  std::vector<double> v(lat.sites(), 0.0);
  v[from] = 1.0;
  double k = 0.0;
  for (int n = 0; n <= lat.max_steps; ++n) {
    if (counts(lat, n)) k += v[to];
    if (n < lat.max_steps) {
      v = step(nb, v);
      for (double& x : v) x *= w;
    }
  }
  KernelEstimate e;
  e.value = k;
  e.method = KernelMethod::transfer_matrix;
  e.steps = lat.max_steps;
  e.spacing = lat.a;
  return e;
}

KernelEstimate canonical_kernel_sm_sampled(double Lambda_inv, const StatLattice& lat, int from,
                                           int to, std::uint64_t samples, std::uint64_t seed,
                                           int threads) {
  if (!(Lambda_inv > 0.0)) throw PreconditionError("Lambda^-1 must be positive");
  if (samples < 2) throw PreconditionError("sampled estimator needs at least two samples");
  check_lattice(lat);
  check_site(lat, from);
  check_site(lat, to);
  const auto nb = neighbors(lat);
  const double w = std::exp(-lat.a * Lambda_inv);
  std::vector<double> y(samples, 0.0);
  auto one = [&](std::uint64_t i) {
    std::seed_seq sq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                     static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i >> 32)};
    std::mt19937_64 rng(sq);
    int site = from;
    double weight = 1.0;  // importance weight Π deg × e^{−n a Λ⁻¹}
    double acc = counts(lat, 0) && site == to ? 1.0 : 0.0;
    for (int n = 1; n <= lat.max_steps; ++n) {
      const auto& list = nb[site];
      if (list.empty()) break;
      std::uniform_int_distribution<size_t> pick(0, list.size() - 1);
      weight *= static_cast<double>(list.size()) * w;
      site = list[pick(rng)];
      if (site == to && counts(lat, n)) acc += weight;
    }
    y[i] = acc;
  };
  const int nt = std::max(1, threads);
  std::vector<std::thread> pool;
  auto work = [&](int tid) {
    for (std::uint64_t i = tid; i < samples; i += nt) one(i);
  };
  for (int t = 1; t < nt; ++t) pool.emplace_back(work, t);
  work(0);
  for (auto& th : pool) th.join();
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(samples);
  double var = 0.0;
  for (double v : y) var += (v - mean) * (v - mean);
  var /= static_cast<double>(samples - 1);
  KernelEstimate e;
  e.value = mean;
  e.method = KernelMethod::sampled;
  e.steps = lat.max_steps;
  e.spacing = lat.a;
  e.stat_error = std::sqrt(var / static_cast<double>(samples));
  return e;
}

ThermoValue entropy_micro(const StatLattice& lat, int n, const Units& u) {
  check_lattice(lat);
  if (n < 0) throw PreconditionError("entropy needs n >= 0");
  StatLattice l = lat;
  l.max_steps = n;
  return log_or_sentinel(trace_series(l)[n], u.kB);
}

ThermoValue massieu_canonical(const StatLattice& lat, double Lambda_inv, const Units& u) {
  if (!(Lambda_inv > 0.0)) throw PreconditionError("Lambda^-1 must be positive");
  check_lattice(lat);
  double sum = 0.0;
  for (int i = 0; i < lat.sites(); ++i) sum += canonical_kernel_sm(Lambda_inv, lat, i, i).value.real();
  return log_or_sentinel(sum, u.kB);
}

ThermoValue massieu_from_entropy(const StatLattice& lat, double Lambda_inv, const Units& u) {
  if (!(Lambda_inv > 0.0)) throw PreconditionError("Lambda^-1 must be positive");
  check_lattice(lat);
  double sum = 0.0;
  for (int n = 0; n <= lat.max_steps; ++n) {
    if (!counts(lat, n)) continue;
    const ThermoValue s = entropy_micro(lat, n, u);
    if (s.degenerate) continue;
    sum += std::exp(-n * lat.a * Lambda_inv + s.value / u.kB);
  }
  return log_or_sentinel(sum, u.kB);
}

}  // namespace qoptics5
