#include "qvlab/generators.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <stdexcept>

namespace qvlab {
namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// In-place iterative radix-2 FFT (forward, unnormalized); size power of two.
void fft(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * M_PI / static_cast<double>(len);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

// fGn autocovariance at lag k for unit-variance steps, before dt/scale
// normalization: gamma(k) = 0.5 (|k+1|^{2H} - 2|k|^{2H} + |k-1|^{2H}).
double fgn_gamma(std::size_t k, double two_h) {
  const double kk = static_cast<double>(k);
  const double up = std::pow(kk + 1.0, two_h);
  const double mid = k == 0 ? 0.0 : 2.0 * std::pow(kk, two_h);
  const double down = k == 0 ? std::pow(1.0, two_h) : std::pow(kk - 1.0, two_h);
  return 0.5 * (up - mid + down);
}

std::vector<double> fgn_davies_harte(std::size_t n, double hurst,
                                     RandomStream& stream, bool& ok) {
  const std::size_t m = 2 * n;
  const double two_h = 2.0 * hurst;
  std::vector<std::complex<double>> c(m);
  for (std::size_t j = 0; j <= n; ++j) c[j] = fgn_gamma(j, two_h);
  for (std::size_t j = 1; j < n; ++j) c[m - j] = c[j];
  fft(c);
  std::vector<double> lambda(m);
  double max_l = 0.0, min_l = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    lambda[j] = c[j].real();
    max_l = std::max(max_l, lambda[j]);
    min_l = std::min(min_l, lambda[j]);
  }
  if (min_l < -1e-8 * max_l) {
    ok = false;
    return {};
  }
  for (double& l : lambda) l = std::max(l, 0.0);

  std::vector<std::complex<double>> v(m);
  const double dm = static_cast<double>(m);
  v[0] = std::sqrt(lambda[0] / dm) * stream.next_normal();
  v[n] = std::sqrt(lambda[n] / dm) * stream.next_normal();
  for (std::size_t k = 1; k < n; ++k) {
    const double s = std::sqrt(lambda[k] / (2.0 * dm));
    const double a = stream.next_normal();
    const double b = stream.next_normal();
    v[k] = std::complex<double>(s * a, s * b);
    v[m - k] = std::conj(v[k]);
  }
  fft(v);
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) out[j] = v[j].real();
  ok = true;
  return out;
}

std::vector<double> fgn_cholesky(std::size_t n, double hurst,
                                 RandomStream& stream) {
  if (n > 4096)
    throw std::runtime_error(
        "gen_fbm: Cholesky fallback limited to n_steps <= 4096; use a "
        "power-of-two grid for circulant embedding");
  const double two_h = 2.0 * hurst;
  // dense lower-triangular factor of the fGn covariance
  std::vector<std::vector<double>> l(n);
  for (std::size_t i = 0; i < n; ++i) l[i].assign(i + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double sum = fgn_gamma(i - j, two_h);
      for (std::size_t k = 0; k < j; ++k) sum -= l[i][k] * l[j][k];
      if (i == j) {
        if (sum <= 0.0) throw std::runtime_error("gen_fbm: covariance not SPD");
        l[i][j] = std::sqrt(sum);
      } else {
        l[i][j] = sum / l[j][j];
      }
    }
  }
  std::vector<double> z(n);
  for (double& g : z) g = stream.next_normal();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) out[i] += l[i][j] * z[j];
  return out;
}

}  // namespace

CadlagPath gen_bm(const TimeGrid& grid, double sigma, RandomStream stream) {
  if (sigma < 0.0) throw std::invalid_argument("gen_bm: sigma must be >= 0");
  std::vector<double> cont(grid.n_steps + 1, 0.0);
  const double step_sd = sigma * std::sqrt(grid.step());
  for (std::size_t i = 1; i <= grid.n_steps; ++i)
    cont[i] = cont[i - 1] + step_sd * stream.next_normal();
  return CadlagPath(grid, std::move(cont), {});
}

CadlagPath gen_fbm(const TimeGrid& grid, double hurst, double scale,
                   RandomStream stream) {
  if (!(hurst > 0.5 && hurst < 1.0))
    throw std::invalid_argument("gen_fbm: hurst must be in (0.5, 1)");
  const std::size_t n = grid.n_steps;
  std::vector<double> fgn;
  bool ok = false;
  if (is_power_of_two(n)) fgn = fgn_davies_harte(n, hurst, stream, ok);
  if (!ok) fgn = fgn_cholesky(n, hurst, stream);
  const double step_scale = scale * std::pow(grid.step(), hurst);
  std::vector<double> cont(n + 1, 0.0);
  for (std::size_t i = 1; i <= n; ++i)
    cont[i] = cont[i - 1] + step_scale * fgn[i - 1];
  return CadlagPath(grid, std::move(cont), {});
}

RealizedJumps gen_jumps(const TimeGrid& grid, const JumpModel& model,
                        RandomStream poisson_stream, RandomStream fixed_stream) {
  model.validate(grid.n_steps);
  RealizedJumps out;

  std::map<std::size_t, double> poisson_acc;
  for (const auto& pp : model.poisson) {
    const std::uint64_t count =
        poisson_stream.next_poisson(pp.intensity * grid.horizon);
    for (std::uint64_t k = 0; k < count; ++k) {
      const double u = poisson_stream.next_unit();
      const std::size_t idx = std::min<std::size_t>(
          grid.n_steps, static_cast<std::size_t>(u * grid.n_steps) + 1);
      poisson_acc[idx] += pp.law.sample(poisson_stream);
    }
  }

  std::map<std::size_t, double> fixed_acc;
  // fixed times drawn in sorted index order for stream determinism
  std::vector<FixedTimeJump> fts = model.fixed_times;
  std::sort(fts.begin(), fts.end(), [](const auto& a, const auto& b) {
    return a.grid_index < b.grid_index;
  });
  for (const auto& ft : fts) {
    const double u = fixed_stream.next_unit();
    if (u < ft.fire_prob) {
      const double size = ft.law.sample(fixed_stream);
      if (size != 0.0) fixed_acc[ft.grid_index] += size;
    }
  }

  // a Poisson arrival in a predictable-jump cell folds into the fixed jump
  for (auto it = poisson_acc.begin(); it != poisson_acc.end();) {
    auto fit = fixed_acc.find(it->first);
    if (fit != fixed_acc.end()) {
      fit->second += it->second;
      it = poisson_acc.erase(it);
    } else {
      ++it;
    }
  }

  for (auto& [idx, size] : poisson_acc)
    if (size != 0.0) out.poisson.push_back({idx, size});
  for (auto& [idx, size] : fixed_acc)
    if (size != 0.0) out.predictable.push_back({idx, size});

  out.merged.reserve(out.poisson.size() + out.predictable.size());
  std::merge(out.poisson.begin(), out.poisson.end(), out.predictable.begin(),
             out.predictable.end(), std::back_inserter(out.merged),
             [](const Jump& a, const Jump& b) { return a.index < b.index; });
  return out;
}

double DriftSpec::value(double t) const {
  if (knots.empty()) return 0.0;
  if (t <= knots.front().first) return knots.front().second;
  if (t >= knots.back().first) return knots.back().second;
  for (std::size_t i = 1; i < knots.size(); ++i) {
    if (t <= knots[i].first) {
      const auto& [t0, v0] = knots[i - 1];
      const auto& [t1, v1] = knots[i];
      return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
    }
  }
  return knots.back().second;
}

void ProcessSpec::validate(const TimeGrid& grid) const {
  if (bm_sigma < 0.0) throw std::invalid_argument("ProcessSpec: bm_sigma < 0");
  jumps.validate(grid.n_steps);
  if (zero_qv.kind == ZeroQvSpec::Kind::Fbm &&
      !(zero_qv.hurst > 0.5 && zero_qv.hurst < 1.0))
    throw std::invalid_argument("ProcessSpec: hurst must be in (0.5, 1)");
  for (std::size_t i = 1; i < drift.knots.size(); ++i)
    if (!(drift.knots[i].first > drift.knots[i - 1].first))
      throw std::invalid_argument("ProcessSpec: drift knots must be increasing");
}

DirichletPath gen_dirichlet(const ProcessSpec& spec, const TimeGrid& grid,
                            std::uint64_t seed, std::uint64_t member) {
  spec.validate(grid);

  CadlagPath m = gen_bm(grid, spec.bm_sigma,
                        RandomStream::derive(seed, "bm", member));

  std::vector<double> drift_vals(grid.n_steps + 1, 0.0);
  for (std::size_t i = 0; i <= grid.n_steps; ++i)
    drift_vals[i] = spec.drift.value(grid.time(i));
  CadlagPath v(grid, std::move(drift_vals), {});

  RealizedJumps jumps =
      gen_jumps(grid, spec.jumps, RandomStream::derive(seed, "jumps-poisson", member),
                RandomStream::derive(seed, "jumps-fixed", member));

  std::vector<double> z_cont(grid.n_steps + 1);
  for (std::size_t i = 0; i <= grid.n_steps; ++i)
    z_cont[i] = m.cont()[i] + v.cont()[i];
  CadlagPath z(grid, std::move(z_cont), jumps.merged);

  CadlagPath c = CadlagPath::zero(grid);
  switch (spec.zero_qv.kind) {
    case ZeroQvSpec::Kind::None:
      break;
    case ZeroQvSpec::Kind::Fbm:
      c = gen_fbm(grid, spec.zero_qv.hurst, spec.zero_qv.scale,
                  RandomStream::derive(seed, "zeroqv", member));
      break;
    case ZeroQvSpec::Kind::DeterministicHoelder: {
      // fixed Weierstrass-style path: a few dyadic sine layers with H-decay
      std::vector<double> cont(grid.n_steps + 1, 0.0);
      for (std::size_t i = 0; i <= grid.n_steps; ++i) {
        const double t = grid.time(i) / grid.horizon;
        double s = 0.0;
        for (int level = 1; level <= 12; ++level) {
          const double freq = std::pow(2.0, level);
          s += std::pow(freq, -spec.zero_qv.hurst) *
               std::sin(2.0 * M_PI * freq * t);
        }
        cont[i] = spec.zero_qv.scale * s;
      }
      c = CadlagPath(grid, std::move(cont), {});
      break;
    }
  }

  DirichletPath out{CadlagPath::combine(1.0, z, 1.0, c),
                    std::move(z),
                    std::move(c),
                    std::move(m),
                    std::move(v),
                    std::move(jumps),
                    spec.jumps,
                    spec,
                    grid,
                    seed};
  return out;
}

double PerturbationFamily::eps(int n) const {
  return coefficient * std::pow(2.0, -0.5 * static_cast<double>(n));
}

PerturbedFamily gen_perturbed_family(const DirichletPath& base,
                                     const PerturbationFamily& fam,
                                     std::uint64_t seed) {
  if (fam.n_max < fam.n_min)
    throw std::invalid_argument("PerturbationFamily: n_max < n_min");
  PerturbedFamily out;
  for (int n = fam.n_min; n <= fam.n_max; ++n) {
    const double e = fam.eps(n);
    out.ns.push_back(n);
    out.eps.push_back(e);
    switch (fam.kind) {
      case PerturbationFamily::Kind::AddBM: {
        CadlagPath w = gen_bm(base.grid, 1.0,
                              RandomStream::derive(seed, "perturb-bm",
                                                   static_cast<std::uint64_t>(n)));
        out.members.push_back(CadlagPath::combine(1.0, base.x, e, w));
        break;
      }
      case PerturbationFamily::Kind::AddZeroQV: {
        CadlagPath cpath =
            gen_fbm(base.grid, fam.hurst, 1.0,
                    RandomStream::derive(seed, "perturb-zeroqv",
                                         static_cast<std::uint64_t>(n)));
        out.members.push_back(CadlagPath::combine(1.0, base.x, e, cpath));
        break;
      }
      case PerturbationFamily::Kind::JumpScale: {
        std::vector<Jump> scaled = base.x.jumps();
        for (Jump& j : scaled) j.size *= (1.0 + e);
        out.members.push_back(
            CadlagPath(base.grid, base.x.cont(), std::move(scaled)));
        break;
      }
    }
  }
  return out;
}

}  // namespace qvlab
