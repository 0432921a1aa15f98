#include "occm/pekar.hpp"

#include <algorithm>
#include <cmath>

#include "occm/error.hpp"
#include "occm/kernels.hpp"

namespace occm {

namespace {

constexpr double kFourPi = 4.0 * M_PI;

// Trapezoid weights r_i^2 dr for int f(r) r^2 dr.
std::vector<double> shell_weights(const RadialProfile& p) {
  const std::size_t n = p.size();
  const double dr = p.dr();
  std::vector<double> a(n);
  for (std::size_t i = 0; i < n; ++i) a[i] = p.r[i] * p.r[i] * dr;
  a[n - 1] *= 0.5;
  return a;
}

// Solves a symmetric tridiagonal system (diag d, off-diagonal e) in place of rhs.
void solve_tridiagonal(const std::vector<double>& d, const std::vector<double>& e, std::vector<double>& rhs) {
  const std::size_t n = d.size();
  std::vector<double> c(n), b(d);
  for (std::size_t i = 1; i < n; ++i) {
    const double w = e[i - 1] / b[i - 1];
    b[i] -= w * e[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  rhs[n - 1] /= b[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - e[i] * rhs[i + 1]) / b[i];
}

// Stiffness of the kinetic term: T = 1/2 psi^T K psi. Returns (diag, offdiag).
std::pair<std::vector<double>, std::vector<double>> stiffness(const RadialProfile& p) {
  const std::size_t n = p.size();
  const double dr = p.dr();
  std::vector<double> d(n, 0.0), e(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double rm = 0.5 * (p.r[i] + p.r[i + 1]);
    const double c = kFourPi * rm * rm / dr;
    e[i] = -c;
    d[i] += c;
    d[i + 1] += c;
  }
  return {d, e};
}

struct Evaluation {
  double coulomb = 0.0;
  double kinetic = 0.0;
  double mass = 0.0;
  std::vector<double> gradient;  // d(coulomb - kinetic)/d psi
};

Evaluation evaluate(const RadialProfile& p, const std::vector<double>& a, const std::vector<double>& kd,
                    const std::vector<double>& ke) {
  Evaluation ev;
  const auto phi = coulomb_potential(p);
  const std::size_t n = p.size();
  ev.gradient.assign(n, 0.0);
  std::vector<double> terms(n);
  for (std::size_t i = 0; i < n; ++i) terms[i] = a[i] * p.psi[i] * p.psi[i] * phi[i];
  ev.coulomb = kFourPi * kernels::sum(terms);
  ev.kinetic = kinetic_energy(p);
  for (std::size_t i = 0; i < n; ++i) terms[i] = a[i] * p.psi[i] * p.psi[i];
  ev.mass = kFourPi * kernels::sum(terms);
  for (std::size_t i = 0; i < n; ++i) {
    double kpsi = kd[i] * p.psi[i];
    if (i > 0) kpsi += ke[i - 1] * p.psi[i - 1];
    if (i + 1 < n) kpsi += ke[i] * p.psi[i + 1];
    ev.gradient[i] = 4.0 * kFourPi * a[i] * phi[i] * p.psi[i] - kpsi;
  }
  return ev;
}

void normalize(std::vector<double>& psi, const std::vector<double>& a, double mass) {
  double m = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) m += kFourPi * a[i] * psi[i] * psi[i];
  const double s = std::sqrt(mass / m);
  for (double& v : psi) v *= s;
}

}  // namespace

RadialProfile RadialProfile::uniform_grid(double r_max, int n) {
  require(r_max > 0.0 && n >= 2, ErrorCode::InvalidArgument, "radial grid needs r_max > 0 and n >= 2");
  RadialProfile p;
  p.r.resize(static_cast<std::size_t>(n) + 1);
  p.psi.assign(p.r.size(), 0.0);
  for (int i = 0; i <= n; ++i) p.r[i] = r_max * i / n;
  return p;
}

double RadialProfile::mass() const {
  const auto a = shell_weights(*this);
  double m = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) m += a[i] * psi[i] * psi[i];
  return kFourPi * m;
}

std::vector<double> coulomb_potential(const RadialProfile& p) {
  const std::size_t n = p.size();
  const auto a = shell_weights(p);
  // Newton: charge inside r acts from the centre, shells outside contribute 1/s.
  std::vector<double> inside(n), outside(n + 1, 0.0), phi(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += a[i] * p.psi[i] * p.psi[i];
    inside[i] = acc;
  }
  for (std::size_t i = n; i-- > 1;) outside[i] = outside[i + 1] + a[i] * p.psi[i] * p.psi[i] / p.r[i];
  for (std::size_t i = 0; i < n; ++i) {
    phi[i] = kFourPi * ((i > 0 ? inside[i] / p.r[i] : 0.0) + outside[i + 1]);
  }
  return phi;
}

double coulomb_self_energy(const RadialProfile& p) {
  const auto a = shell_weights(p);
  const auto phi = coulomb_potential(p);
  std::vector<double> terms(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) terms[i] = a[i] * p.psi[i] * p.psi[i] * phi[i];
  return kFourPi * kernels::sum(terms);
}

double kinetic_energy(const RadialProfile& p) {
  const double dr = p.dr();
  std::vector<double> terms(p.size() - 1);
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    const double rm = 0.5 * (p.r[i] + p.r[i + 1]);
    const double d = (p.psi[i + 1] - p.psi[i]) / dr;
    terms[i] = rm * rm * d * d * dr;
  }
  return 0.5 * kFourPi * kernels::sum(terms);
}

PekarResult solve_pekar(double mass, const PekarParams& params) {
  require(mass > 0.0 && mass <= 1.0, ErrorCode::InvalidArgument, "mass must be in (0, 1]");
  require(params.n >= 500, ErrorCode::InvalidArgument, "need at least 500 radial points");
  require(params.tol > 0.0, ErrorCode::InvalidArgument, "tol must be > 0");

  const double r_max = params.r_max > 0.0 ? params.r_max : 20.0 / mass;
  RadialProfile p = RadialProfile::uniform_grid(r_max, params.n);
  const auto a = shell_weights(p);
  const auto [kd, ke] = stiffness(p);
  for (std::size_t i = 0; i < p.size(); ++i) p.psi[i] = std::exp(-0.5 * p.r[i] * p.r[i] * mass * mass);
  normalize(p.psi, a, mass);

  // Sobolev preconditioner K + sigma W.
  const double sigma = mass * mass;
  std::vector<double> pd(kd);
  for (std::size_t i = 0; i < pd.size(); ++i) pd[i] += sigma * kFourPi * a[i];

  PekarResult res;
  res.mass = mass;
  auto ev = evaluate(p, a, kd, ke);
  double energy = ev.coulomb - ev.kinetic;
  res.energy_trace.push_back(energy);
  double tau = 1.0;
  const std::size_t n = p.size();
  std::vector<double> step(n), z(n), trial(n);
  int it = 0;
  for (; it < params.max_iterations; ++it) {
    step = ev.gradient;
    solve_tridiagonal(pd, ke, step);
    for (std::size_t i = 0; i < n; ++i) z[i] = kFourPi * a[i] * p.psi[i];
    double wp = 0.0;
    for (std::size_t i = 0; i < n; ++i) wp += z[i] * step[i];
    std::vector<double> wz(z);
    solve_tridiagonal(pd, ke, wz);
    double wzz = 0.0;
    for (std::size_t i = 0; i < n; ++i) wzz += z[i] * wz[i];
    const double alpha = wp / wzz;
    for (std::size_t i = 0; i < n; ++i) step[i] -= alpha * wz[i];
    double slope = 0.0;
    for (std::size_t i = 0; i < n; ++i) slope += ev.gradient[i] * step[i];
    res.residual = std::sqrt(std::max(slope, 0.0) / mass);
    if (res.residual < params.tol) {
      res.converged = true;
      break;
    }

    bool accepted = false;
    while (tau > 1e-14) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = std::abs(p.psi[i] + tau * step[i]);
      normalize(trial, a, mass);
      std::swap(p.psi, trial);
      auto cand = evaluate(p, a, kd, ke);
      const double e_new = cand.coulomb - cand.kinetic;
      if (e_new >= energy + 1e-4 * tau * slope) {
        ev = std::move(cand);
        energy = e_new;
        accepted = true;
        tau = std::min(2.0 * tau, 64.0);
        break;
      }
      std::swap(p.psi, trial);
      tau *= 0.5;
    }
    if (!accepted) break;  // stagnated in rounding noise
    res.energy_trace.push_back(energy);
  }
  res.iterations = it;

  // Radial monotone rearrangement past the first maximum.
  const auto peak = static_cast<std::size_t>(std::max_element(p.psi.begin(), p.psi.end()) - p.psi.begin());
  for (std::size_t i = peak + 1; i < n; ++i) {
    if (p.psi[i] > p.psi[i - 1]) {
      p.psi[i] = p.psi[i - 1];
      res.rearranged = true;
    }
  }
  if (res.rearranged) normalize(p.psi, a, mass);

  res.coulomb_term = coulomb_self_energy(p);
  res.kinetic_term = kinetic_energy(p);
  res.energy = res.coulomb_term - res.kinetic_term;
  const double pmax = *std::max_element(p.psi.begin(), p.psi.end());
  res.decay_ok = p.psi.back() < 1e-8 * pmax;
  res.profile = std::move(p);
  return res;
}

FixedPointCheck euler_lagrange_check(const RadialProfile& p) {
  const std::size_t n = p.size();
  const auto a = shell_weights(p);
  const auto phi = coulomb_potential(p);
  auto [kd, ke] = stiffness(p);
  // H = 1/2 K - 2 diag(4 pi a Phi), generalized against W = diag(4 pi a).
  std::vector<double> hd(n), he(ke), w(n);
  for (auto& v : he) v *= 0.5;
  for (std::size_t i = 0; i < n; ++i) {
    hd[i] = 0.5 * kd[i] - 2.0 * kFourPi * a[i] * phi[i];
    w[i] = kFourPi * a[i];
  }
  auto apply_h = [&](const std::vector<double>& u) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = hd[i] * u[i];
      if (i > 0) out[i] += he[i - 1] * u[i - 1];
      if (i + 1 < n) out[i] += he[i] * u[i + 1];
    }
    return out;
  };
  auto rayleigh = [&](const std::vector<double>& u) {
    const auto hu = apply_h(u);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      num += u[i] * hu[i];
      den += w[i] * u[i] * u[i];
    }
    return num / den;
  };
  const double rq = rayleigh(p.psi);
  const double shift = rq - 1e-2 * std::max(std::abs(rq), 1e-3);
  std::vector<double> sd(n);
  for (std::size_t i = 0; i < n; ++i) sd[i] = hd[i] - shift * w[i];
  std::vector<double> u(p.psi);
  for (int k = 0; k < 60; ++k) {
    std::vector<double> rhs(n);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = w[i] * u[i];
    solve_tridiagonal(sd, he, rhs);
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) norm += w[i] * rhs[i] * rhs[i];
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < n; ++i) u[i] = rhs[i] / norm;
  }
  FixedPointCheck out;
  out.eigenvalue = rayleigh(u);
  double dot = 0.0;
  for (std::size_t i = 0; i < n; ++i) dot += w[i] * u[i] * p.psi[i];
  const double m = p.mass();
  const double scale = (dot < 0 ? -1.0 : 1.0) * std::sqrt(m);
  double diff = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = scale * u[i] - p.psi[i];
    diff += w[i] * d * d;
  }
  out.distance = std::sqrt(diff / m);
  return out;
}

ProfileMeasure profile_to_measure(const RadialProfile& p, const GridSpec& grid, const Coord& center) {
  require(grid.dim() == 3, ErrorCode::DimensionError, "profiles map to 3-D grids only");
  require(center.size() == 3, ErrorCode::DimensionMismatch, "centre must have 3 coordinates");
  const double h = grid.spacing();
  double inner = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 3; ++k) {
    const double lo = (static_cast<double>(grid.offset()[k]) - 0.5) * h;
    const double hi = (static_cast<double>(grid.offset()[k] + grid.shape()[k]) - 0.5) * h;
    inner = std::min({inner, center[k] - lo, hi - center[k]});
  }
  const auto a = shell_weights(p);
  double outside = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p.r[i] > inner) outside += kFourPi * a[i] * p.psi[i] * p.psi[i];
  }
  const double mass = p.mass();
  ProfileMeasure out;
  out.truncation_loss = mass > 0.0 ? outside / mass : 0.0;
  require(out.truncation_loss <= 1e-3, ErrorCode::GridTooSmall,
          "grid misses " + std::to_string(100.0 * out.truncation_loss) + "% of the profile mass");

  const double dr = p.dr();
  const double r_last = p.r.back();
  std::vector<double> w(static_cast<std::size_t>(grid.size()));
  double x[3];
  for (Index i = 0; i < grid.size(); ++i) {
    grid.center(i, x);
    const double r = std::sqrt((x[0] - center[0]) * (x[0] - center[0]) + (x[1] - center[1]) * (x[1] - center[1]) +
                               (x[2] - center[2]) * (x[2] - center[2]));
    if (r >= r_last) {
      w[i] = 0.0;
      continue;
    }
    const auto j = static_cast<std::size_t>(r / dr);
    const double t = r / dr - static_cast<double>(j);
    const double v0 = p.psi[j] * p.psi[j];
    const double v1 = p.psi[j + 1] * p.psi[j + 1];
    w[i] = (v0 + t * (v1 - v0)) * h * h * h;
  }
  const double got = kernels::sum(w);
  require(got > 0.0, ErrorCode::GridTooSmall, "profile does not reach any cell centre");
  for (double& v : w) v *= mass / got;
  out.measure = DiscreteMeasure(grid, std::move(w));
  return out;
}

}  // namespace occm
