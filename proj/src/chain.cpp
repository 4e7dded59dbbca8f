#include "altchain/chain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace altchain {
namespace {

constexpr int kMaxOrder = 48;
constexpr long kMaxCells = 200000;
constexpr double kEps = std::numeric_limits<double>::epsilon();

// Pair-type index: 0 = (1,1), 1 = (2,2), 2 = mixed. Base index 0 is species 2.
int pair_type(int n, int k) {
  const int a = Configuration::species(n);
  const int b = Configuration::species(k);
  if (a != b) {
    return 2;
  }
  return a == 1 ? 0 : 1;
}

// Number of ordered (n, k) pairs of a type per period, and the multiplicity
// of each type in f11 + f22 + 2 f12.
double pair_multiplicity(int type) { return type == 2 ? 2.0 : 1.0; }

// (q)_n / n!
double binomial_weight(double q, int n) { return numerics::rising_ratio(q, n); }

// Upper bound on a_{n+2}/a_n for all orders >= n, a_n = (q)_n / n!.
double ratio_bound(double q, int n) {
  const double r = (q + n) * (q + n + 1.0) / ((n + 1.0) * (n + 2.0));
  return std::max(1.0, r);
}

// sum_{i >= M} (i + 1)^w env(i L) for exponentially decaying envelopes:
// explicit terms, then a geometric remainder from the last term ratio.
// Returns +inf when the ratio has not dropped below 1.
double envelope_cell_sum(const Potential& pot, int order, int weight, double L, long M) {
  auto term = [&](long i) {
    const double w = weight == 0 ? 1.0 : static_cast<double>(i + 1);
    return w * pot.envelope(static_cast<double>(i) * L, order);
  };
  double sum = 0.0;
  double prev = term(M);
  sum += prev;
  for (long i = M + 1; i < M + 64; ++i) {
    const double t = term(i);
    sum += t;
    if (t == 0.0) {
      return sum;
    }
    const double ratio = t / prev;
    prev = t;
    if (ratio < 0.5 && t < 1e-300 + 1e-20 * sum) {
      return sum + t * ratio / (1.0 - ratio);
    }
  }
  const double ratio = term(M + 64) / prev;
  if (!(ratio < 1.0)) {
    return std::numeric_limits<double>::infinity();
  }
  return sum + term(M + 64) / (1.0 - ratio);
}

bool is_power_law(const Potential& p) {
  return std::holds_alternative<PowerLaw>(p.kind()) && !p.is_zero();
}

}  // namespace

Configuration::Configuration(std::vector<double> gaps, double rho)
    : gaps_(std::move(gaps)), rho_(rho) {
  if (!(rho_ > 0.0) || !std::isfinite(rho_)) {
    throw PreconditionError("configuration: rho must be finite and > 0");
  }
  if (gaps_.size() < 2 || gaps_.size() % 2 != 0) {
    throw PreconditionError("configuration: N must be even and >= 2, got " +
                            std::to_string(gaps_.size()));
  }
  numerics::CompensatedSum total;
  for (double d : gaps_) {
    if (!(d > 0.0) || !std::isfinite(d)) {
      throw PreconditionError("configuration: every gap must be finite and > 0");
    }
    total += d;
  }
  const double expected = period();
  if (std::abs(total.value() - expected) > 1e-9 * expected) {
    std::ostringstream msg;
    msg << "configuration: gaps sum to " << total.value() << " but N / rho = " << expected;
    throw PreconditionError(msg.str());
  }
}

Configuration Configuration::equidistant(int n, double rho) {
  if (n < 2 || n % 2 != 0) {
    throw PreconditionError("equidistant: N must be even and >= 2, got " + std::to_string(n));
  }
  if (!(rho > 0.0)) {
    throw PreconditionError("equidistant: rho must be > 0");
  }
  return Configuration(std::vector<double>(static_cast<std::size_t>(n), 1.0 / rho), rho);
}

std::vector<double> Configuration::positions() const {
  std::vector<double> x(gaps_.size());
  double acc = 0.0;
  for (std::size_t j = 0; j < gaps_.size(); ++j) {
    x[j] = acc;
    acc += gaps_[j];
  }
  return x;
}

double Configuration::distance_to_equidistant() const {
  const double l = ell();
  double worst = 0.0;
  for (double d : gaps_) {
    worst = std::max(worst, std::abs(d - l) / l);
  }
  return worst;
}

ChainEnergy::ChainEnergy(const PotentialTriple& triple, int n, double rho, const Tolerance& tol)
    : triple_(triple), n_(n), rho_(rho), period_(static_cast<double>(n) / rho), tol_(tol) {
  tol_.validate();
  if (n < 2 || n % 2 != 0) {
    throw PreconditionError("energy: N must be even and >= 2");
  }
  if (!(rho > 0.0)) {
    throw PreconditionError("energy: rho must be > 0");
  }

  // Components without a decay certificate are only admissible when their
  // exponent group is neutral: sum of multiplicity * coefficient vanishes.
  for (int t = 0; t < 3; ++t) {
    const Potential& pot = potential(t);
    if (pot.decay()) {
      continue;
    }
    const double p = std::get<PowerLaw>(pot.kind()).p;
    double weight = 0.0;
    double scale = 0.0;
    for (int u = 0; u < 3; ++u) {
      const Potential& other = potential(u);
      if (is_power_law(other) && std::get<PowerLaw>(other.kind()).p == p) {
        const double c = std::get<PowerLaw>(other.kind()).c;
        weight += pair_multiplicity(u) * c;
        scale += pair_multiplicity(u) * std::abs(c);
      }
    }
    if (std::abs(weight) > 1e-12 * scale) {
      std::ostringstream msg;
      msg << "non-neutral non-tempered triple: power law with p = " << p
          << " <= 1 has net weight f11 + f22 + 2 f12 = " << weight;
      throw PreconditionError(msg.str());
    }
  }

  // Cells for kinds bounded by their decay envelope. The difference
  // evaluator relies on this tail being far below abs_tol.
  const double L = period_ * (1.0 - 1e-9);
  long M = 2;
  for (int t = 0; t < 3; ++t) {
    const Potential& pot = potential(t);
    if (!pot.is_zero() && !is_power_law(pot)) {
      const double start = std::max(pot.monotone_from(0), pot.monotone_from(1));
      M = std::max(M, static_cast<long>(std::ceil(start / L)) + 1);
    }
  }
  const double target = 1e-6 * tol_.abs_tol;
  const double n_d = static_cast<double>(n_);
  for (;; ++M) {
    if (M > kMaxCells || n_d * n_d * (2.0 * M + 1.0) > 4e9) {
      throw ConvergenceError("energy: tail not certifiable within the image-count cap");
    }
    double bound = 0.0;
    for (int t = 0; t < 3; ++t) {
      const Potential& pot = potential(t);
      if (pot.is_zero() || is_power_law(pot)) {
        continue;
      }
      // Per particle: (N/4) * multiplicity ordered pairs per base particle... summed over
      // both signs of m; the gradient needs the m-weighted first-derivative sum too.
      const double pairs = 0.25 * n_d * pair_multiplicity(t);
      bound += pairs * 2.0 * envelope_cell_sum(pot, 0, 0, L, M);
      bound += pairs * 2.0 * (2.0 * envelope_cell_sum(pot, 1, 0, L, M) +
                              envelope_cell_sum(pot, 1, 1, L, M));
    }
    if (bound <= target) {
      envelope_tail_ = bound;
      break;
    }
  }
  cells_ = M;

  for (int t = 0; t < 3; ++t) {
    const Potential& pot = potential(t);
    if (!is_power_law(pot)) {
      continue;
    }
    const auto& law = std::get<PowerLaw>(pot.kind());
    PowerTail& tail = power_[static_cast<std::size_t>(t)];
    tail.active = true;
    tail.c = law.c;
    tail.p = law.p;
    tail.drop_monopole = law.p <= 1.0;
    tail.z_even.resize(kMaxOrder);
    tail.z_odd.resize(kMaxOrder);
    for (int j = 0; j < kMaxOrder; ++j) {
      const double s_even = law.p + 2.0 * j;
      tail.z_even[static_cast<std::size_t>(j)] =
          s_even > 1.0 ? numerics::zeta_tail(s_even, M) : std::numeric_limits<double>::quiet_NaN();
      tail.z_odd[static_cast<std::size_t>(j)] = numerics::zeta_tail(law.p + 2.0 + 2.0 * j, M);
    }
  }
}

const Potential& ChainEnergy::potential(int type) const {
  switch (type) {
    case 0:
      return triple_.f11;
    case 1:
      return triple_.f22;
    default:
      return triple_.f12;
  }
}

void ChainEnergy::check(const Configuration& config) const {
  if (config.size() != n_) {
    throw PreconditionError("energy: configuration size does not match the evaluator");
  }
  if (std::abs(config.period() - period_) > 1e-9 * period_) {
    throw PreconditionError("energy: configuration density does not match the evaluator");
  }
  const double guard = 1e-12 * config.ell();
  for (double d : config.gaps()) {
    if (d < guard) {
      throw PreconditionError("energy: gap below 1e-12 * ell (collapsed pair)");
    }
  }
}

namespace {

struct PairMoments {
  // sum over ordered pairs of the type of t^{2j}, t = (x_k - x_n) / L
  std::array<std::array<double, kMaxOrder + 1>, 3> even{};
};

PairMoments pair_moments(const std::vector<double>& x, double L) {
  PairMoments m;
  const int n = static_cast<int>(x.size());
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const int type = pair_type(a, b);
      const double t = (x[static_cast<std::size_t>(b)] - x[static_cast<std::size_t>(a)]) / L;
      const double t2 = t * t;
      double pw = 1.0;
      auto& row = m.even[static_cast<std::size_t>(type)];
      for (int j = 0; j <= kMaxOrder; ++j) {
        row[static_cast<std::size_t>(j)] += pw;
        pw *= t2;
      }
    }
  }
  return m;
}

}  // namespace

EnergyReport ChainEnergy::energy(const Configuration& config) const {
  check(config);
  const std::vector<double> x = config.positions();
  numerics::CompensatedSum period_sum;
  for (double d : config.gaps()) {
    period_sum += d;
  }
  const double L = period_sum.value();
  const int n = n_;
  const long M = cells_;

  std::array<numerics::CompensatedSum, 3> by_type;
  for (long m = -M; m <= M; ++m) {
    const double shift = static_cast<double>(m) * L;
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        if (m == 0 && a == b) {
          continue;
        }
        const int type = pair_type(a, b);
        const Potential& pot = potential(type);
        if (pot.is_zero()) {
          continue;
        }
        by_type[static_cast<std::size_t>(type)] +=
            pot(x[static_cast<std::size_t>(b)] - x[static_cast<std::size_t>(a)] + shift);
      }
    }
  }

  double truncation = envelope_tail_;
  bool any_power = false;
  for (const auto& tail : power_) {
    any_power = any_power || tail.active;
  }
  if (any_power) {
    const PairMoments moments = pair_moments(x, L);
    const double damping = static_cast<double>((M + 1) * (M + 1));
    for (int t = 0; t < 3; ++t) {
      const PowerTail& tail = power_[static_cast<std::size_t>(t)];
      if (!tail.active) {
        continue;
      }
      const auto& mom = moments.even[static_cast<std::size_t>(t)];
      const double lp = std::pow(L, -tail.p);
      // Pick the smallest order whose remainder meets the share of abs_tol.
      int order = -1;
      double remainder = 0.0;
      for (int J = 1; J < kMaxOrder; ++J) {
        const double rho_bound = ratio_bound(tail.p, 2 * J);
        if (rho_bound >= damping) {
          continue;
        }
        remainder = 2.0 * std::abs(tail.c) * lp * binomial_weight(tail.p, 2 * J) *
                    tail.z_even[static_cast<std::size_t>(J)] * mom[static_cast<std::size_t>(J)] /
                    (1.0 - rho_bound / damping);
        if (remainder <= 0.05 * tol_.abs_tol * static_cast<double>(n)) {
          order = J;
          break;
        }
      }
      if (order < 0) {
        throw ConvergenceError("energy: multipole tail did not reach tolerance");
      }
      for (int j = tail.drop_monopole ? 1 : 0; j < order; ++j) {
        by_type[static_cast<std::size_t>(t)] +=
            2.0 * tail.c * lp * binomial_weight(tail.p, 2 * j) *
            tail.z_even[static_cast<std::size_t>(j)] * mom[static_cast<std::size_t>(j)];
      }
      truncation += remainder / static_cast<double>(n);
    }
  }

  const double inv_n = 1.0 / static_cast<double>(n);
  EnergyReport report;
  report.breakdown.f11 = by_type[0].value() * inv_n;
  report.breakdown.f22 = by_type[1].value() * inv_n;
  report.breakdown.f12 = by_type[2].value() * inv_n;
  numerics::CompensatedSum total;
  double magnitude = 0.0;
  for (const auto& s : by_type) {
    total += s.value();
    magnitude += s.magnitude();
  }
  report.energy = total.value() * inv_n;
  report.image_count = 2 * M + 1;
  report.tail_bound = truncation + 8.0 * kEps * magnitude * inv_n;
  return report;
}

GradientReport ChainEnergy::gradient(const Configuration& config) const {
  check(config);
  const std::vector<double> x = config.positions();
  numerics::CompensatedSum period_sum;
  for (double d : config.gaps()) {
    period_sum += d;
  }
  const double L = period_sum.value();
  const int n = n_;
  const long M = cells_;
  const auto un = static_cast<std::size_t>(n);

  // G[a][b] = sum_m f'(x_b - x_a + mL); H = sum over pairs and m of m f'(...).
  std::vector<numerics::CompensatedSum> G(un * un);
  numerics::CompensatedSum H;
  double noise = 0.0;
  for (long m = -M; m <= M; ++m) {
    const double shift = static_cast<double>(m) * L;
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        if (m == 0 && a == b) {
          continue;
        }
        const Potential& pot = potential(pair_type(a, b));
        if (pot.is_zero()) {
          continue;
        }
        const double r = x[static_cast<std::size_t>(b)] - x[static_cast<std::size_t>(a)] + shift;
        const double d1 = pot.eval(r, 1);
        G[static_cast<std::size_t>(a) * un + static_cast<std::size_t>(b)] += d1;
        H += static_cast<double>(m) * d1;
        noise += std::abs(d1) * (static_cast<double>(std::abs(m)) + 1.0 + L / std::abs(r));
      }
    }
  }

  double truncation = envelope_tail_;
  const PairMoments moments = pair_moments(x, L);
  const double damping = static_cast<double>((M + 1) * (M + 1));
  for (int t = 0; t < 3; ++t) {
    const PowerTail& tail = power_[static_cast<std::size_t>(t)];
    if (!tail.active) {
      continue;
    }
    const auto& mom = moments.even[static_cast<std::size_t>(t)];
    const double q = tail.p + 1.0;
    const double scale = 2.0 * tail.c * tail.p * std::pow(L, -q);
    int order = -1;
    double remainder = 0.0;
    for (int J = 1; J < kMaxOrder; ++J) {
      const double rho_even = ratio_bound(q, 2 * J);
      const double rho_odd = ratio_bound(q, 2 * J + 1);
      if (rho_even >= damping || rho_odd >= damping) {
        continue;
      }
      const double odd = binomial_weight(q, 2 * J + 1) * tail.z_odd[static_cast<std::size_t>(J)] /
                         (1.0 - rho_odd / damping);
      const double even = binomial_weight(q, 2 * J) * tail.z_even[static_cast<std::size_t>(J)] /
                          (1.0 - rho_even / damping);
      remainder = std::abs(scale) * (odd + even) * mom[static_cast<std::size_t>(J)];
      if (remainder <= 0.05 * tol_.abs_tol * static_cast<double>(n)) {
        order = J;
        break;
      }
    }
    if (order < 0) {
      throw ConvergenceError("gradient: multipole tail did not reach tolerance");
    }
    truncation += remainder / static_cast<double>(n);

    for (int j = tail.drop_monopole ? 1 : 0; j < order; ++j) {
      H += -scale * binomial_weight(q, 2 * j) * tail.z_even[static_cast<std::size_t>(j)] *
           mom[static_cast<std::size_t>(j)];
    }
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        if (pair_type(a, b) != t) {
          continue;
        }
        const double s = (x[static_cast<std::size_t>(b)] - x[static_cast<std::size_t>(a)]) / L;
        if (s == 0.0) {
          continue;
        }
        const double s2 = s * s;
        double pw = s;
        double acc = 0.0;
        for (int j = 0; j < order; ++j) {
          acc += binomial_weight(q, 2 * j + 1) * pw * tail.z_odd[static_cast<std::size_t>(j)];
          pw *= s2;
        }
        G[static_cast<std::size_t>(a) * un + static_cast<std::size_t>(b)] += scale * acc;
      }
    }
  }

  // dE/dd_i = (1/N) [sum_{b >= i} col_b - sum_{a >= i} row_a + H], i = 1..N.
  std::vector<double> col(un, 0.0);
  std::vector<double> row(un, 0.0);
  for (std::size_t a = 0; a < un; ++a) {
    for (std::size_t b = 0; b < un; ++b) {
      const double g = G[a * un + b].value();
      row[a] += g;
      col[b] += g;
    }
  }
  GradientReport out;
  out.gradient.assign(un, 0.0);
  const double h = H.value();
  double suffix = 0.0;  // sum_{j >= i} (col_j - row_j)
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = un; i-- > 0;) {
    // gradient index i corresponds to gap d_{i+1}, which moves x_j for j >= i + 1
    out.gradient[i] = (suffix + h) * inv_n;
    suffix += col[i] - row[i];
  }
  out.error_bound = truncation + 16.0 * kEps * noise * inv_n;
  return out;
}

double ChainEnergy::difference(const Configuration& from, const Configuration& to) const {
  check(from);
  check(to);
  const int n = n_;
  const auto un = static_cast<std::size_t>(n);
  const long M = cells_;
  const std::vector<double> x = from.positions();

  // Displacements accumulated from gap differences.
  std::vector<double> dx(un, 0.0);
  double acc = 0.0;
  numerics::CompensatedSum L_from;
  for (std::size_t j = 0; j < un; ++j) {
    dx[j] = acc;
    acc += to.gaps()[j] - from.gaps()[j];
    L_from += from.gaps()[j];
  }
  const double dL = acc;
  const double L = L_from.value();
  const double L_to = L + dL;

  numerics::CompensatedSum total;
  for (long m = -M; m <= M; ++m) {
    const auto mm = static_cast<double>(m);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        if (m == 0 && a == b) {
          continue;
        }
        const Potential& pot = potential(pair_type(a, b));
        if (pot.is_zero()) {
          continue;
        }
        const auto ua = static_cast<std::size_t>(a);
        const auto ub = static_cast<std::size_t>(b);
        const double r = x[ub] - x[ua] + mm * L;
        const double h = dx[ub] - dx[ua] + mm * dL;
        total += pot.delta(r, h);
      }
    }
  }

  for (int t = 0; t < 3; ++t) {
    const PowerTail& tail = power_[static_cast<std::size_t>(t)];
    if (!tail.active) {
      continue;
    }
    // Moments of the old configuration and exact moment differences via
    // D_j = t_new^2 D_{j-1} + t_old^{2(j-1)} (t_new^2 - t_old^2).
    std::array<double, kMaxOrder> mom_from{};
    std::array<double, kMaxOrder> mom_diff{};
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        if (pair_type(a, b) != t) {
          continue;
        }
        const auto ua = static_cast<std::size_t>(a);
        const auto ub = static_cast<std::size_t>(b);
        const double delta = x[ub] - x[ua];
        const double s_old = delta / L;
        const double ds = ((dx[ub] - dx[ua]) * L - delta * dL) / (L_to * L);
        const double s_new = s_old + ds;
        const double old2 = s_old * s_old;
        const double new2 = s_new * s_new;
        const double diff2 = ds * (s_new + s_old);
        double d = 0.0;
        double old_pow = 1.0;  // t_old^{2(j-1)}
        double old_pw = 1.0;   // t_old^{2j}
        for (int j = 0; j < kMaxOrder; ++j) {
          mom_from[static_cast<std::size_t>(j)] += old_pw;
          if (j > 0) {
            d = new2 * d + old_pow * diff2;
            old_pow *= old2;
          }
          mom_diff[static_cast<std::size_t>(j)] += d;
          old_pw *= old2;
        }
      }
    }
    const double lp = std::pow(L, -tail.p);
    const double lp_change = lp * std::expm1(-tail.p * std::log1p(dL / L));
    for (int j = tail.drop_monopole ? 1 : 0; j < kMaxOrder; ++j) {
      const auto uj = static_cast<std::size_t>(j);
      const double k = 2.0 * tail.c * binomial_weight(tail.p, 2 * j) * tail.z_even[uj];
      if (k == 0.0) {
        break;
      }
      total += k * (lp + lp_change) * mom_diff[uj];
      total += k * lp_change * mom_from[uj];
    }
  }
  return total.value() / static_cast<double>(n);
}

EnergyReport energy(const Configuration& config, const PotentialTriple& triple,
                    const Tolerance& tol) {
  return ChainEnergy(triple, config.size(), config.rho(), tol).energy(config);
}

std::vector<double> energy_gradient(const Configuration& config, const PotentialTriple& triple,
                                    const Tolerance& tol) {
  return ChainEnergy(triple, config.size(), config.rho(), tol).gradient(config).gradient;
}

}  // namespace altchain
