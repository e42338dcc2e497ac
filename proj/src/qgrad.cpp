#include "qoco/qgrad.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qoco/errors.hpp"

namespace qoco::qgrad {

namespace {

constexpr double kPi = std::numbers::pi;

// The c-bit fixed-point value the phase register holds: floor(F*2^c) mod 2^c.
// The small guard compensates the simulator's floating-point noise so that
// values an exact-arithmetic circuit would represent exactly quantize to the
// same integer here; it is far below the 2^-c truncation budget.
std::uint64_t quantize_fixed_point(double F, int c) {
  const double nc = std::ldexp(1.0, c);
  const double frac = F - std::floor(F);  // exact: operands within one binade
  const double guard = 1e-9 + std::fabs(F) * nc * 1e-13;
  const double v = frac * nc + guard;
  const std::uint64_t mask = (1ull << c) - 1;
  return static_cast<std::uint64_t>(std::floor(v)) & mask;
}

// exp(sign*2*pi*i*j/n) for j < n/2.
std::vector<std::complex<double>> fft_roots(std::size_t n, int sign) {
  std::vector<std::complex<double>> roots(n / 2);
  for (std::size_t j = 0; j < n / 2; ++j) {
    const double ang = sign * 2.0 * kPi * static_cast<double>(j) / static_cast<double>(n);
    roots[j] = {std::cos(ang), std::sin(ang)};
  }
  return roots;
}

// In-place radix-2 transform with kernel exp(sign*2*pi*i*m*u/N), N a power
// of two, twiddles from fft_roots(N, sign). Unnormalized; callers scale by
// 1/sqrt(N).
void fft_pow2(std::complex<double>* a, std::size_t n,
              const std::vector<std::complex<double>>& roots) {
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t step = n / len;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t j = 0; j < len / 2; ++j) {
        const std::complex<double> u = a[i + j];
        const std::complex<double> v = a[i + j + len / 2] * roots[j * step];
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
      }
    }
  }
}

void validate_params(const Params& prm) {
  if (prm.n < 1 || prm.b < 1 || prm.c < 1) {
    throw RuntimeFault("qgrad: params require n,b,c >= 1");
  }
  if (prm.b * prm.n > 62 || prm.c > 30) {
    throw RuntimeFault("qgrad: register widths out of representable range");
  }
  if (!(prm.r_prime > 0.0) || !(prm.lipschitz_g > 0.0)) {
    throw RuntimeFault("qgrad: r_prime and G must be positive");
  }
}

}  // namespace

double closed_form_b_bits(int n, double rho) {
  return std::log2(2.0 * n * (n + rho) / rho);
}

double closed_form_c_bits(int n, double rho) {
  return std::log2(16.0 * kPi * n / rho) - 1.0;
}

Params derive_params(int n, double lipschitz_g, double rho, double p, double r, double r_prime,
                     std::uint64_t memory_guard) {
  if (n < 1) throw RuntimeFault("derive_params: n must be >= 1");
  if (!(lipschitz_g > 0.0) || !(r > 0.0) || !(r_prime > 0.0)) {
    throw RuntimeFault("derive_params: G, r, r' must be positive");
  }
  if (!(rho > 0.0) || rho > 1.0 || !(p > 0.0) || p > 1.0) {
    throw RuntimeFault("derive_params: rho and p must lie in (0, 1]");
  }
  Params prm;
  prm.n = n;
  prm.lipschitz_g = lipschitz_g;
  prm.rho = rho;
  prm.p = p;
  prm.r = r;
  prm.r_prime = r_prime;
  prm.beta = n * lipschitz_g / (p * r);

  const double b_raw = std::log2(lipschitz_g * rho / (4.0 * kPi * n * n * prm.beta * r_prime));
  const int b = static_cast<int>(std::ceil(b_raw));
  if (b < 1) {
    throw RuntimeFault("derive_params: register width b = " + std::to_string(b) +
                       " (< 1); parameters give no resolution");
  }
  if (b * n > 62 || (1ull << (b * n)) > memory_guard) {
    std::ostringstream os;
    os << "derive_params: statevector would need 2^(" << b << "*" << n
       << ") amplitudes, exceeding the memory guard of " << memory_guard
       << " (computed b = " << b << ")";
    throw MemoryGuardError(os.str(), b);
  }
  prm.b = b;

  const double pow_b = std::ldexp(1.0, b);
  const double c_raw =
      std::log2(4.0 * lipschitz_g / (pow_b * n * prm.beta * r_prime)) - 1.0;
  const int c = static_cast<int>(std::ceil(c_raw));
  if (c < 1) {
    throw RuntimeFault("derive_params: phase register width c = " + std::to_string(c) +
                       " (< 1)");
  }
  if (c > 30) throw RuntimeFault("derive_params: phase register width c > 30 unsupported");
  prm.c = c;
  return prm;
}

double oracle_f_scaled(LossOracle& f, const Vec& z, const Params& prm,
                       const std::vector<std::uint32_t>& u, const double* cached_fz) {
  if (static_cast<int>(u.size()) != prm.n || static_cast<int>(z.size()) != prm.n) {
    throw DimensionMismatch("oracle_f_scaled: index tuple / point dimension mismatch");
  }
  const double pow_b = std::ldexp(1.0, prm.b);
  const double step = prm.r_prime / pow_b;
  const double half = pow_b / 2.0;
  // Same fp expression as the statevector sweep so both backends see
  // bit-identical grid points.
  Vec point(z.size());
  for (std::size_t j = 0; j < z.size(); ++j) {
    point[j] = (z[j] - step * half) + step * static_cast<double>(u[j]);
  }
  const double fz = cached_fz ? *cached_fz : f.eval(z);
  const double scale = pow_b / (2.0 * prm.lipschitz_g * prm.r_prime);
  return scale * (f.eval(point) - fz);
}

double PhaseState::l2_norm() const {
  double s = 0.0;
  for (const auto& a : amp) s += std::norm(a);
  return std::sqrt(s);
}

PhaseState build_phase_state(LossOracle& f, const Vec& z, const Params& prm) {
  validate_params(prm);
  if (static_cast<int>(z.size()) != prm.n) {
    throw DimensionMismatch("build_phase_state: z dimension mismatch");
  }
  const std::uint64_t count = prm.amplitude_count();
  const std::uint32_t nb = static_cast<std::uint32_t>(prm.grid_points_per_axis());
  const std::uint64_t nc = 1ull << prm.c;
  const double pow_b = std::ldexp(1.0, prm.b);
  const double step = prm.r_prime / pow_b;
  const double half = pow_b / 2.0;

  // Whole query grid lives in [z - r'/2, z + r'/2); check it against the
  // oracle's domain once up front.
  {
    Vec lo(z.size()), hi(z.size());
    for (std::size_t j = 0; j < z.size(); ++j) {
      lo[j] = z[j] - step * half;
      hi[j] = z[j] + step * (static_cast<double>(nb - 1) - half);
    }
    f.check_box(lo, hi);
  }

  const double fz = f.eval(z);
  const double scale = pow_b / (2.0 * prm.lipschitz_g * prm.r_prime);
  const double amp_mag = 1.0 / std::sqrt(static_cast<double>(count));

  // exp(2*pi*i*k/2^c), premultiplied by the uniform magnitude.
  std::vector<std::complex<double>> table(nc);
  for (std::uint64_t k = 0; k < nc; ++k) {
    const double ang = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(nc);
    table[k] = amp_mag * std::complex<double>(std::cos(ang), std::sin(ang));
  }

  PhaseState st;
  st.n = prm.n;
  st.b = prm.b;
  st.amp.resize(count);

  std::vector<std::uint32_t> u(prm.n, 0);
  Vec base(z.size()), point(z.size());
  for (std::size_t j = 0; j < z.size(); ++j) {
    base[j] = z[j] - step * half;
    point[j] = base[j];
  }
  for (std::uint64_t idx = 0; idx < count; ++idx) {
    const double F = scale * (f.eval_prechecked(point) - fz);
    st.amp[idx] = table[quantize_fixed_point(F, prm.c)];
    // Odometer: last coordinate fastest (u_1 is the slowest axis).
    for (int j = prm.n - 1; j >= 0; --j) {
      if (++u[j] < nb) {
        point[j] = base[j] + step * static_cast<double>(u[j]);
        break;
      }
      u[j] = 0;
      point[j] = base[j];
    }
  }
  return st;
}

PhaseState naive_circuit_state(LossOracle& f, const Vec& z, const Params& prm) {
  validate_params(prm);
  if (prm.n * prm.b + 2 * prm.c > 20) {
    throw RuntimeFault("naive_circuit_state: n*b + 2c > 20; brute-force backend refuses");
  }
  const std::uint64_t nu = prm.amplitude_count();
  const std::uint64_t nc = 1ull << prm.c;
  const std::uint32_t nb = static_cast<std::uint32_t>(prm.grid_points_per_axis());

  // Oracle values for every grid tuple, f(z) cached once.
  const double fz = f.eval(z);
  std::vector<std::uint64_t> k_of_u(nu);
  {
    std::vector<std::uint32_t> u(prm.n, 0);
    for (std::uint64_t idx = 0; idx < nu; ++idx) {
      const double F = oracle_f_scaled(f, z, prm, u, &fz);
      k_of_u[idx] = quantize_fixed_point(F, prm.c);
      for (int j = prm.n - 1; j >= 0; --j) {
        if (++u[j] < nb) break;
        u[j] = 0;
      }
    }
  }

  // Kickback register |y0>: the Fourier eigenstate of modular addition with
  // phases exp(-2*pi*i*a/2^c); adding k then kicks exp(+2*pi*i*k/2^c). The
  // value register starts at |0>.
  std::vector<std::complex<double>> y0(nc);
  for (std::uint64_t a = 0; a < nc; ++a) {
    const double ang = -2.0 * kPi * static_cast<double>(a) / static_cast<double>(nc);
    y0[a] = std::complex<double>(std::cos(ang), std::sin(ang)) /
            std::sqrt(static_cast<double>(nc));
  }

  const auto at = [nc](std::uint64_t u, std::uint64_t o, std::uint64_t a) {
    return (u * nc + o) * nc + a;
  };

  // After the Hadamards on the coordinate registers.
  std::vector<std::complex<double>> psi(nu * nc * nc, {0.0, 0.0});
  const double amp0 = 1.0 / std::sqrt(static_cast<double>(nu));
  for (std::uint64_t u = 0; u < nu; ++u) {
    for (std::uint64_t a = 0; a < nc; ++a) psi[at(u, 0, a)] = amp0 * y0[a];
  }

  std::vector<std::complex<double>> next(psi.size());

  // Q_F: value register o -> o + k(u) mod 2^c.
  auto apply_qf = [&](std::int64_t direction) {
    std::fill(next.begin(), next.end(), std::complex<double>(0.0, 0.0));
    for (std::uint64_t u = 0; u < nu; ++u) {
      const std::uint64_t k = k_of_u[u];
      for (std::uint64_t o = 0; o < nc; ++o) {
        const std::uint64_t o2 =
            (o + ((direction > 0) ? k : (nc - k))) & (nc - 1);
        for (std::uint64_t a = 0; a < nc; ++a) next[at(u, o2, a)] = psi[at(u, o, a)];
      }
    }
    psi.swap(next);
  };

  apply_qf(+1);

  // Addition modulo 2^c from the value register into the kickback register.
  std::fill(next.begin(), next.end(), std::complex<double>(0.0, 0.0));
  for (std::uint64_t u = 0; u < nu; ++u) {
    for (std::uint64_t o = 0; o < nc; ++o) {
      for (std::uint64_t a = 0; a < nc; ++a) {
        next[at(u, o, (a + o) & (nc - 1))] = psi[at(u, o, a)];
      }
    }
  }
  psi.swap(next);

  apply_qf(-1);  // uncompute

  // The ancillas must have disentangled: psi == phi (x) |0> (x) |y0>.
  PhaseState st;
  st.n = prm.n;
  st.b = prm.b;
  st.amp.resize(nu);
  for (std::uint64_t u = 0; u < nu; ++u) {
    std::complex<double> phi(0.0, 0.0);
    for (std::uint64_t a = 0; a < nc; ++a) phi += psi[at(u, 0, a)] * std::conj(y0[a]);
    st.amp[u] = phi;
  }
  double residual = 0.0;
  for (std::uint64_t u = 0; u < nu; ++u) {
    for (std::uint64_t o = 0; o < nc; ++o) {
      for (std::uint64_t a = 0; a < nc; ++a) {
        const std::complex<double> expect =
            (o == 0) ? st.amp[u] * y0[a] : std::complex<double>(0.0, 0.0);
        residual += std::norm(psi[at(u, o, a)] - expect);
      }
    }
  }
  if (residual > 1e-18) {
    throw RuntimeFault("naive_circuit_state: ancilla registers failed to disentangle");
  }
  return st;
}

double fidelity(const PhaseState& a, const PhaseState& b) {
  if (a.amp.size() != b.amp.size()) {
    throw DimensionMismatch("fidelity: state shapes differ");
  }
  std::complex<double> ip(0.0, 0.0);
  for (std::size_t i = 0; i < a.amp.size(); ++i) ip += std::conj(a.amp[i]) * b.amp[i];
  return std::abs(ip);
}

void qft_all_axes(PhaseState& state, int sign) {
  const std::size_t nb = 1ull << state.b;
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(nb));
  // Lines along a high axis sit far apart (stride = nb^k); gathering a
  // batch of adjacent lines per pass keeps each touched cache line fully
  // used instead of pulling one element from it.
  const std::size_t batch_max = 16;
  std::vector<std::complex<double>> scratch(nb * batch_max);
  const std::vector<std::complex<double>> roots = fft_roots(nb, sign);
  for (int axis = 0; axis < state.n; ++axis) {
    const std::size_t stride = 1ull << (static_cast<unsigned>(state.b) * (state.n - 1 - axis));
    const std::size_t block = stride * nb;
    for (std::size_t base = 0; base < state.amp.size(); base += block) {
      for (std::size_t off0 = 0; off0 < stride; off0 += batch_max) {
        const std::size_t batch = std::min(batch_max, stride - off0);
        for (std::size_t k = 0; k < nb; ++k) {
          const std::complex<double>* src = &state.amp[base + off0 + k * stride];
          for (std::size_t j = 0; j < batch; ++j) scratch[j * nb + k] = src[j];
        }
        for (std::size_t j = 0; j < batch; ++j) fft_pow2(&scratch[j * nb], nb, roots);
        for (std::size_t k = 0; k < nb; ++k) {
          std::complex<double>* dst = &state.amp[base + off0 + k * stride];
          for (std::size_t j = 0; j < batch; ++j) dst[j] = scratch[j * nb + k] * inv_sqrt;
        }
      }
    }
  }
}

Measurement measure(const PhaseState& state, Rng& rng) {
  std::vector<double> prob(state.amp.size());
  for (std::size_t i = 0; i < prob.size(); ++i) prob[i] = std::norm(state.amp[i]);
  const std::size_t idx = rng.sample_cdf(prob);
  Measurement m;
  m.outcomes.resize(state.n);
  const std::uint64_t mask = (1ull << state.b) - 1;
  for (int j = 0; j < state.n; ++j) {
    const unsigned shift = static_cast<unsigned>(state.b) * (state.n - 1 - j);
    m.outcomes[j] = static_cast<std::uint32_t>((idx >> shift) & mask);
  }
  return m;
}

Vec decode(const Measurement& m, const Params& prm) {
  if (static_cast<int>(m.outcomes.size()) != prm.n) {
    throw DimensionMismatch("decode: measurement dimension mismatch");
  }
  const std::int64_t nb = 1ll << prm.b;
  const double cell = 2.0 * prm.lipschitz_g / static_cast<double>(nb);
  Vec grad(m.outcomes.size());
  for (std::size_t j = 0; j < m.outcomes.size(); ++j) {
    std::int64_t w =
        (static_cast<std::int64_t>(m.outcomes[j]) - static_cast<std::int64_t>(kZeroOutcome)) %
        nb;
    if (w < 0) w += nb;
    if (w >= nb / 2) w -= nb;  // signed window around the zero outcome
    grad[j] = cell * static_cast<double>(w);
  }
  return grad;
}

GradEstimate estimate_gradient_q(LossOracle& f, const Vec& x, double r, double r_prime,
                                 double rho, double p, Rng& rng, std::uint64_t memory_guard) {
  const Params prm = derive_params(static_cast<int>(x.size()), f.lipschitz(), rho, p, r,
                                   r_prime, memory_guard);
  GradEstimate est;
  est.z = sample_linf_ball(x, r, rng);
  const std::uint64_t before = f.queries();
  PhaseState st = build_phase_state(f, est.z, prm);
  inverse_qft_all(st);
  const Measurement m = measure(st, rng);
  est.grad = decode(m, prm);
  est.queries = 4;  // Q_f twice inside Q_F, twice inside Q_F^{-1}
  est.sim_evals = f.queries() - before;
  est.params = prm;
  return est;
}

bool calibrate_linear_exactness(int n, int b, std::uint64_t seed, bool flip_transform_sign) {
  const double lipschitz_g = 1.0;
  Params prm;
  prm.n = n;
  prm.lipschitz_g = lipschitz_g;
  prm.rho = 0.5;
  prm.p = 0.5;
  prm.r = 0.5;
  prm.r_prime = 0.37;  // cancels exactly for linear losses
  prm.beta = n * lipschitz_g / (prm.p * prm.r);
  prm.b = b;
  prm.c = b + 2;  // enough fractional bits to hold on-grid phases exactly

  Rng rng(seed);
  const std::int64_t nb = 1ll << b;
  const double cell = 2.0 * lipschitz_g / static_cast<double>(nb);
  Vec x(n);
  for (int j = 0; j < n; ++j) x[j] = rng.uniform(-1.0, 1.0);

  // All grid slopes for n = 1; random on-grid tuples otherwise.
  const int cases = (n == 1) ? static_cast<int>(nb) : 64;
  for (int case_idx = 0; case_idx < cases; ++case_idx) {
    Vec slope(n);
    if (n == 1) {
      slope[0] = cell * static_cast<double>(case_idx - nb / 2);
    } else {
      for (int j = 0; j < n; ++j) {
        const std::int64_t k =
            static_cast<std::int64_t>(rng.next_u64() % static_cast<std::uint64_t>(nb)) - nb / 2;
        slope[j] = cell * static_cast<double>(k);
      }
    }
    bool all_zero = true;
    for (double s : slope) all_zero = all_zero && s == 0.0;
    // The zero slope (constant loss, the zero-outcome anchor) cannot go
    // through make_linear, which requires a positive Lipschitz constant.
    const double offset = rng.uniform(-1.0, 1.0);
    LossOracle f =
        all_zero ? LossOracle([offset](const Vec&) { return offset; },
                              [n](const Vec&) { return Vec(n, 0.0); }, 1.0, 0.0)
                 : make_linear(slope, offset);
    const Vec z = sample_linf_ball(x, prm.r, rng);
    PhaseState st = build_phase_state(f, z, prm);
    qft_all_axes(st, flip_transform_sign ? -kTransformSign : kTransformSign);
    const Measurement m = measure(st, rng);
    const Vec grad = decode(m, prm);
    for (int j = 0; j < n; ++j) {
      if (grad[j] != slope[j]) return false;
    }
  }
  return true;
}

}  // namespace qoco::qgrad
