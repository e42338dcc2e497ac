#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "qoco/geometry.hpp"
#include "qoco/losses.hpp"
#include "qoco/rng.hpp"

namespace qoco::qgrad {

inline constexpr std::uint64_t kDefaultMemoryGuard = 1ull << 26;

// Convention constants of the simulator, fixed once by the linear-exactness
// calibration (`qoco calibrate` re-derives and asserts them):
//   - the kickback register is prepared in the Fourier eigenstate whose
//     phases are exp(-2*pi*i*a/2^c), so modular addition of the oracle value
//     kicks the phase +2*pi*F~(u);
//   - the per-axis transform uses the kernel exp(kTransformSign*2*pi*i*m*u/2^b);
//   - with both, the outcome peak for gradient component g sits at
//     m = 2^b*g/(2G) mod 2^b, i.e. the zero-gradient outcome is kZeroOutcome
//     and decode reads m through a signed window of width 2^b around it.
inline constexpr int kTransformSign = -1;
inline constexpr std::uint32_t kZeroOutcome = 0;

// All circuit parameters of one gradient estimation.
struct Params {
  int n = 0;             // dimension
  double lipschitz_g = 0.0;
  double rho = 0.0;      // phase-estimation failure budget
  double p = 0.0;        // smoothness-surrogate failure budget
  double r = 0.0;        // sampling radius of z
  double r_prime = 0.0;  // query grid half-extent scale
  double beta = 0.0;     // nG/(p*r), the smoothness surrogate
  int b = 0;             // qubits per coordinate register
  int c = 0;             // fractional bits of the phase register

  std::uint64_t grid_points_per_axis() const { return 1ull << b; }
  std::uint64_t amplitude_count() const { return 1ull << (static_cast<unsigned>(b) * n); }
};

// Register widths from the circuit formulas:
//   beta = n*G/(p*r)
//   b = ceil(log2(G*rho / (4*pi*n^2*beta*r')))
//   c = ceil(log2(4*G / (2^b*n*beta*r')) - 1)
// b, c are rounded up (extra bits only add precision). Throws
// MemoryGuardError when 2^(b*n) would exceed memory_guard, RuntimeFault on
// invalid inputs or non-positive register widths.
Params derive_params(int n, double lipschitz_g, double rho, double p, double r, double r_prime,
                     std::uint64_t memory_guard = kDefaultMemoryGuard);

// Closed forms the widths collapse to when r, r' follow the literal
// general-convex schedule: b -> log2(2n(n+rho)/rho), c -> log2(16*pi*n/rho)-1.
double closed_form_b_bits(int n, double rho);
double closed_form_c_bits(int n, double rho);

// F(u) = 2^b/(2*G*r') * [f(z + (r'/2^b)(u - 2^(b-1)*1)) - f(z)].
// If cached_fz is null, f(z) is evaluated too (2 counted queries per call);
// the full estimator caches f(z) once per invocation.
double oracle_f_scaled(LossOracle& f, const Vec& z, const Params& prm,
                       const std::vector<std::uint32_t>& u, const double* cached_fz = nullptr);

// Joint state of the n coordinate registers: 2^(b*n) amplitudes indexed by
// (u_1,...,u_n), u_1 slowest (row-major).
struct PhaseState {
  int n = 0;
  int b = 0;
  std::vector<std::complex<double>> amp;

  double l2_norm() const;
};

// Fast backend. The oracle call, kickback addition and inverse oracle act on
// the coordinate registers as the pure phase exp(2*pi*i*F~(u)), where F~ is
// F truncated to c fractional bits (the value the phase register actually
// holds under modulo-2^c addition). Costs 2^(b*n)+1 value evaluations.
PhaseState build_phase_state(LossOracle& f, const Vec& z, const Params& prm);

// Gate-level oracle backend: explicit n b-qubit registers plus the two
// c-qubit ancillas, stepping Hadamards, Q_F, modular addition, Q_F^{-1} and
// verifying that the ancillas disentangle, then reducing to the coordinate
// registers. Brute-force scale only: requires n*b + 2c <= 20.
PhaseState naive_circuit_state(LossOracle& f, const Vec& z, const Params& prm);

// |<a|b>| of two equal-shape states (1.0 = equal up to global phase).
double fidelity(const PhaseState& a, const PhaseState& b);

// Applies the 2^b-point transform with kernel
// (1/sqrt(2^b))*exp(sign*2*pi*i*m*u/2^b) independently along each axis.
// Exposed with an explicit sign for unitarity tests and the calibration
// negative control; the circuit uses kTransformSign.
void qft_all_axes(PhaseState& state, int sign);
inline void inverse_qft_all(PhaseState& state) { qft_all_axes(state, kTransformSign); }

struct Measurement {
  std::vector<std::uint32_t> outcomes;  // m_1..m_n, each in [0, 2^b)
};

// Samples the outcome tuple from |amplitudes|^2 with a single uniform draw
// and a sequential CDF walk over the flattened array (deterministic given
// the seed, independent of how the amplitudes were produced).
Measurement measure(const PhaseState& state, Rng& rng);

// Gradient estimate (2G/2^b) * w_i, where w_i is m_i mapped into the signed
// window of width 2^b centered at kZeroOutcome.
Vec decode(const Measurement& m, const Params& prm);

struct GradEstimate {
  Vec z;                        // sample point in B_inf(x, r)
  Vec grad;                     // decoded gradient estimate
  int queries = 0;              // circuit-level oracle queries (always 4)
  std::uint64_t sim_evals = 0;  // classical simulation cost: 2^(b*n)+1
  Params params;                // the round's derived circuit parameters
};

// Algorithm steps 4-12: sample z, build the phase state, transform, measure,
// decode. The circuit consumes the oracle twice inside Q_F and twice inside
// Q_F^{-1}, so queries = 4 regardless of n; the 2^(b*n)+1 value evaluations
// the simulation performs are reported separately and must never be
// conflated with the query count.
GradEstimate estimate_gradient_q(LossOracle& f, const Vec& x, double r, double r_prime,
                                 double rho, double p, Rng& rng,
                                 std::uint64_t memory_guard = kDefaultMemoryGuard);

// Linear-exactness calibration: for every on-grid slope k*2G/2^b at the
// given width b, the full pipeline must return the slope exactly. Returns
// false if any slope fails. flip_transform_sign is the negative-control
// hook used by `calibrate`.
bool calibrate_linear_exactness(int n, int b, std::uint64_t seed,
                                bool flip_transform_sign = false);

}  // namespace qoco::qgrad
