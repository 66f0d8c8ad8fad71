#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace miwave {

/// Fourier-series coefficients c_m, m = -order_bound..order_bound, of one period of a
/// function sampled at t_n = -T/2 + n T/N, n = 0..N-1:
///   c_m = (1/N) sum_n x_n exp(-j 2 pi m t_n / T).
/// Requires N > 2 * order_bound. Returned vector is indexed by m + order_bound.
std::vector<std::complex<double>> periodic_coefficients(std::span<const std::complex<double>> samples,
                                                        int order_bound);

/// Smallest power of two >= n.
std::size_t next_pow2(std::size_t n);

}  // namespace miwave
