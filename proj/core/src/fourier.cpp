#include "miwave/fourier.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>

#include "miwave/errors.hpp"

namespace miwave {

namespace {

struct PlanDeleter {
  void operator()(fftw_plan_s* plan) const { fftw_destroy_plan(plan); }
};
using Plan = std::unique_ptr<fftw_plan_s, PlanDeleter>;

// FFTW planning is not thread-safe; execution of an existing plan on new arrays is.
class PlanCache {
 public:
  fftw_plan forward(int n) {
    std::lock_guard lock(mutex_);
    auto it = plans_.find(n);
    if (it != plans_.end()) return it->second.get();
    std::vector<std::complex<double>> scratch(static_cast<std::size_t>(n));
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    Plan plan(fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED));
    if (!plan) throw std::runtime_error("FFTW failed to create a plan");
    return plans_.emplace(n, std::move(plan)).first->second.get();
  }

 private:
  std::mutex mutex_;
  std::map<int, Plan> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

}  // namespace

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

std::vector<std::complex<double>> periodic_coefficients(std::span<const std::complex<double>> samples,
                                                        int order_bound) {
  const auto n = samples.size();
  if (order_bound < 0) throw InvalidArgument("periodic_coefficients: negative order bound");
  if (n <= static_cast<std::size_t>(2 * order_bound)) {
    throw InvalidArgument("periodic_coefficients: need more than 2*order_bound samples");
  }
  std::vector<std::complex<double>> spectrum(samples.begin(), samples.end());
  auto* buf = reinterpret_cast<fftw_complex*>(spectrum.data());
  fftw_execute_dft(plan_cache().forward(static_cast<int>(n)), buf, buf);

  // t_n starts at -T/2, contributing exp(j pi m) = (-1)^m relative to the plain DFT.
  const double scale = 1.0 / static_cast<double>(n);
  std::vector<std::complex<double>> coeffs(static_cast<std::size_t>(2 * order_bound + 1));
  for (int m = -order_bound; m <= order_bound; ++m) {
    const auto k = static_cast<std::size_t>((m % static_cast<long>(n) + static_cast<long>(n)) %
                                            static_cast<long>(n));
    const double sign = (m % 2 == 0) ? scale : -scale;
    coeffs[static_cast<std::size_t>(m + order_bound)] = sign * spectrum[k];
  }
  return coeffs;
}

}  // namespace miwave
