#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

namespace alphamod::detail {

namespace {

struct PlanCache {
  std::mutex mutex;
  std::map<std::tuple<int, std::size_t, int>, fftw_plan> plans;

  ~PlanCache() {
    for (auto& [key, plan] : plans) fftw_destroy_plan(plan);
  }

  fftw_plan get(int d, std::size_t n, int sign) {
    std::lock_guard lock(mutex);
    const auto key = std::make_tuple(d, n, sign);
    if (auto it = plans.find(key); it != plans.end()) return it->second;
    int dims[3];
    std::size_t total = 1;
    for (int a = 0; a < d; ++a) {
      dims[a] = static_cast<int>(n);
      total *= n;
    }
    std::vector<std::complex<double>> a(total), b(total);
    fftw_plan plan = fftw_plan_dft(d, dims, reinterpret_cast<fftw_complex*>(a.data()),
                                   reinterpret_cast<fftw_complex*>(b.data()),
                                   sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans.emplace(key, plan);
    return plan;
  }
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

}  // namespace

void dft(int d, std::size_t n, int sign, const std::complex<double>* in, std::complex<double>* out) {
  fftw_plan plan = cache().get(d, n, sign);
  // The plan is out of place, so the input is never written.
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

}  // namespace alphamod::detail
