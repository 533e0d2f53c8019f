#include "jcas/dft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace jcas {

namespace {

// FFTW planning is not thread-safe; execution with fftw_execute_dft is.
// Plans are made FFTW_UNALIGNED so any std::vector buffer can be used and
// FFTW_ESTIMATE so the chosen algorithm (and hence the rounding) never
// depends on timing.
class PlanCache {
public:
    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    fftw_plan get(std::size_t n, int sign) {
        std::lock_guard lock(mutex_);
        auto key = std::make_pair(n, sign);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;
        cvec in(n), out(n);
        fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n),
                                          reinterpret_cast<fftw_complex*>(in.data()),
                                          reinterpret_cast<fftw_complex*>(out.data()), sign,
                                          FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (plan == nullptr) throw std::runtime_error("fftw: planning failed");
        plans_.emplace(key, plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
    static PlanCache cache;
    return cache;
}

cvec transform(std::span<const cplx> v, int sign) {
    if (v.empty()) throw std::invalid_argument("dft: zero-length input");
    const std::size_t n = v.size();
    cvec in(v.begin(), v.end());
    cvec out(n);
    fftw_execute_dft(plan_cache().get(n, sign), reinterpret_cast<fftw_complex*>(in.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (auto& x : out) x *= scale;
    return out;
}

}  // namespace

cvec unitary_dft(std::span<const cplx> v) { return transform(v, FFTW_FORWARD); }

cvec unitary_idft(std::span<const cplx> v) { return transform(v, FFTW_BACKWARD); }

double energy(const cvec& v) {
    double e = 0.0;
    for (const auto& x : v) e += std::norm(x);
    return e;
}

}  // namespace jcas
