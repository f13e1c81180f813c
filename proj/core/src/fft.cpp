#include "mmsync/fft.hpp"

#include <algorithm>
#include <map>
#include <mutex>

#include <fftw3.h>

#include "mmsync/errors.hpp"

namespace mmsync {

namespace {

// FFTW planning is not thread-safe, execution with the new-array interface is.
class PlanCache {
public:
    ~PlanCache() {
        for (auto& [size, plan] : plans_) fftw_destroy_plan(plan);
    }

    fftw_plan forward(std::size_t size) {
        std::lock_guard lock(mutex_);
        if (auto it = plans_.find(size); it != plans_.end()) return it->second;
        const int n = static_cast<int>(size);
        fftw_complex* scratch = fftw_alloc_complex(size);
        fftw_plan plan = fftw_plan_dft_1d(n, scratch, scratch, FFTW_FORWARD,
                                          FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(scratch);
        plans_.emplace(size, plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<std::size_t, fftw_plan> plans_;
};

PlanCache& plan_cache() {
    static PlanCache cache;
    return cache;
}

}  // namespace

std::vector<std::complex<double>> fft_zero_padded(std::span<const std::complex<double>> x,
                                                  std::size_t size) {
    if (size < x.size()) throw DimensionMismatch("FFT size is shorter than the input");
    if (size == 0) return {};
    std::vector<std::complex<double>> buffer(size);
    std::copy(x.begin(), x.end(), buffer.begin());
    fftw_plan plan = plan_cache().forward(size);
    // std::complex<double> is layout-compatible with fftw_complex.
    auto* io = reinterpret_cast<fftw_complex*>(buffer.data());
    fftw_execute_dft(plan, io, io);
    return buffer;
}

}  // namespace mmsync
