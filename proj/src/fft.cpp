#include "mimo/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace mimo {

namespace {

class PlanCache {
public:
    ~PlanCache() {
        for (auto& [n, plan] : plans_) fftw_destroy_plan(plan);
    }

    fftw_plan get(std::size_t n) {
        std::lock_guard lock(mutex_);
        if (auto it = plans_.find(n); it != plans_.end()) return it->second;
        std::vector<std::complex<double>> a(n), b(n);
        fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(a.data()),
                                          reinterpret_cast<fftw_complex*>(b.data()), FFTW_FORWARD,
                                          FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (plan == nullptr) throw std::runtime_error("FFTW plan creation failed");
        plans_.emplace(n, plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<std::size_t, fftw_plan> plans_;
};

PlanCache& cache() {
    static PlanCache instance;
    return instance;
}

}  // namespace

void forward_dft(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) {
    if (in.size() != out.size()) throw std::invalid_argument("forward_dft: size mismatch");
    if (in.empty()) return;
    fftw_plan plan = cache().get(in.size());
    if (in.data() == out.data()) {
        std::vector<std::complex<double>> copy(in.begin(), in.end());
        fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(copy.data()),
                         reinterpret_cast<fftw_complex*>(out.data()));
        return;
    }
    // new-array execute never writes to its input for out-of-place plans
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in.data())),
                     reinterpret_cast<fftw_complex*>(out.data()));
}

}  // namespace mimo
