#pragma once

#include <complex>
#include <map>
#include <mutex>
#include <vector>

#include <fftw3.h>

namespace dnls::detail {

// Per-size plan cache. Plans are created with FFTW_UNALIGNED so they can be
// executed on any caller buffer via fftw_execute_dft (which is thread safe);
// only plan creation is serialized.
class FftPlans {
public:
    static FftPlans& instance() {
        static FftPlans p;
        return p;
    }

    void forward(std::vector<std::complex<double>>& data) { run(data, FFTW_FORWARD); }
    void backward(std::vector<std::complex<double>>& data) {
        run(data, FFTW_BACKWARD);
        const double inv = 1.0 / double(data.size());
        for (auto& z : data) z *= inv;
    }

private:
    struct Pair {
        fftw_plan fwd = nullptr;
        fftw_plan bwd = nullptr;
    };

    std::mutex mtx_;
    std::map<int, Pair> plans_;

    Pair& get(int n) {
        std::lock_guard<std::mutex> lock(mtx_);
        auto it = plans_.find(n);
        if (it != plans_.end()) return it->second;
        std::vector<std::complex<double>> scratch(n);
        auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
        Pair pair;
        pair.fwd = fftw_plan_dft_1d(n, p, p, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
        pair.bwd = fftw_plan_dft_1d(n, p, p, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
        return plans_.emplace(n, pair).first->second;
    }

    void run(std::vector<std::complex<double>>& data, int sign) {
        Pair& pr = get(int(data.size()));
        auto* p = reinterpret_cast<fftw_complex*>(data.data());
        fftw_execute_dft(sign == FFTW_FORWARD ? pr.fwd : pr.bwd, p, p);
    }
};

} // namespace dnls::detail
