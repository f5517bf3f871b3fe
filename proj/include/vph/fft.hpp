#pragma once
#include <complex>
#include <cstddef>
#include <map>
#include <vector>

#include <fftw3.h>

namespace vph {

// Thin cache over fftw_plan_many_dft. Plans are created with
// FFTW_ESTIMATE|FFTW_UNALIGNED so results are reproducible run-to-run and the
// same plan can execute on any buffer. All transforms here are unnormalized;
// callers apply the unitary 1/sqrt(N) factors.
class FftEngine {
  public:
    static FftEngine& instance() {
        static FftEngine e;
        return e;
    }

    // Transform the leading axes (row-major dims), batched over `trailing`
    // contiguous trailing entries: data[lead * trailing + trail].
    void dft_leading(std::complex<double>* data, const std::vector<int>& dims,
                     std::size_t trailing, int sign) {
        execute(data, dims, trailing, /*stride*/ std::ptrdiff_t(trailing), /*dist*/ 1,
                std::size_t(trailing), sign);
    }

    // Transform the trailing axes, batched over `leading` blocks:
    // data[lead * prod(dims) + trail].
    void dft_trailing(std::complex<double>* data, std::size_t leading,
                      const std::vector<int>& dims, int sign) {
        std::size_t block = 1;
        for (int d : dims) block *= std::size_t(d);
        execute(data, dims, leading, /*stride*/ 1, /*dist*/ std::ptrdiff_t(block),
                std::size_t(leading), sign);
    }

    // Full transform of a contiguous row-major array.
    void dft_all(std::complex<double>* data, const std::vector<int>& dims, int sign) {
        execute(data, dims, 1, 1, 1, 1, sign);
    }

    FftEngine(const FftEngine&) = delete;
    FftEngine& operator=(const FftEngine&) = delete;

  private:
    FftEngine() = default;
    ~FftEngine() {
        for (auto& [k, p] : plans_) fftw_destroy_plan(p);
    }

    using Key = std::tuple<std::vector<int>, std::size_t, std::ptrdiff_t, std::ptrdiff_t, int>;
    std::map<Key, fftw_plan> plans_;

    void execute(std::complex<double>* data, const std::vector<int>& dims,
                 std::size_t howmany, std::ptrdiff_t stride, std::ptrdiff_t dist,
                 std::size_t, int sign) {
        Key key{dims, howmany, stride, dist, sign};
        auto it = plans_.find(key);
        fftw_complex* ptr = reinterpret_cast<fftw_complex*>(data);
        if (it == plans_.end()) {
            fftw_plan p = fftw_plan_many_dft(
                int(dims.size()), dims.data(), int(howmany), ptr, nullptr, int(stride),
                int(dist), ptr, nullptr, int(stride), int(dist), sign,
                FFTW_ESTIMATE | FFTW_UNALIGNED);
            it = plans_.emplace(std::move(key), p).first;
        }
        fftw_execute_dft(it->second, ptr, ptr);
    }
};

} // namespace vph
