#include "nlslab/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace nlslab::detail {

namespace {

std::mutex plan_mutex;
std::map<std::tuple<int, int, int>, fftw_plan> plan_cache;

fftw_plan get_plan(const GridSpec& spec, int sign) {
    const auto key = std::make_tuple(spec.dim, spec.points, sign);
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto it = plan_cache.find(key);
    if (it != plan_cache.end()) return it->second;
    // Plan on a scratch buffer; FFTW_UNALIGNED lets the plan run on any
    // caller array via fftw_execute_dft.
    std::vector<cplx> scratch(spec.size());
    int n[3] = {spec.points, spec.points, spec.points};
    fftw_plan p = fftw_plan_dft(
        spec.dim, n, reinterpret_cast<fftw_complex*>(scratch.data()),
        reinterpret_cast<fftw_complex*>(scratch.data()), sign,
        FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!p) throw std::runtime_error("fftw plan creation failed");
    plan_cache.emplace(key, p);
    return p;
}

} // namespace

void dft(std::vector<cplx>& data, const GridSpec& spec, int sign) {
    if (data.size() != spec.size())
        throw std::invalid_argument("dft buffer size mismatch");
    fftw_plan p = get_plan(spec, sign);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(data.data()),
                     reinterpret_cast<fftw_complex*>(data.data()));
}

} // namespace nlslab::detail
