#pragma once

#include "nlslab/grid.hpp"

namespace nlslab::detail {

/// In-place unnormalized multidimensional DFT (FFTW backend, cached plans).
/// sign = -1 forward, +1 backward.  Thread-safe; plan creation is serialized.
void dft(std::vector<cplx>& data, const GridSpec& spec, int sign);

} // namespace nlslab::detail
