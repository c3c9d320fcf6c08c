// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The dorfhar Authors

#include "dorfhar/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include "dorfhar/error.hpp"

namespace dorfhar::fft {

namespace {

// FFTW's planner is not reentrant; execution of an existing plan on new
// arrays is. FFTW_UNALIGNED lets one plan serve arbitrary std::vector storage.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(int n, Direction dir) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_pair(n, dir == Direction::Forward);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::vector<fftw_complex> scratch_in(static_cast<std::size_t>(n));
    std::vector<fftw_complex> scratch_out(static_cast<std::size_t>(n));
    fftw_plan plan = fftw_plan_dft_1d(n, scratch_in.data(), scratch_out.data(),
                                      dir == Direction::Forward ? FFTW_FORWARD : FFTW_BACKWARD,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan == nullptr) throw Error("fftw: failed to create plan of size " + std::to_string(n));
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<int, bool>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

}  // namespace

void transform(std::span<const cdouble> in, std::span<cdouble> out, Direction dir) {
  if (in.size() != out.size()) throw ValidationError("fft: input and output sizes differ");
  if (in.empty()) throw ValidationError("fft: empty input");
  fftw_plan plan = cache().get(static_cast<int>(in.size()), dir);
  // std::complex<double> is layout-compatible with fftw_complex; FFTW does
  // not write to the input of an out-of-place 1-D complex transform.
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<cdouble*>(in.data())),
                   reinterpret_cast<fftw_complex*>(out.data()));
}

}  // namespace dorfhar::fft
