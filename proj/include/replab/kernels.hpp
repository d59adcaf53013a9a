#pragma once

// Shared execution helpers for the per-index kernels (windows, pool orbits,
// periodic words). Every kernel writes one result per index and any
// reduction happens serially afterwards, so the serial and OpenMP paths give
// bit-identical output.

#include <cstddef>
#include <cstdint>
#include <exception>
#include <span>
#include <vector>

#include "replab/maps.hpp"

namespace replab {

enum class Execution { serial, parallel };

void set_worker_count(int workers);
int worker_count();

// Runs fn(i) for i in [0, count). The exception from the lowest failing
// index is rethrown, independent of scheduling.
template <class Fn>
void for_each_index(std::size_t count, Execution mode, Fn&& fn) {
  if (mode == Execution::serial || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(count);
  const auto n = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// Row i holds f^k(pool[i]) for k < steps. Rows whose orbit touches the
// singular guard are marked invalid and left partially filled.
struct OrbitTable {
  std::size_t steps = 0;
  std::vector<double> values;
  std::vector<std::uint8_t> valid;

  std::size_t rows() const { return valid.size(); }
  std::span<const double> row(std::size_t i) const { return {values.data() + i * steps, steps}; }
};

OrbitTable forward_table(const MapSystem& map, std::span<const double> pool, std::size_t steps,
                         Execution mode = Execution::parallel);

}  // namespace replab
