#include "replab/kernels.hpp"

#include <omp.h>

#include <algorithm>

#include "replab/error.hpp"

namespace replab {

void set_worker_count(int workers) {
  if (workers < 1) throw Error(ErrorKind::bad_parameter, "worker count must be >= 1");
  omp_set_num_threads(workers);
}

int worker_count() { return omp_get_max_threads(); }

OrbitTable forward_table(const MapSystem& map, std::span<const double> pool, std::size_t steps, Execution mode) {
  OrbitTable table;
  table.steps = steps;
  table.values.assign(pool.size() * steps, 0.0);
  table.valid.assign(pool.size(), 1);
  for_each_index(pool.size(), mode, [&](std::size_t i) {
    double* out = table.values.data() + i * steps;
    double x = pool[i];
    for (std::size_t k = 0; k < steps; ++k) {
      out[k] = x;
      if (k + 1 == steps) break;
      try {
        x = map.eval(x);
      } catch (const Error&) {
        table.valid[i] = 0;
        return;
      }
    }
  });
  return table;
}

}  // namespace replab
