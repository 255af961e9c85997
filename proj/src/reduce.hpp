#pragma once

#include "ewtls/kernels.hpp"

#include <exception>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ewtls::detail {

/// Pairwise reduction with a fixed tree: level by level, neighbours (2k, 2k+1)
/// are combined; an odd tail element is carried up unchanged.
template <typename T, typename Combine>
T tree_reduce(std::vector<T> items, Combine combine) {
  while (items.size() > 1) {
    std::vector<T> next;
    next.reserve((items.size() + 1) / 2);
    for (std::size_t k = 0; k + 1 < items.size(); k += 2) {
      next.push_back(combine(std::move(items[k]), std::move(items[k + 1])));
    }
    if (items.size() % 2 == 1) next.push_back(std::move(items.back()));
    items = std::move(next);
  }
  return std::move(items.front());
}

/// Splits [0, m) into chunks of kChunkRows, evaluates `chunk(begin, end)` for
/// each chunk in parallel and reduces the partials with tree_reduce. The first
/// exception (lowest chunk) is rethrown after the parallel region.
template <typename T, typename Chunk, typename Combine>
T chunked_reduce(Index m, int threads, Chunk chunk, Combine combine) {
  const Index chunk_rows = kernels::kChunkRows;
  const Index nchunks = (m + chunk_rows - 1) / chunk_rows;
  std::vector<T> partials(static_cast<std::size_t>(nchunks));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(nchunks));
  const int nt = kernels::resolve_threads(threads);
  (void)nt;
#pragma omp parallel for schedule(static) num_threads(nt)
  for (Index k = 0; k < nchunks; ++k) {
    const auto slot = static_cast<std::size_t>(k);
    try {
      const Index begin = k * chunk_rows;
      const Index end = std::min(m, begin + chunk_rows);
      partials[slot] = chunk(begin, end);
    } catch (...) {
      errors[slot] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return tree_reduce(std::move(partials), combine);
}

}  // namespace ewtls::detail
