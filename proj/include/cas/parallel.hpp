#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace cas {

/// Splits [0, count) into contiguous chunks, one thread per chunk; `body(begin, end)`.
template <typename Body>
void parallel_for(std::size_t count, unsigned workers, Body&& body) {
  if (workers <= 1 || count < 2) {
    body(std::size_t{0}, count);
    return;
  }
  const std::size_t chunk = (count + workers - 1) / workers;
  std::vector<std::thread> threads;
  for (std::size_t begin = 0; begin < count; begin += chunk) {
    threads.emplace_back([&, begin] { body(begin, std::min(count, begin + chunk)); });
  }
  for (auto& t : threads) t.join();
}

}  // namespace cas
