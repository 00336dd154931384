#pragma once

#include <atomic>
#include <thread>
#include <vector>

namespace mcvd::detail {

template <typename Fn>
SerEstimate run_blocks(long n_symbols, int workers, Fn&& fn) {
  const long n_blocks = (n_symbols + kBlockSize - 1) / kBlockSize;
  std::vector<SerEstimate> partial(static_cast<std::size_t>(n_blocks));
  auto run_one = [&](long b) {
    const long count = std::min(kBlockSize, n_symbols - b * kBlockSize);
    fn(b, count, partial[static_cast<std::size_t>(b)]);
  };
  if (workers <= 1 || n_blocks <= 1) {
    for (long b = 0; b < n_blocks; ++b) run_one(b);
  } else {
    std::atomic<long> next{0};
    auto worker = [&] {
      for (long b = next.fetch_add(1); b < n_blocks; b = next.fetch_add(1)) run_one(b);
    };
    std::vector<std::thread> pool;
    const int n_threads = static_cast<int>(std::min<long>(workers, n_blocks));
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  SerEstimate total;
  for (const auto& p : partial) total.merge(p);
  return total;
}

}  // namespace mcvd::detail
