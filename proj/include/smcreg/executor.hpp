#pragma once

#include <condition_variable>
#include <cstddef>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace smcreg {

/// Fixed-size worker pool for index-parallel loops. parallel_for calls
/// `body(i)` exactly once for every i in [0, n); callers write results to
/// disjoint slots and reduce afterwards in index order, so results never
/// depend on the worker count.
class Executor {
 public:
  /// workers == 0 selects std::thread::hardware_concurrency().
  explicit Executor(unsigned workers = 1);
  ~Executor();

  Executor(const Executor&) = delete;
  Executor& operator=(const Executor&) = delete;

  unsigned workers() const noexcept { return workers_; }

  /// Blocks until every index has run. The first exception thrown by a body
  /// is rethrown on the calling thread after the loop drains.
  void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

 private:
  void worker_loop();
  void run_chunks();

  unsigned workers_;
  std::vector<std::thread> threads_;

  std::mutex mu_;
  std::condition_variable wake_;
  std::condition_variable done_;
  const std::function<void(std::size_t)>* body_ = nullptr;
  std::size_t n_ = 0;
  std::size_t next_ = 0;
  std::size_t active_ = 0;
  std::size_t generation_ = 0;
  bool stop_ = false;
  std::exception_ptr error_;
};

}  // namespace smcreg
