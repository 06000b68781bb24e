#include "smcreg/executor.hpp"

#include <algorithm>

namespace smcreg {

Executor::Executor(unsigned workers)
    : workers_(workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : workers) {
  // The calling thread participates, so spawn one fewer.
  for (unsigned w = 1; w < workers_; ++w) threads_.emplace_back([this] { worker_loop(); });
}

Executor::~Executor() {
  {
    std::lock_guard lock(mu_);
    stop_ = true;
  }
  wake_.notify_all();
  for (auto& t : threads_) t.join();
}

void Executor::run_chunks() {
  for (;;) {
    std::size_t i;
    const std::function<void(std::size_t)>* body;
    {
      std::lock_guard lock(mu_);
      if (next_ >= n_) return;
      i = next_++;
      body = body_;
    }
    try {
      (*body)(i);
    } catch (...) {
      std::lock_guard lock(mu_);
      if (!error_) error_ = std::current_exception();
      next_ = n_;
    }
  }
}

void Executor::worker_loop() {
  std::size_t seen = 0;
  for (;;) {
    {
      std::unique_lock lock(mu_);
      wake_.wait(lock, [&] { return stop_ || generation_ != seen; });
      if (stop_) return;
      seen = generation_;
      ++active_;
    }
    run_chunks();
    {
      std::lock_guard lock(mu_);
      --active_;
    }
    done_.notify_all();
  }
}

void Executor::parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  if (n == 0) return;
  if (threads_.empty()) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  {
    std::lock_guard lock(mu_);
    body_ = &body;
    n_ = n;
    next_ = 0;
    error_ = nullptr;
    ++generation_;
  }
  wake_.notify_all();
  run_chunks();
  std::exception_ptr err;
  {
    std::unique_lock lock(mu_);
    done_.wait(lock, [&] { return next_ >= n_ && active_ == 0; });
    body_ = nullptr;
    err = error_;
  }
  if (err) std::rethrow_exception(err);
}

}  // namespace smcreg
