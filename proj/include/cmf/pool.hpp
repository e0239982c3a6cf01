#pragma once

#include <atomic>
#include <condition_variable>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace cmf {

// Fixed-size thread pool for index-addressed task batches. Tasks write only
// to their own preallocated slots and all randomness is keyed, so the
// schedule never affects results.
class WorkerPool {
 public:
  explicit WorkerPool(int workers) : workers_(workers < 1 ? 1 : workers) {}

  int workers() const { return workers_; }

  // Runs task(i) for i = 0..count-1 across the pool; blocks until done.
  // Exceptions from tasks are rethrown (first one wins).
  void run(int count, const std::function<void(int)>& task) {
    if (count <= 0) return;
    if (workers_ == 1) {
      for (int i = 0; i < count; ++i) task(i);
      return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    const int nthreads = workers_ < count ? workers_ : count;
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(nthreads));
    for (int w = 0; w < nthreads; ++w) {
      threads.emplace_back([&] {
        for (;;) {
          const int i = next.fetch_add(1);
          if (i >= count) return;
          try {
            task(i);
          } catch (...) {
            std::lock_guard<std::mutex> lock(error_mu);
            if (!error) error = std::current_exception();
            return;
          }
        }
      });
    }
    for (auto& t : threads) t.join();
    if (error) std::rethrow_exception(error);
  }

 private:
  int workers_;
};

}  // namespace cmf
