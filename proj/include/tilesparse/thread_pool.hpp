// Copyright 2026 The tilesparse Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TILESPARSE_THREAD_POOL_HPP_
#define TILESPARSE_THREAD_POOL_HPP_

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <thread>
#include <vector>

namespace tilesparse {

/// Fixed-size worker pool running one index-space job at a time.
///
/// `parallel_for(n, fn)` calls `fn(i)` exactly once for every i in [0, n).
/// Indices are claimed in ascending order from a shared counter by the
/// workers and the calling thread, so early indices start first, mirroring
/// in-order dispatch of thread blocks. Kernels built on it write every
/// output element from exactly one index, which makes results independent
/// of the number of workers.
class ThreadPool {
 public:
  /// `num_threads` counts the calling thread; 0 selects the hardware
  /// concurrency.
  explicit ThreadPool(std::size_t num_threads = 0) {
    if (num_threads == 0) {
      num_threads = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    }
    workers_.reserve(num_threads - 1);
    for (std::size_t i = 0; i + 1 < num_threads; ++i) {
      workers_.emplace_back([this] { worker_loop(); });
    }
  }

  ThreadPool(const ThreadPool&) = delete;
  ThreadPool& operator=(const ThreadPool&) = delete;

  ~ThreadPool() {
    {
      std::lock_guard lock(mutex_);
      stop_ = true;
    }
    wake_.notify_all();
    for (auto& t : workers_) t.join();
  }

  std::size_t size() const noexcept { return workers_.size() + 1; }

  template <class Fn>
  void parallel_for(std::size_t n, Fn&& fn) {
    if (n == 0) return;
    if (workers_.empty() || n == 1) {
      for (std::size_t i = 0; i < n; ++i) fn(i);
      return;
    }

    std::lock_guard job_lock(job_mutex_);
    Job job;
    job.count = n;
    job.body = [&fn](std::size_t i) { fn(i); };
    {
      std::lock_guard lock(mutex_);
      job_ = &job;
      ++generation_;
    }
    wake_.notify_all();

    run(job);

    std::unique_lock lock(mutex_);
    done_.wait(lock, [&] { return job.active == 0; });
    job_ = nullptr;
    lock.unlock();

    if (job.error) std::rethrow_exception(job.error);
  }

 private:
  struct Job {
    std::size_t count = 0;
    std::function<void(std::size_t)> body;
    std::atomic<std::size_t> next{0};
    std::size_t active = 0;  // guarded by mutex_
    std::exception_ptr error;
    std::mutex error_mutex;
  };

  static void run(Job& job) {
    for (;;) {
      const std::size_t i = job.next.fetch_add(1, std::memory_order_relaxed);
      if (i >= job.count) return;
      try {
        job.body(i);
      } catch (...) {
        std::lock_guard lock(job.error_mutex);
        if (!job.error) job.error = std::current_exception();
        job.next.store(job.count, std::memory_order_relaxed);
      }
    }
  }

  void worker_loop() {
    std::size_t seen = 0;
    for (;;) {
      Job* job = nullptr;
      {
        std::unique_lock lock(mutex_);
        wake_.wait(lock, [&] { return stop_ || (job_ && generation_ != seen); });
        if (stop_) return;
        seen = generation_;
        job = job_;
        ++job->active;
      }
      run(*job);
      {
        std::lock_guard lock(mutex_);
        --job->active;
      }
      done_.notify_all();
    }
  }

  std::vector<std::thread> workers_;
  std::mutex job_mutex_;
  std::mutex mutex_;
  std::condition_variable wake_;
  std::condition_variable done_;
  Job* job_ = nullptr;
  std::size_t generation_ = 0;
  bool stop_ = false;
};

namespace detail {
inline std::unique_ptr<ThreadPool>& default_pool_slot() {
  static std::unique_ptr<ThreadPool> pool;
  return pool;
}
inline std::mutex& default_pool_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace detail

/// Process-wide pool used when a kernel is not handed one explicitly.
inline ThreadPool& default_pool() {
  std::lock_guard lock(detail::default_pool_mutex());
  auto& slot = detail::default_pool_slot();
  if (!slot) slot = std::make_unique<ThreadPool>();
  return *slot;
}

/// Replaces the default pool. Must not race with running kernels.
inline void set_default_threads(std::size_t num_threads) {
  std::lock_guard lock(detail::default_pool_mutex());
  detail::default_pool_slot() = std::make_unique<ThreadPool>(num_threads);
}

}  // namespace tilesparse

#endif  // TILESPARSE_THREAD_POOL_HPP_
