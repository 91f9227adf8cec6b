// Copyright 2026 The PCDN Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PCDN_WORKER_POOL_H_
#define PCDN_WORKER_POOL_H_

#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

namespace pcdn {

// Half-open range [begin, end).
struct Range {
  std::size_t begin;
  std::size_t end;
};

// Static block partition: the `part`-th of `parts` contiguous chunks of
// [0, count). Chunk sizes differ by at most one.
inline Range block_range(std::size_t count, std::size_t parts,
                         std::size_t part) {
  const std::size_t base = count / parts;
  const std::size_t extra = count % parts;
  const std::size_t begin = part * base + (part < extra ? part : extra);
  return {begin, begin + base + (part < extra ? 1 : 0)};
}

// Fixed team of threads executing one parallel region at a time. The calling
// thread participates as worker 0, and run() returns only after every worker
// finished (the region's single barrier). Not reentrant.
class WorkerPool {
 public:
  explicit WorkerPool(std::size_t threads);
  ~WorkerPool();

  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  std::size_t size() const { return threads_.size() + 1; }

  // Calls task(worker) for worker in [0, workers); workers <= size().
  // The first exception thrown by any worker is rethrown here.
  void run(std::size_t workers, const std::function<void(std::size_t)>& task);
  void run(const std::function<void(std::size_t)>& task) {
    run(size(), task);
  }

  // Splits [0, count) into at most size() static blocks and calls
  // body(worker, range). Runs inline when count < grain or size() == 1.
  template <typename Body>
  void parallel_for(std::size_t count, std::size_t grain, Body&& body) {
    const std::size_t workers = workers_for(count, grain);
    if (workers <= 1) {
      body(std::size_t{0}, Range{0, count});
      return;
    }
    run(workers, [&](std::size_t worker) {
      body(worker, block_range(count, workers, worker));
    });
  }

  // Number of workers parallel_for would use for this problem size.
  std::size_t workers_for(std::size_t count, std::size_t grain) const {
    if (size() == 1 || count < grain || count < 2) return 1;
    return count < size() ? count : size();
  }

 private:
  void worker_loop(std::size_t worker);

  std::vector<std::thread> threads_;
  std::mutex mutex_;
  std::condition_variable start_cv_;
  std::condition_variable done_cv_;
  const std::function<void(std::size_t)>* task_ = nullptr;
  std::size_t active_workers_ = 0;
  std::size_t pending_ = 0;
  std::size_t generation_ = 0;
  bool stopping_ = false;
  std::exception_ptr error_;
};

// Worker count to use when the caller did not specify one: PCDN_THREADS if
// set, else the hardware concurrency.
std::size_t default_thread_count();

}  // namespace pcdn

#endif  // PCDN_WORKER_POOL_H_
