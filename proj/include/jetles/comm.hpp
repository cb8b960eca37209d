#pragma once

// In-process message transport between partition workers: ordered reliable
// channels keyed by (source, tag), buffered sends, blocking receives with a
// timeout, and a global abort.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "jetles/error.hpp"

namespace jetles {

class Communicator {
 public:
  using Clock = std::chrono::steady_clock;

  explicit Communicator(int size, std::chrono::milliseconds timeout = std::chrono::seconds(120))
      : timeout_(timeout) {
    if (size < 1) throw ExchangeFault("communicator needs at least one rank");
    for (int r = 0; r < size; ++r) boxes_.push_back(std::make_unique<Mailbox>());
  }

  int size() const { return static_cast<int>(boxes_.size()); }
  void set_timeout(std::chrono::milliseconds t) { timeout_ = t; }

  // Every later message is held back by a random delay up to max_delay
  // (order per channel is kept).
  void inject_delays(std::uint64_t seed, std::chrono::microseconds max_delay) {
    std::lock_guard lock(rng_mutex_);
    rng_.seed(seed);
    max_delay_ = max_delay;
  }

  void send(int src, int dst, int tag, std::vector<double> payload) {
    check_rank(src);
    check_rank(dst);
    if (aborted_) throw ExchangeFault("send on aborted communicator: " + abort_reason());
    auto ready = Clock::now();
    {
      std::lock_guard lock(rng_mutex_);
      if (max_delay_.count() > 0) {
        std::uniform_int_distribution<long long> d(0, max_delay_.count());
        ready += std::chrono::microseconds(d(rng_));
      }
    }
    Mailbox& box = *boxes_[dst];
    {
      std::lock_guard lock(box.mutex);
      auto& queue = box.queues[{src, tag}];
      if (!queue.empty()) ready = std::max(ready, queue.back().ready);
      queue.push_back({ready, std::move(payload)});
    }
    box.cv.notify_all();
    ++messages_;
  }

  std::vector<double> recv(int dst, int src, int tag) {
    check_rank(src);
    check_rank(dst);
    Mailbox& box = *boxes_[dst];
    const auto deadline = Clock::now() + timeout_;
    std::unique_lock lock(box.mutex);
    for (;;) {
      if (aborted_) throw ExchangeFault("receive aborted: " + abort_reason());
      auto it = box.queues.find({src, tag});
      const auto now = Clock::now();
      if (it != box.queues.end() && !it->second.empty()) {
        if (it->second.front().ready <= now) {
          std::vector<double> data = std::move(it->second.front().data);
          it->second.pop_front();
          return data;
        }
        box.cv.wait_until(lock, std::min(deadline, it->second.front().ready));
      } else {
        box.cv.wait_until(lock, deadline);
      }
      if (Clock::now() >= deadline)
        throw ExchangeFault("rank " + std::to_string(dst) + " timed out waiting for rank " + std::to_string(src) +
                            " tag " + std::to_string(tag));
    }
  }

  void abort(const std::string& reason) {
    {
      std::lock_guard lock(reason_mutex_);
      if (!aborted_) reason_ = reason;
      aborted_ = true;
    }
    for (auto& box : boxes_) {
      std::lock_guard lock(box->mutex);
      box->cv.notify_all();
    }
  }

  bool aborted() const { return aborted_; }
  std::uint64_t messages() const { return messages_; }

  // Messages sent but not yet received, over all mailboxes.
  std::size_t pending() const {
    std::size_t n = 0;
    for (const auto& box : boxes_) {
      std::lock_guard lock(box->mutex);
      for (const auto& [key, q] : box->queues) n += q.size();
    }
    return n;
  }

 private:
  struct Message {
    Clock::time_point ready;
    std::vector<double> data;
  };
  struct Mailbox {
    mutable std::mutex mutex;
    std::condition_variable cv;
    std::map<std::pair<int, int>, std::deque<Message>> queues;
  };

  void check_rank(int r) const {
    if (r < 0 || r >= size()) throw ExchangeFault("unknown rank " + std::to_string(r));
  }
  std::string abort_reason() const {
    std::lock_guard lock(reason_mutex_);
    return reason_;
  }

  std::vector<std::unique_ptr<Mailbox>> boxes_;
  std::chrono::milliseconds timeout_;
  std::atomic<bool> aborted_{false};
  mutable std::mutex reason_mutex_;
  std::string reason_;
  std::atomic<std::uint64_t> messages_{0};
  std::mutex rng_mutex_;
  std::mt19937_64 rng_;
  std::chrono::microseconds max_delay_{0};
};

// One rank's view of the communicator.
struct Endpoint {
  Communicator* comm = nullptr;
  int rank = 0;

  void send(int dst, int tag, std::vector<double> payload) const { comm->send(rank, dst, tag, std::move(payload)); }
  std::vector<double> recv(int src, int tag) const { return comm->recv(rank, src, tag); }
};

}  // namespace jetles
