#pragma once

#include <condition_variable>
#include <deque>
#include <mutex>
#include <optional>

namespace wuuct {

// Message queue between the master and a worker pool. Delivery is FIFO and
// exactly-once; any number of producers and consumers may share one queue.
template <typename T>
class Queue {
 public:
  virtual ~Queue() = default;
  // Returns false if the queue is closed; the item is dropped.
  virtual bool push(T item) = 0;
  // Blocks until an item arrives; nullopt once closed and drained.
  virtual std::optional<T> pop() = 0;
  virtual void close() = 0;
};

template <typename T>
class InProcessQueue final : public Queue<T> {
 public:
  bool push(T item) override {
    {
      std::lock_guard lock(mu_);
      if (closed_) return false;
      items_.push_back(std::move(item));
    }
    cv_.notify_one();
    return true;
  }

  std::optional<T> pop() override {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return closed_ || !items_.empty(); });
    if (items_.empty()) return std::nullopt;
    T item = std::move(items_.front());
    items_.pop_front();
    return item;
  }

  void close() override {
    {
      std::lock_guard lock(mu_);
      closed_ = true;
    }
    cv_.notify_all();
  }

  std::size_t size() const {
    std::lock_guard lock(mu_);
    return items_.size();
  }

 private:
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<T> items_;
  bool closed_ = false;
};

}  // namespace wuuct
