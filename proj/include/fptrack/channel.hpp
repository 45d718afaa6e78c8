#pragma once
// Observation channels: additive Gaussian noise or pure delay.

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace fptrack {

struct ChannelKind {
  enum class Tag { noisy, delayed };
  Tag tag = Tag::noisy;
  double epsilon = 0.0;
  std::int64_t delay = 0;

  static ChannelKind Noisy(double epsilon) {
    if (epsilon < 0.0)
      throw std::invalid_argument("ChannelKind: epsilon must be >= 0");
    return {Tag::noisy, epsilon, 0};
  }
  static ChannelKind Delayed(std::int64_t d) {
    if (d < 0) throw std::invalid_argument("ChannelKind: delay must be >= 0");
    return {Tag::delayed, 0.0, d};
  }
};

// Y_t = X_t + epsilon * sum_{i<=t} W_i; the caller maintains the running
// noise sum so noiseless and noisy views of one path stay coupled.
inline double noisy_observe(double x_t, double noise_acc,
                            double epsilon) noexcept {
  return x_t + epsilon * noise_acc;
}

// Ring of the last delay+1 latent values; O(1) memory however long the path.
// X_0 = 0 is held implicitly by the zero-initialized buffer.
class DelayRing {
 public:
  explicit DelayRing(std::int64_t delay)
      : delay_(checked(delay)), buf_(static_cast<std::size_t>(delay_) + 1, 0.0) {}

  std::int64_t delay() const noexcept { return delay_; }
  std::int64_t time() const noexcept { return t_; }

  // Record X_t for t = time()+1.
  void push(double x) noexcept {
    ++t_;
    buf_[static_cast<std::size_t>(t_ % (delay_ + 1))] = x;
  }

  // Y_t: zero prefix for t <= delay, X_{t-delay} afterwards. Only the
  // current time can be observed; anything else is a programming error.
  double observe(std::int64_t t) const {
    if (t != t_)
      throw std::logic_error("DelayRing: buffer cannot supply X_{t-d} for this t");
    if (t <= delay_) return 0.0;
    return buf_[static_cast<std::size_t>((t - delay_) % (delay_ + 1))];
  }

 private:
  static std::int64_t checked(std::int64_t d) {
    if (d < 0) throw std::invalid_argument("DelayRing: delay must be >= 0");
    return d;
  }

  std::int64_t delay_;
  std::int64_t t_ = 0;
  std::vector<double> buf_;
};

inline double delayed_observe(const DelayRing& ring, std::int64_t t,
                              std::int64_t d) {
  if (d != ring.delay())
    throw std::logic_error("delayed_observe: ring was built for a different delay");
  return ring.observe(t);
}

}  // namespace fptrack
