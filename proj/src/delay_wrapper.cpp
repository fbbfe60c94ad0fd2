#include "wuuct/delay_wrapper.hpp"

#include <thread>

namespace wuuct {

DelayWrapper::DelayWrapper(std::unique_ptr<Environment> inner, std::chrono::microseconds step_delay,
                           DelayMode mode)
    : inner_(std::move(inner)), delay_(step_delay), mode_(mode) {
  if (!inner_) throw ConfigError("delay wrapper needs an inner environment");
  if (delay_.count() < 0) throw ConfigError("negative step delay");
}

StepOutcome DelayWrapper::step(const State& state, ActionId action) const {
  if (delay_.count() > 0) {
    if (mode_ == DelayMode::kSleep) {
      std::this_thread::sleep_for(delay_);
    } else {
      const auto until = std::chrono::steady_clock::now() + delay_;
      while (std::chrono::steady_clock::now() < until) {
      }
    }
  }
  return inner_->step(state, action);
}

std::unique_ptr<Environment> DelayWrapper::clone() const {
  return std::make_unique<DelayWrapper>(inner_->clone(), delay_, mode_);
}

}  // namespace wuuct
