#pragma once

#include <numbers>

namespace mmsync {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Maps an angle to [0, 2*pi).
double wrap_two_pi(double angle);

/// Maps an angle difference to (-pi, pi].
double wrap_pi(double angle);

/// Maps a normalized frequency (cycles/sample) to [-1/2, 1/2).
double wrap_cycle(double frequency);

}  // namespace mmsync
