#include "mmsync/angles.hpp"

#include <cmath>

namespace mmsync {

double wrap_two_pi(double angle) {
    double w = std::fmod(angle, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    // fmod of a tiny negative value can round up to exactly 2*pi
    if (w >= kTwoPi) w = 0.0;
    return w;
}

double wrap_pi(double angle) {
    double w = std::fmod(angle + kPi, kTwoPi);
    if (w <= 0.0) w += kTwoPi;
    return w - kPi;
}

double wrap_cycle(double frequency) {
    double w = frequency - std::floor(frequency + 0.5);
    if (w >= 0.5) w -= 1.0;
    if (w < -0.5) w += 1.0;
    return w;
}

}  // namespace mmsync
