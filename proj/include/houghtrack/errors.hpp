#pragma once

#include <stdexcept>
#include <string>

namespace houghtrack {

// Malformed configuration, script, or parameter input.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// File access or parse failure.
class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

// No hypothesis satisfies the active hard constraints. Carries the frame
// index when raised inside sequence processing (0 = not frame-specific).
class infeasible_error : public std::runtime_error {
public:
    explicit infeasible_error(const std::string& msg, int frame = 0)
        : std::runtime_error(msg), frame_(frame) {}
    int frame() const { return frame_; }

private:
    int frame_;
};

// Constrained search window contains no grid cell (tolerance below grid step).
class empty_window_error : public infeasible_error {
public:
    explicit empty_window_error(const std::string& msg, int frame = 0)
        : infeasible_error(msg, frame) {}
};

}  // namespace houghtrack
