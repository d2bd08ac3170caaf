#pragma once

#include <string>

#include "bcn/self_trigger.hpp"

namespace bcn {

/// "delta_8^3"
std::string delta_label(std::size_t dim, std::size_t index);

/// Aligned text table. Deterministic tables list trigger times and controls
/// per initial state; stochastic tables list the decision at each sample.
std::string render_schedule(const ScheduleTable& table, std::size_t state_count,
                            std::size_t control_count);

}  // namespace bcn
