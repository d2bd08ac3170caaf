#pragma once

// Built-in example systems: a deterministic network with three nodes and one
// input, and a two-mode probabilistic network on the same state space.

#include "bcn/lyapunov.hpp"
#include "bcn/network.hpp"

namespace bcn::examples {

CompiledNetwork example1_network();
LogicalMatrix example1_gain();
LyapunovCertificate example1_certificate();  // lambda = (5, 4.5, 4, 6, 1, 3, 2, 0)

CompiledNetwork example2_network();
LogicalMatrix example2_gain();
LyapunovCertificate example2_certificate();  // nu = (8.3, 9.3, 9.4, 6.5, 2.8, 6.4, 3.6, 0)

}  // namespace bcn::examples
