// Network and choreography generators for tests and benchmarks.

#pragma once

#include <cstddef>
#include <random>

#include "chorex/syntax.hpp"

namespace chorex {

/// n pairs p_{2i-1} { if *=p_{2i} then 0 else 0 } | p_{2i} { p_{2i-1}!e; 0 }.
Network conditional_family(int n);

struct RandomNetworkOptions {
  std::size_t max_processes = 6;
  std::size_t max_actions = 5;  // per process, summed over all branches
  std::size_t max_labels = 2;
};

/// Finite network of independently generated behaviours; most deadlock
/// somewhere.
Network random_finite_network(std::mt19937_64& rng, const RandomNetworkOptions& options = {});

/// Finite choreography over at most `processes` processes with at most
/// `actions` interactions on every path. Not necessarily projectable.
Choreography random_finite_choreography(std::mt19937_64& rng, std::size_t processes, std::size_t actions);

/// Projection of a random projectable finite choreography (retries until
/// one projects). Such networks never deadlock.
Network random_projected_network(std::mt19937_64& rng, std::size_t processes, std::size_t actions);

/// Either kind above with equal probability, within `options`. A projected
/// network is redrawn until no path of any process has more than
/// `max_actions` actions.
Network random_test_network(std::mt19937_64& rng, const RandomNetworkOptions& options = {});

}  // namespace chorex
