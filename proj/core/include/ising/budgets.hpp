#pragma once

#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace ising {

// Exceeding an exhaustive budget is an error, never a silent approximation.
struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed specs, invalid graphs, bad flags.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Budgets {
  int exhaustive_n = 24;       // 2^n sweeps: partition, gibbs, mu_hat, conductance
  int tv_n = 16;               // exact TV-curve state spaces
  int edge_budget = 20;        // percolation sum over edge subsets
  int ursell_vertices = 9;     // Ursell function input size
  int sum_mode_neighborhood = 24;  // literal 2^|N(A)| polymer-weight sum
  uint64_t xi_configurations = uint64_t{1} << 20;  // polymer-configuration sweep
  int expansion_subset = 12;   // validate_class exhaustive subset size

  // EXPANDER_ISING_BUDGET=<int> overrides the state-space budgets.
  static Budgets from_env() {
    Budgets b;
    if (const char* s = std::getenv("EXPANDER_ISING_BUDGET")) {
      char* end = nullptr;
      const long v = std::strtol(s, &end, 10);
      if (end == s || *end != '\0' || v < 1)
        throw ValidationError("EXPANDER_ISING_BUDGET must be a positive integer");
      b.exhaustive_n = static_cast<int>(v);
      b.tv_n = static_cast<int>(v);
    }
    return b;
  }
};

inline void require_state_budget(int n, int budget, const std::string& what) {
  if (n > budget)
    throw BudgetError(what + ": n=" + std::to_string(n) + " exceeds exhaustive budget " +
                      std::to_string(budget));
}

}  // namespace ising
