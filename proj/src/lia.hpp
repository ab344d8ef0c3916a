#pragma once

#include <atomic>
#include <optional>
#include <vector>

#include "adcl/formula.hpp"

namespace adcl::lia {

// sum of coeff * x_var plus constant; kept sorted by var, no zero coefficients
struct Row {
  std::vector<std::pair<std::uint32_t, Int>> coeffs;
  Int constant;
};

// eqs: row = 0, geqs: row >= 0, neqs: row != 0
struct System {
  std::vector<Row> eqs, geqs, neqs;
  std::uint32_t num_vars = 0;
};

struct Options {
  std::uint64_t seed = 0;
  const std::atomic<bool>* cancel = nullptr;
};

// Integer solution or nullopt if none exists. Throws Error(Cancelled).
std::optional<std::vector<Int>> solve(const System& s, const Options& opt = {});

Row make_row(std::vector<std::pair<std::uint32_t, Int>> coeffs, Int constant);

}  // namespace adcl::lia
