#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>

namespace panelvar {

// Malformed or inconsistent input. The CLI maps this to exit code 2.
class data_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Solver or numeric failure. The CLI maps this to exit code 3.
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shortest representation with `significant` digits ("%.Ng").
std::string format_sig(double value, int significant = 10);

// Fixed decimals ("%.Nf"), used by the table emitters.
std::string format_fixed(double value, int decimals);

// Runs fn(i) for i in [0, count). Tasks must write only to their own slot.
// threads <= 1 (or count < 2) degrades to a plain loop.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace panelvar
