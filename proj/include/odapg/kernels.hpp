#pragma once

// Data-parallel inner loops. Every kernel exists twice: a plain serial
// reference and an OpenMP version. Both visit each output row with the same
// inner summation order, so their results are bit-identical; the library
// calls the OpenMP versions and the tests pin them against the serial ones.

#include <utility>

#include "odapg/types.hpp"

namespace odapg::kernels {

namespace serial {

// out = a * (W x) + b * prev. out must not alias x or prev.
void mix_combine(const Matrix& w, const AgentStates& x, const AgentStates& prev,
                 double a, double b, AgentStates& out);

template <class RowFn>
void for_each_row(Index m, RowFn&& fn) {
  for (Index i = 0; i < m; ++i) fn(i);
}

}  // namespace serial

namespace omp {

void mix_combine(const Matrix& w, const AgentStates& x, const AgentStates& prev,
                 double a, double b, AgentStates& out);

// fn(i) must only write to state owned by row i.
template <class RowFn>
void for_each_row(Index m, RowFn&& fn) {
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < m; ++i) fn(i);
}

}  // namespace omp

}  // namespace odapg::kernels
