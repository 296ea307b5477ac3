#include "odapg/kernels.hpp"

namespace odapg::kernels {

namespace {

inline void combine_row(const Matrix& w, const AgentStates& x, const AgentStates& prev,
                        double a, double b, AgentStates& out, Index i) {
  auto row = out.row(i);
  if (b == 0.0) {
    row.setZero();
  } else {
    row = b * prev.row(i);
  }
  const Index m = w.cols();
  for (Index j = 0; j < m; ++j) {
    const double c = a * w(i, j);
    if (c != 0.0) row += c * x.row(j);
  }
}

}  // namespace

void serial::mix_combine(const Matrix& w, const AgentStates& x, const AgentStates& prev,
                         double a, double b, AgentStates& out) {
  out.resize(x.rows(), x.cols());
  for (Index i = 0; i < x.rows(); ++i) combine_row(w, x, prev, a, b, out, i);
}

void omp::mix_combine(const Matrix& w, const AgentStates& x, const AgentStates& prev,
                      double a, double b, AgentStates& out) {
  out.resize(x.rows(), x.cols());
  const Index m = x.rows();
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < m; ++i) combine_row(w, x, prev, a, b, out, i);
}

}  // namespace odapg::kernels
