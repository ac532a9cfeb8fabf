#include "core_math.hpp"

namespace selfonn {

Matrix unfold(const Signal& y, std::size_t k) {
  if (k < 1) throw Error::config("unfold: window length must be >= 1");
  if (y.size() < k) {
    throw Error::config(strfmt("unfold: signal length %zu shorter than window %zu",
                               y.size(), k));
  }
  const std::size_t m_rows = y.size() - k + 1;
  Matrix out(m_rows, k);
  for (std::size_t m = 0; m < m_rows; ++m) {
    double* row = out.row(m);
    for (std::size_t r = 0; r < k; ++r) row[r] = y[m + r];
  }
  return out;
}

Matrix power_stack(const Matrix& base, int q_order) {
  if (q_order < 1) throw Error::config(strfmt("power_stack: order %d must be >= 1", q_order));
  const std::size_t m_rows = base.rows();
  const std::size_t k = base.cols();
  Matrix out(m_rows, k * static_cast<std::size_t>(q_order));
  for (std::size_t m = 0; m < m_rows; ++m) {
    const double* src = base.row(m);
    double* dst = out.row(m);
    for (std::size_t r = 0; r < k; ++r) {
      double v = src[r];
      double p = v;
      dst[r] = p;
      for (int q = 2; q <= q_order; ++q) {
        p *= v;
        dst[(static_cast<std::size_t>(q) - 1) * k + r] = p;
      }
    }
  }
  return out;
}

Matrix unfold_powers(const Signal& y, std::size_t k, int q_order) {
  if (q_order < 1) throw Error::config(strfmt("unfold_powers: order %d must be >= 1", q_order));
  if (k < 1) throw Error::config("unfold_powers: window length must be >= 1");
  if (y.size() < k) {
    throw Error::config(strfmt("unfold_powers: signal length %zu shorter than window %zu",
                               y.size(), k));
  }
  const std::size_t m_rows = y.size() - k + 1;
  Matrix out(m_rows, k * static_cast<std::size_t>(q_order));
  for (std::size_t m = 0; m < m_rows; ++m) {
    double* dst = out.row(m);
    for (std::size_t r = 0; r < k; ++r) {
      const double v = y[m + r];
      double p = v;
      dst[r] = p;
      for (int q = 2; q <= q_order; ++q) {
        p *= v;
        dst[(static_cast<std::size_t>(q) - 1) * k + r] = p;
      }
    }
  }
  return out;
}

Signal matvec(const Matrix& mat, const std::vector<double>& w) {
  if (mat.cols() != w.size()) {
    throw Error::config(strfmt("matvec: matrix has %zu columns, vector has %zu entries",
                               mat.cols(), w.size()));
  }
  const std::size_t m_rows = mat.rows();
  const std::size_t n = mat.cols();
  Signal out(m_rows, 0.0);
  // Rows are processed four at a time for instruction-level parallelism;
  // within each row the accumulation stays strictly left-to-right.
  std::size_t m = 0;
  for (; m + 4 <= m_rows; m += 4) {
    const double* r0 = mat.row(m);
    const double* r1 = mat.row(m + 1);
    const double* r2 = mat.row(m + 2);
    const double* r3 = mat.row(m + 3);
    double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
      const double wc = w[c];
      a0 += r0[c] * wc;
      a1 += r1[c] * wc;
      a2 += r2[c] * wc;
      a3 += r3[c] * wc;
    }
    out[m] = a0;
    out[m + 1] = a1;
    out[m + 2] = a2;
    out[m + 3] = a3;
  }
  for (; m < m_rows; ++m) {
    const double* row = mat.row(m);
    double acc = 0.0;
    for (std::size_t c = 0; c < n; ++c) acc += row[c] * w[c];
    out[m] = acc;
  }
  return out;
}

Signal fold_adjoint(const Matrix& grad, std::size_t out_len) {
  const std::size_t m_rows = grad.rows();
  const std::size_t k = grad.cols();
  if (m_rows == 0 || k == 0) throw Error::config("fold_adjoint: empty gradient matrix");
  const std::size_t expected = m_rows + k - 1;
  if (out_len != expected) {
    throw Error::config(strfmt("fold_adjoint: out_len %zu inconsistent with %zux%zu gradient"
                               " (expected %zu)",
                               out_len, m_rows, k, expected));
  }
  Signal out(out_len, 0.0);
  for (std::size_t m = 0; m < m_rows; ++m) {
    const double* row = grad.row(m);
    double* dst = out.data() + m;
    for (std::size_t r = 0; r < k; ++r) dst[r] += row[r];
  }
  return out;
}

}  // namespace selfonn
