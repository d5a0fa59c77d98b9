#include "stereotac/poisson.hpp"

#include <cmath>
#include <stdexcept>

#include "stereotac/fft.hpp"

namespace stereotac::poisson {

namespace {

// In-place DST-I over every row of a row-major rows x cols array.
void dst_rows(std::vector<double>& data, int cols, int rows) {
  auto plan = fft::dst1_plan(static_cast<std::size_t>(cols));
  for (int r = 0; r < rows; ++r) {
    double* row = data.data() + static_cast<std::size_t>(r) * cols;
    plan->execute(row, row);
  }
}

std::vector<double> transpose(const std::vector<double>& data, int cols, int rows) {
  std::vector<double> out(data.size());
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      out[static_cast<std::size_t>(c) * rows + r] =
          data[static_cast<std::size_t>(r) * cols + c];
    }
  }
  return out;
}

}  // namespace

std::vector<double> solve_dirichlet(const std::vector<double>& rhs, int cols, int rows) {
  if (cols < 1 || rows < 1) throw std::invalid_argument("solve_dirichlet: empty grid");
  if (rhs.size() != static_cast<std::size_t>(cols) * rows) {
    throw std::invalid_argument("solve_dirichlet: rhs size mismatch");
  }

  // Eigenvalues of the 1D Dirichlet Laplacian: 2cos(pi*(k+1)/(n+1)) - 2.
  std::vector<double> lambda_col(cols), lambda_row(rows);
  for (int k = 0; k < cols; ++k) {
    const double s = std::sin(M_PI * (k + 1) / (2.0 * (cols + 1)));
    lambda_col[k] = -4.0 * s * s;
  }
  for (int k = 0; k < rows; ++k) {
    const double s = std::sin(M_PI * (k + 1) / (2.0 * (rows + 1)));
    lambda_row[k] = -4.0 * s * s;
  }

  std::vector<double> work = rhs;
  dst_rows(work, cols, rows);
  work = transpose(work, cols, rows);  // now rows x cols swapped: cols x rows layout
  dst_rows(work, rows, cols);

  // work is indexed [col-mode][row-mode]; divide by the eigenvalue sum.
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) {
      work[static_cast<std::size_t>(c) * rows + r] /= (lambda_col[c] + lambda_row[r]);
    }
  }

  // Invert both transforms; DST-I is self-inverse up to (n+1)/2 per axis.
  dst_rows(work, rows, cols);
  work = transpose(work, rows, cols);
  dst_rows(work, cols, rows);

  const double scale = 4.0 / (static_cast<double>(cols + 1) * static_cast<double>(rows + 1));
  for (double& v : work) v *= scale;
  return work;
}

}  // namespace stereotac::poisson
