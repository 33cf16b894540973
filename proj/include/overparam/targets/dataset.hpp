#pragma once

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <string>

#include "overparam/core/error.hpp"
#include "overparam/core/numerics.hpp"
#include "overparam/core/rng.hpp"
#include "overparam/targets/concept.hpp"

namespace overparam {

enum class PaddingMode { Raw, PadHalf };

struct Dataset {
  Matrix inputs;  // N x d, unit rows
  Matrix labels;  // N x k
  PaddingMode padding = PaddingMode::Raw;

  Index size() const { return inputs.rows(); }
  Index dim() const { return inputs.cols(); }
  Index outputs() const { return labels.cols(); }
};

/// Normalized Gaussian inputs. PadHalf scales each raw point to norm sqrt(3)/2 and
/// appends a last coordinate of exactly 1/2, so inputs live in R^{d+1}. Labels are
/// computed on the final inputs.
inline Dataset generate_dataset(Index d, Index N, const TargetEvaluator& target, PaddingMode mode,
                                RngStream& rng) {
  if (d < 1) throw InvalidParameter("generate_dataset: d must be >= 1");
  if (N < 1) throw InvalidParameter("generate_dataset: N must be >= 1");
  const Index dim = mode == PaddingMode::PadHalf ? d + 1 : d;
  Dataset ds;
  ds.padding = mode;
  ds.inputs.resize(N, dim);
  Vector g(d);
  for (Index n = 0; n < N; ++n) {
    double nrm = 0.0;
    while (nrm == 0.0) {
      for (Index j = 0; j < d; ++j) g(j) = rng.normal();
      nrm = g.norm();
    }
    if (mode == PaddingMode::Raw) {
      ds.inputs.row(n).head(d) = g / nrm;
    } else {
      ds.inputs.row(n).head(d) = g * (std::sqrt(3.0) / 2.0 / nrm);
      ds.inputs(n, d) = 0.5;
    }
  }
  Vector x(dim);
  for (Index n = 0; n < N; ++n) {
    x = ds.inputs.row(n).transpose();
    Vector y = target(x);
    if (n == 0) ds.labels.resize(N, y.size());
    require_input(y.size() == ds.labels.cols(), "generate_dataset: target output size changed");
    ds.labels.row(n) = y.transpose();
  }
  return ds;
}

/// Header x_1..x_d,y_1..y_k then one row per sample, full precision.
inline void write_dataset_csv(const Dataset& ds, std::ostream& os) {
  for (Index j = 0; j < ds.dim(); ++j) os << (j ? "," : "") << "x_" << (j + 1);
  for (Index j = 0; j < ds.outputs(); ++j) os << ",y_" << (j + 1);
  os << '\n' << std::setprecision(17);
  for (Index n = 0; n < ds.size(); ++n) {
    for (Index j = 0; j < ds.dim(); ++j) os << (j ? "," : "") << ds.inputs(n, j);
    for (Index j = 0; j < ds.outputs(); ++j) os << ',' << ds.labels(n, j);
    os << '\n';
  }
}

inline void write_dataset_csv(const Dataset& ds, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw InvalidInput("cannot open " + path);
  write_dataset_csv(ds, os);
}

}  // namespace overparam
