#pragma once

#include <string>

#include "amkl/network.hpp"
#include "amkl/rng.hpp"

namespace amkl {

/// Teacher-generated regression task: labels are a forward pass of random
/// teacher weights plus optional gaussian noise. With `residual` set, the
/// teacher composes skip connections (value + activation(W value)), matching
/// the function class of the residual splitting so zero noise stays
/// interpolable.
struct SyntheticTask {
  NetworkSpec teacher;
  double noise_std = 0.0;
  int n = 32;
  bool residual = false;
};

struct SyntheticData {
  DataSet data;
  std::vector<Matrix> teacher_weights;  // a zero-penalty interpolant when noise_std == 0
};

/// Draw order is fixed (teacher weights layer by layer, then inputs, then
/// noise), so one seed pins the whole dataset. Teacher weights use scale
/// 1/sqrt(fan-in); inputs are standard normal.
SyntheticData generate_synthetic(const SyntheticTask& task, RandomSource& rng);

/// CSV with a header row, then one sample per row: d_0 feature columns
/// followed by d_N label columns.
DataSet load_dataset_csv(const std::string& path, int d0, int dn);

}  // namespace amkl
