#include "amkl/synthetic.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "amkl/errors.hpp"

namespace amkl {

SyntheticData generate_synthetic(const SyntheticTask& task, RandomSource& rng) {
  task.teacher.validate();
  if (task.n < 1) throw ConfigError("data.n", "sample count must be >= 1");
  if (!(task.noise_std >= 0.0)) throw ConfigError("data.noise", "noise std must be >= 0");

  SyntheticData out;
  const NetworkSpec& spec = task.teacher;
  for (int i = 1; i <= spec.depth; ++i) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(spec.dims[i - 1]));
    out.teacher_weights.push_back(gaussian_fill(rng, spec.dims[i], spec.dims[i - 1], scale));
  }
  out.data.inputs = gaussian_fill(rng, spec.dims.front(), task.n, 1.0);
  Matrix value = out.data.inputs;
  for (int i = 1; i <= spec.depth; ++i) {
    const Matrix pre = matmul(out.teacher_weights[i - 1], value);
    const Matrix act = activation_apply(spec.activation(i), pre);
    value = task.residual ? value + act : act;
  }
  out.data.labels =
      value + gaussian_fill(rng, spec.dims.back(), task.n, task.noise_std);
  return out;
}

DataSet load_dataset_csv(const std::string& path, int d0, int dn) {
  std::ifstream is(path);
  if (!is) throw ConfigError("data.csv", "cannot open " + path);
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("data.csv", "missing header row");

  std::vector<std::vector<double>> samples;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ConfigError("data.csv", "line " + std::to_string(lineno) + ": bad number '" +
                                          cell + "'");
      }
    }
    if (row.size() != static_cast<std::size_t>(d0 + dn)) {
      throw ConfigError("data.csv", "line " + std::to_string(lineno) + ": expected " +
                                        std::to_string(d0 + dn) + " columns, got " +
                                        std::to_string(row.size()));
    }
    samples.push_back(std::move(row));
  }
  if (samples.empty()) throw ConfigError("data.csv", "no samples");

  DataSet data;
  data.inputs = Matrix(d0, static_cast<int>(samples.size()));
  data.labels = Matrix(dn, static_cast<int>(samples.size()));
  for (std::size_t s = 0; s < samples.size(); ++s) {
    for (int r = 0; r < d0; ++r) data.inputs(r, static_cast<int>(s)) = samples[s][r];
    for (int r = 0; r < dn; ++r) data.labels(r, static_cast<int>(s)) = samples[s][d0 + r];
  }
  return data;
}

}  // namespace amkl
