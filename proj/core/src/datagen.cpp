#include "adaptista/datagen.hpp"

#include <stdexcept>

#include "adaptista/csv.hpp"

namespace adaptista {

DictionaryPtr gaussian_dictionary(Index n, Index m, const RngSpec& spec) {
  if (n < 1 || m < 1) throw std::invalid_argument("gaussian_dictionary: n, m must be >= 1");
  Rng rng(spec);
  Matrix raw(n, m);
  for (Index j = 0; j < m; ++j) {
    for (Index i = 0; i < n; ++i) raw(i, j) = rng.normal();
  }
  return make_dictionary(std::move(raw));
}

Matrix equiregularization_samples(const Dictionary& dict, Index count,
                                  const RngSpec& spec) {
  if (count < 1) throw std::invalid_argument("equiregularization_samples: count must be >= 1");
  Rng rng(spec);
  Matrix samples(dict.n_rows(), count);
  Vector draw(dict.n_rows());
  for (Index s = 0; s < count; ++s) {
    double scale = 0.0;
    while (scale == 0.0) {
      for (Index i = 0; i < draw.size(); ++i) draw[i] = rng.normal();
      scale = (dict.atoms().transpose() * draw).lpNorm<Eigen::Infinity>();
    }
    samples.col(s) = draw / scale;
  }
  return samples;
}

DictionaryPtr import_dictionary(const std::filesystem::path& path) {
  Matrix raw = read_matrix_csv(path);
  try {
    return make_dictionary(std::move(raw));
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

void export_dictionary(const Dictionary& dict, const std::filesystem::path& path) {
  write_matrix_csv(dict.atoms(), path);
}

void write_samples(const Matrix& samples, const std::filesystem::path& path) {
  write_matrix_csv(samples.transpose(), path);
}

Matrix read_samples(const std::filesystem::path& path) {
  return read_matrix_csv(path).transpose();
}

}  // namespace adaptista
