#pragma once

#include <filesystem>

#include "adaptista/model.hpp"
#include "adaptista/rng.hpp"

namespace adaptista {

/// i.i.d. N(0, 1) entries drawn column by column, then columns scaled to
/// unit norm.
DictionaryPtr gaussian_dictionary(Index n, Index m, const RngSpec& rng);

/// `count` inputs (columns of the result) in the equiregularization set:
/// x = x_hat / ||D^T x_hat||_inf with x_hat ~ N(0, I_n), so ||D^T x||_inf = 1.
Matrix equiregularization_samples(const Dictionary& dict, Index count,
                                  const RngSpec& rng);

/// Loads an n x m dictionary from headerless CSV (n lines of m values).
/// Columns are re-normalized; zero or duplicated columns are rejected.
DictionaryPtr import_dictionary(const std::filesystem::path& path);
void export_dictionary(const Dictionary& dict, const std::filesystem::path& path);

/// Sample files hold one input per line, so the on-disk layout is the
/// transpose of the in-memory n x count matrix.
void write_samples(const Matrix& samples, const std::filesystem::path& path);
Matrix read_samples(const std::filesystem::path& path);

}  // namespace adaptista
