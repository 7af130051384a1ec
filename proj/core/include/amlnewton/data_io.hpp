#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "amlnewton/problem.hpp"
#include "amlnewton/types.hpp"

namespace amln {

/// Parses `<label> <idx>:<val> ...` lines with 1-based strictly increasing
/// indices. Blank lines and lines starting with '#' are skipped. n is the
/// largest index seen unless `n_features` is given. For logistic loss, labels
/// {0, -1} map to -1 and {1, +1} to +1.
///
/// Throws ParseError (location = line number) and LabelDomainError.
Dataset parse_libsvm(const std::filesystem::path& path, Loss loss, std::optional<Index> n_features = {});
Dataset parse_libsvm_text(const std::string& text, Loss loss, std::optional<Index> n_features = {});

/// Writes nonzero features with round-trip precision.
void write_libsvm(const Dataset& data, const std::filesystem::path& path);
std::string format_libsvm(const Dataset& data);

/// Comma separated numeric cells; `label_column` is 0-based. Throws
/// ParseError (location = 1-based line) on ragged rows or non-numeric cells.
Dataset parse_csv(const std::filesystem::path& path, int label_column, bool has_header, Loss loss);
Dataset parse_csv_text(const std::string& text, int label_column, bool has_header, Loss loss);

/// features = U V^T / sqrt(rank), U (d x rank) and V (n x rank) with N(0, 1)
/// entries. A coefficient vector xbar ~ N(0, I/n) is planted: logistic labels
/// are sign(A xbar + 0.5 noise), Poisson labels are drawn from
/// Poisson(exp(clip(A xbar, -5, 3))).
Dataset generate_lowrank(Index d, Index n, Index rank, std::uint64_t seed, Loss loss);

struct Standardization {
  Dataset data;
  Vector mean;
  Vector scale;  // 1 for zero-variance columns
};

/// Column-wise shift to mean 0 and scale to unit (population) standard
/// deviation. Zero-variance columns are only shifted.
Standardization standardize(const Dataset& data);

}  // namespace amln
