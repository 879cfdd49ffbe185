#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lifschitz/model.hpp"
#include "lifschitz/spectral.hpp"
#include "lifschitz/stable_kernel.hpp"

namespace lifschitz::io {

/// Shortest of %.15g, %.16g, %.17g that reads back exactly.
std::string fmt(double x);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  CsvTable& row(std::vector<std::string> cells);
  const std::vector<std::string>& header() const noexcept { return header_; }
  std::size_t rows() const noexcept { return rows_.size(); }
  std::string str() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

std::string distribution_to_json(const CouplingDistribution& dist);
CouplingDistribution distribution_from_json(const std::string& text);

/// {dist, box, seed, values?}; values are omitted when the field can be regenerated.
std::string disorder_to_json(const DisorderField& field, bool include_values = false);
DisorderField disorder_from_json(const std::string& text);

/// Columns index, eigenvalue, residual.
CsvTable spectrum_table(const SpectrumResult& spectrum);
/// Columns t, z, value, error_bound.
CsvTable density_table(const StableKernel& kernel, const std::vector<double>& ts, const std::vector<double>& zs);

std::string sha256_file(const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace lifschitz::io
