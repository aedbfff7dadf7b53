#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "collrf/analytic.hpp"

namespace collrf::io {

inline constexpr std::string_view kToolVersion = "1.0.0";

/// Ordered key/value pairs recorded in file headers.
using Provenance = std::vector<std::pair<std::string, std::string>>;

struct GridSpec {
  double min = 0.0;
  double max = 0.0;
  std::size_t points = 0;
};

struct ParamsFile {
  SystemParams params;
  std::optional<GridSpec> grid;
};

struct SpectrumDocument {
  SampledSpectrum spectrum;
  Provenance provenance;
};

struct LinesDocument {
  LineSpectrum spectrum;
  Provenance provenance;
};

/// 12 significant digits, '.' decimal point regardless of locale.
std::string format_decimal(double value);
/// Rounds to what format_decimal would print.
double round_decimal(double value);

Provenance params_provenance(const SystemParams& params);

// Spectrum files: '#' header lines ("# key: value"), then "offset,intensity" rows.
void write_spectrum(std::ostream& out, const SampledSpectrum& spectrum, const Provenance& provenance);
void write_spectrum(const std::filesystem::path& path, const SampledSpectrum& spectrum,
                    const Provenance& provenance);
SpectrumDocument read_spectrum(std::istream& in);
SpectrumDocument read_spectrum(const std::filesystem::path& path);

// Lines and params files are JSON documents.
void write_lines(std::ostream& out, const LineSpectrum& lines, const Provenance& provenance);
void write_lines(const std::filesystem::path& path, const LineSpectrum& lines,
                 const Provenance& provenance);
LinesDocument read_lines(std::istream& in);
LinesDocument read_lines(const std::filesystem::path& path);

void write_params(std::ostream& out, const ParamsFile& params);
void write_params(const std::filesystem::path& path, const ParamsFile& params);
ParamsFile read_params(std::istream& in);
ParamsFile read_params(const std::filesystem::path& path);

}  // namespace collrf::io
