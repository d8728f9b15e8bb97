#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "mqnmr/coherence.hpp"
#include "mqnmr/profile.hpp"

namespace mqnmr {

inline constexpr int kSchemaVersion = 1;

enum class Format { Csv, Json };

/// Parses "csv" or "json"; throws DomainError otherwise.
Format parse_format(const std::string& name);

/// CSV columns exactly t,order,intensity; orders k >= 0 only, 17 significant digits.
void write_time_series_csv(std::ostream& os, const TimeSeries& series);
void write_time_series_json(std::ostream& os, const TimeSeries& series);

/// CSV: '#' key=value metadata lines, then order,intensity rows.
void write_profile_csv(std::ostream& os, const AveragedProfile& profile);
void write_profile_json(std::ostream& os, const AveragedProfile& profile);

/// Reads either format (JSON when the first non-space character is '{').
/// Throws ParseError with line/field context.
AveragedProfile read_profile(std::istream& is, const std::string& source_name = "<input>");
AveragedProfile read_profile_file(const std::filesystem::path& path);

void write_fit_json(std::ostream& os, const ProfileFit& fit, int n_spins);
/// One row per parameter set and convention:
/// set,convention,A1,A2,alpha1,alpha2,a1,a2,normalization_residual.
void write_fit_csv(std::ostream& os, const ProfileFit& fit, int n_spins);

}  // namespace mqnmr
