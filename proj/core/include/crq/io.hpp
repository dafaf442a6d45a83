#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "crq/diagnostics.hpp"
#include "crq/flow.hpp"
#include "crq/operators.hpp"

namespace crq {

/// Raised for unreadable or malformed input files.
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Shortest round-trip decimal for a double ("nan", "inf", "-inf" for non-finite values).
std::string format_number(double x);

/// Write via a temporary file in the same directory followed by rename. Throws
/// std::runtime_error on I/O failure.
void write_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_text(const std::filesystem::path& path);

/// "# crqflow spectral N=<N> convention=1" followed by "p,q,m,value" rows.
std::string format_spectral_csv(const SpectralField& field, const ModeSet& modes);
/// Fields stored at a smaller truncation are embedded; entries outside modes are rejected.
SpectralField parse_spectral_csv(std::string_view text, const ModeSet& modes);

inline constexpr std::string_view kTrajectoryHeader = "t,E,grad_norm_sq,volume,r,q_l2,fs42,monotone_qty";
std::string format_trajectory_csv(const std::vector<TrajectoryRecord>& records);
/// Throws FormatError for a wrong header, malformed rows or zero data rows.
std::vector<TrajectoryRecord> parse_trajectory_csv(std::string_view text);

/// "row,col,value" for every entry.
std::string format_operator_csv(const OperatorMatrix& op);
/// "row,col,re,im" for every entry.
std::string format_operator_csv(const HermitianOperator& op);

/// "name,N,value" rows for every trend point.
std::string format_constants_csv(const std::vector<ConstantEstimate>& estimates);

}  // namespace crq
