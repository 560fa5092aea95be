#pragma once

#include "vbpbb/inference.hpp"

#include <string>
#include <string_view>

namespace vbpbb {

/// Lowercase hex SHA-256 of `bytes`.
std::string sha256_hex(std::string_view bytes);

/// Band CSV: header `phase,calendar_label,lower,median,upper`, one row per phase.
std::string band_to_csv(const CIBand& band);

std::string report_to_json(const AnalysisReport& report);

enum class SummaryFormat { Csv, Json, Markdown };

SummaryFormat parse_summary_format(std::string_view text);

/// Summary table (component, method, m, significant, widths, ratios, R^2)
/// rendered from a serialized report.
std::string summarize_report(std::string_view report_json, SummaryFormat format);

} // namespace vbpbb
