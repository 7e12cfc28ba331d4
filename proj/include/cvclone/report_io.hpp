#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cvclone/protocols.hpp"

namespace cvclone {

inline constexpr const char *kReportSchema = "cvclone-report/1";
inline constexpr const char *kCsvSchemaLine = "# cvclone-csv v1";

nlohmann::json report_to_json(const ProtocolReport &report);
nlohmann::json config_to_json(const ProtocolConfig &cfg);
nlohmann::json summary_to_json(const MonteCarloSummary &summary);
nlohmann::json record_to_json(const TrajectoryRecord &record);

/// Schema line, header row, then one row per report.
void write_csv(std::ostream &os, const std::vector<ProtocolReport> &reports);
std::vector<std::string> csv_header();

void write_pretty(std::ostream &os, const ProtocolReport &report);
void write_pretty(std::ostream &os, const MonteCarloSummary &summary);

} // namespace cvclone
