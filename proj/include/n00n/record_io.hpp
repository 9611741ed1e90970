#pragma once

// Calibration record CSV:
//
//   # optional comment lines
//   phase_deg,count_1,count_2,count_3,count_4,exposure_s
//   0,5012,2389,166,2433,1
//
// The header is mandatory and fixes K. Phases must be strictly increasing.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "n00n/calibrator.hpp"

namespace n00n {

CalibrationRecord parse_record_csv(std::string_view text, const std::string& source = "<record>");
CalibrationRecord load_record_csv(const std::filesystem::path& path);

/// `comments` is written verbatim before the header (each line should start with '#').
void write_record_csv(std::ostream& out, const CalibrationRecord& record,
                      std::string_view comments = {});
void save_record_csv(const std::filesystem::path& path, const CalibrationRecord& record,
                     std::string_view comments = {});

}  // namespace n00n
