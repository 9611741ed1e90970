#include "n00n/record_io.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "n00n/config.hpp"
#include "n00n/errors.hpp"

namespace n00n {

CalibrationRecord parse_record_csv(std::string_view text, const std::string& source) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  std::size_t k = 0;
  bool have_header = false;
  CalibrationRecord rec;

  while (std::getline(in, line)) {
    ++lineno;
    const std::string body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto fields = split_list(body);

    if (!have_header) {
      if (fields.size() < 5 || fields.front() != "phase_deg" || fields.back() != "exposure_s") {
        throw ParseError(source, lineno,
                         "expected header 'phase_deg,count_1,...,count_K,exposure_s'");
      }
      k = fields.size() - 2;
      for (std::size_t c = 0; c < k; ++c) {
        if (fields[c + 1] != "count_" + std::to_string(c + 1)) {
          throw ParseError(source, lineno, "unexpected column '" + fields[c + 1] + "'");
        }
      }
      have_header = true;
      continue;
    }

    if (fields.size() != k + 2) {
      throw ParseError(source, lineno,
                       "expected " + std::to_string(k + 2) + " fields, got " + std::to_string(fields.size()));
    }
    CalibrationPoint pt;
    try {
      pt.phase = Phase::degrees(parse_double(fields[0], "phase_deg"));
      pt.counts.counts.reserve(k);
      for (std::size_t c = 0; c < k; ++c) {
        const auto v = parse_int(fields[c + 1], "count_" + std::to_string(c + 1));
        if (v < 0) throw InvalidArgument("count_" + std::to_string(c + 1) + " is negative");
        pt.counts.counts.push_back(v);
      }
      pt.counts.exposure_s = parse_double(fields.back(), "exposure_s");
    } catch (const InvalidArgument& e) {
      throw ParseError(source, lineno, e.what());
    }
    if (!std::isfinite(pt.phase.deg())) throw ParseError(source, lineno, "phase is not finite");
    if (!(pt.counts.exposure_s > 0.0)) throw ParseError(source, lineno, "exposure must be positive");
    if (!rec.points.empty() && !(pt.phase.deg() > rec.points.back().phase.deg())) {
      throw ParseError(source, lineno, "phases must be strictly increasing");
    }
    rec.points.push_back(std::move(pt));
  }

  if (!have_header) throw ParseError(source, 0, "empty record file (no header)");
  if (rec.points.empty()) throw ParseError(source, 0, "record has no data rows");
  rec.step_deg = rec.size() > 1 ? rec.points[1].phase.deg() - rec.points[0].phase.deg() : 1.0;
  return rec;
}

CalibrationRecord load_record_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_record_csv(ss.str(), path.string());
}

void write_record_csv(std::ostream& out, const CalibrationRecord& record, std::string_view comments) {
  out << comments;
  out << "phase_deg";
  for (std::size_t c = 0; c < record.channels(); ++c) out << ",count_" << c + 1;
  out << ",exposure_s\n";
  for (const auto& p : record.points) {
    out << format_double(p.phase.deg());
    for (auto v : p.counts.counts) out << ',' << v;
    out << ',' << format_double(p.counts.exposure_s) << '\n';
  }
}

void save_record_csv(const std::filesystem::path& path, const CalibrationRecord& record,
                     std::string_view comments) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  write_record_csv(out, record, comments);
}

}  // namespace n00n
