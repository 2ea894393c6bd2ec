#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "mzkit/diagnostics.hpp"
#include "mzkit/measure.hpp"

namespace mzkit {

/// Serializes with insertion-ordered keys and every floating value printed
/// as %.17g, so that doubles round-trip bit-exactly and identical runs
/// produce byte-identical files.
void write_json17(std::ostream& os, const nlohmann::ordered_json& j, int indent = 2);
std::string dump_json17(const nlohmann::ordered_json& j, int indent = 2);

nlohmann::ordered_json measure_to_json(const Measure& m);
Measure measure_from_json(const nlohmann::json& j);

nlohmann::ordered_json family_to_json(const PointFamily& fam);
PointFamily family_from_json(const nlohmann::json& j);

/// One CSV cell per value, floats as %.17g.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}
  CsvWriter& field(double v);
  CsvWriter& field(int v);
  CsvWriter& field(long v);
  CsvWriter& field(const std::string& v);
  void endrow();

 private:
  std::ostream& os_;
  bool first_ = true;
};

std::string format17(double v);

}  // namespace mzkit
