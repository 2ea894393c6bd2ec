#include "mzkit/io.hpp"

#include <cstdio>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace mzkit {

std::string format17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

void write_rec(std::ostream& os, const nlohmann::ordered_json& j, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent) * depth, ' ');
  const std::string pad1(static_cast<std::size_t>(indent) * (depth + 1), ' ');
  switch (j.type()) {
    case nlohmann::json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ",\n";
        first = false;
        os << pad1 << nlohmann::json(it.key()).dump() << ": ";
        write_rec(os, it.value(), indent, depth + 1);
      }
      os << "\n" << pad << "}";
      return;
    }
    case nlohmann::json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      os << "[\n";
      bool first = true;
      for (const auto& v : j) {
        if (!first) os << ",\n";
        first = false;
        os << pad1;
        write_rec(os, v, indent, depth + 1);
      }
      os << "\n" << pad << "]";
      return;
    }
    case nlohmann::json::value_t::number_float: {
      double v = j.get<double>();
      if (std::isfinite(v))
        os << format17(v);
      else
        os << "null";
      return;
    }
    default:
      os << j.dump();
      return;
  }
}

}  // namespace

void write_json17(std::ostream& os, const nlohmann::ordered_json& j, int indent) {
  write_rec(os, j, indent, 0);
  os << "\n";
}

std::string dump_json17(const nlohmann::ordered_json& j, int indent) {
  std::ostringstream ss;
  write_json17(ss, j, indent);
  return ss.str();
}

nlohmann::ordered_json measure_to_json(const Measure& m) {
  nlohmann::ordered_json j;
  switch (m.kind()) {
    case MeasureKind::Ball:
      j["kind"] = "ball";
      j["n"] = m.dim();
      j["a"] = m.exponent();
      break;
    case MeasureKind::Box: {
      j["kind"] = "box";
      j["n"] = m.dim();
      auto arr = nlohmann::ordered_json::array();
      for (const auto& b : m.bounds()) arr.push_back({b[0], b[1]});
      j["bounds"] = arr;
      break;
    }
    case MeasureKind::Ellipsoid:
      j["kind"] = "ellipsoid";
      j["n"] = m.dim();
      j["semiaxes"] = m.semiaxes();
      break;
  }
  return j;
}

Measure measure_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.contains("n"))
    throw std::invalid_argument("measure: expected an object with 'kind' and 'n'");
  std::string kind = j.at("kind").get<std::string>();
  int n = j.at("n").get<int>();
  if (kind == "ball") return Measure::ball(n, j.value("a", 0.5));
  if (kind == "box") {
    if (!j.contains("bounds")) throw std::invalid_argument("measure: box requires 'bounds'");
    std::vector<std::array<double, 2>> bounds;
    for (const auto& b : j.at("bounds")) bounds.push_back({b.at(0).get<double>(), b.at(1).get<double>()});
    return Measure::box(n, std::move(bounds));
  }
  if (kind == "ellipsoid") {
    if (!j.contains("semiaxes")) throw std::invalid_argument("measure: ellipsoid requires 'semiaxes'");
    return Measure::ellipsoid(n, j.at("semiaxes").get<std::vector<double>>());
  }
  throw std::invalid_argument("measure: unknown kind '" + kind + "'");
}

nlohmann::ordered_json family_to_json(const PointFamily& fam) {
  nlohmann::ordered_json j;
  j["n"] = fam.n;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& lvl : fam.levels) {
    nlohmann::ordered_json l;
    l["k"] = lvl.k;
    auto pts = nlohmann::ordered_json::array();
    for (const auto& p : lvl.points) pts.push_back(p);
    l["points"] = pts;
    arr.push_back(std::move(l));
  }
  j["families"] = arr;
  return j;
}

PointFamily family_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("families"))
    throw std::invalid_argument("family: expected an object with 'n' and 'families'");
  PointFamily fam;
  fam.n = j.at("n").get<int>();
  for (const auto& l : j.at("families")) {
    PointFamily::Level lvl;
    lvl.k = l.at("k").get<int>();
    for (const auto& p : l.at("points")) lvl.points.push_back(p.get<Point>());
    fam.levels.push_back(std::move(lvl));
  }
  return fam;
}

CsvWriter& CsvWriter::field(double v) {
  if (!first_) os_ << ',';
  first_ = false;
  os_ << format17(v);
  return *this;
}

CsvWriter& CsvWriter::field(int v) {
  if (!first_) os_ << ',';
  first_ = false;
  os_ << v;
  return *this;
}

CsvWriter& CsvWriter::field(long v) {
  if (!first_) os_ << ',';
  first_ = false;
  os_ << v;
  return *this;
}

CsvWriter& CsvWriter::field(const std::string& v) {
  if (!first_) os_ << ',';
  first_ = false;
  os_ << v;
  return *this;
}

void CsvWriter::endrow() {
  os_ << "\n";
  first_ = true;
}

}  // namespace mzkit
