#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "sfpmc/analysis.hpp"
#include "sfpmc/pde_solver.hpp"

namespace sfpmc::io {

/// Writes `content` to `path` through a temporary file and a rename, so readers never see partial files.
void write_atomic(const std::string& path, const std::string& content);

/// Shortest round-trip decimal form of a double; "nan"/"inf" for non-finite values.
std::string format_double(double v);

/// Minimal CSV builder: fixed header, rows of numbers.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  void add_row(const std::vector<double>& row);
  std::string str() const;
  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::string> rows_;
};

nlohmann::ordered_json to_json(const BodyValidation& v);
nlohmann::ordered_json to_json(const ConditionReport& r);
nlohmann::ordered_json to_json(const TubeBounds& t);
nlohmann::ordered_json to_json(const SolveReport& r);
nlohmann::ordered_json to_json(const BarrierReport& b);
nlohmann::ordered_json to_json(const GradientBound& g);
nlohmann::ordered_json to_json(const HeightAudit& h);
nlohmann::ordered_json to_json(const WeakResidualAudit& w);

/// JSON number, or null when not finite.
nlohmann::ordered_json number(double v);

}  // namespace sfpmc::io
