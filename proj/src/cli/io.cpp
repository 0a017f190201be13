#include "sfpmc/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace sfpmc::io {

void write_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp + " for writing");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    f.flush();
    if (!f) {
      std::remove(tmp.c_str());
      throw std::runtime_error("write failed for " + tmp);
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw std::runtime_error("cannot rename " + tmp + " to " + path);
  }
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(const std::vector<double>& row) {
  if (row.size() != header_.size()) throw std::invalid_argument("csv row width does not match the header");
  std::string line;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) line += ',';
    line += format_double(row[i]);
  }
  rows_.push_back(std::move(line));
}

std::string CsvTable::str() const {
  std::string out;
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (i) out += ',';
    out += header_[i];
  }
  out += '\n';
  for (const auto& r : rows_) {
    out += r;
    out += '\n';
  }
  return out;
}

nlohmann::ordered_json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

nlohmann::ordered_json to_json(const BodyValidation& v) {
  return {{"is_valid", v.is_valid},
          {"min_curvature", number(v.min_curvature)},
          {"norm_equivalence", {number(v.norm_equivalence.first), number(v.norm_equivalence.second)}},
          {"gauge_equivalence", {number(v.gauge_equivalence.first), number(v.gauge_equivalence.second)}},
          {"failure_reason", v.failure_reason}};
}

nlohmann::ordered_json to_json(const ConditionReport& r) {
  nlohmann::ordered_json j = {{"curvcond_margin", number(r.curvcond_margin)},
                              {"curvcond_at", number(r.curvcond_at)},
                              {"curvcond_pass", r.curvcond_pass},
                              {"c3", number(r.c3)},
                              {"hip_evaluated", r.hip_evaluated}};
  if (r.hip_evaluated) {
    j["hip_delta"] = number(r.hip_delta);
    j["hip_pass"] = r.hip_pass;
    j["hip_worst_field"] = r.hip_worst_field;
    j["hip_fields"] = r.hip_fields;
  }
  return j;
}

nlohmann::ordered_json to_json(const TubeBounds& t) {
  return {{"kappa_max", number(t.kappa_max)}, {"mu0", number(t.mu0)}, {"c4", number(t.c4)}};
}

nlohmann::ordered_json to_json(const SolveReport& r) {
  nlohmann::ordered_json steps = nlohmann::ordered_json::array();
  for (const auto& s : r.steps)
    steps.push_back({{"eps", number(s.eps)},
                     {"eta", number(s.eta)},
                     {"newton_iterations", s.newton_iterations},
                     {"residual", number(s.residual)},
                     {"energy", number(s.energy)},
                     {"sup_norm", number(s.sup_norm)},
                     {"lipschitz", number(s.lipschitz)},
                     {"change", number(s.change)},
                     {"sigma_homotopy", s.sigma_homotopy}});
  nlohmann::ordered_json energies = nlohmann::ordered_json::array();
  for (double e : r.energy_history) energies.push_back(number(e));
  return {{"scheme", r.scheme},
          {"converged", r.converged},
          {"iterations", r.iterations},
          {"final_residual", number(r.final_residual)},
          {"residual_tolerance", number(r.residual_tolerance)},
          {"energy_history", energies},
          {"sup_norm", number(r.sup_norm)},
          {"lipschitz_norm", number(r.lipschitz_norm)},
          {"ellipticity_floor", number(r.ellipticity_floor)},
          {"warnings", r.warnings},
          {"conditions", to_json(r.conditions)},
          {"tube", to_json(r.tube)},
          {"eta0_cap", number(r.eta0_cap)},
          {"uniform_bound", number(r.uniform_bound)},
          {"blowup_flag", r.blowup_flag},
          {"final_change", number(r.final_change)},
          {"limit_energy", number(r.limit_energy)},
          {"steps", steps}};
}

nlohmann::ordered_json to_json(const BarrierReport& b) {
  return {{"k", number(b.k)},
          {"mu", number(b.mu)},
          {"upper_margin", number(b.upper_margin)},
          {"lower_margin", number(b.lower_margin)},
          {"tube_nodes", b.tube_nodes},
          {"pass", b.pass}};
}

nlohmann::ordered_json to_json(const GradientBound& g) {
  return {{"sup_interior", number(g.sup_interior)},
          {"sup_boundary", number(g.sup_boundary)},
          {"sup_f", number(g.sup_f)},
          {"margin", number(g.margin)}};
}

nlohmann::ordered_json to_json(const HeightAudit& h) {
  return {{"sup_u", number(h.sup_u)}, {"sup_phi", number(h.sup_phi)}, {"k", number(h.k)},
          {"max_d", number(h.max_d)}, {"bound", number(h.bound)},     {"pass", h.pass}};
}

nlohmann::ordered_json to_json(const WeakResidualAudit& w) {
  return {{"min_value", number(w.min_value)}, {"worst_field", w.worst_field}, {"fields", w.fields}};
}

}  // namespace sfpmc::io
