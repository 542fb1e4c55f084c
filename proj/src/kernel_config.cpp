#include "cuspbergman/kernel_config.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <stdexcept>

namespace cuspbergman {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  auto e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

}  // namespace

BaseKernel KernelSpec::build() const {
  BaseKernel core = [&] {
    if (base == "point") return BaseKernel::point(group_order, character_index);
    if (base == "theta") return BaseKernel::theta({tau_re, tau_im});
    throw std::domain_error("kernel config: base must be 'point' or 'theta'");
  }();
  if (unitaries_path.empty()) return core;
  // A unitary table turns the core kernel into a group-averaged projector.
  BaseKernel inner = (base == "point") ? BaseKernel::point() : BaseKernel::theta({tau_re, tau_im});
  return BaseKernel::projector(std::move(inner), load_projector_unitaries(unitaries_path),
                               group_order, character_index);
}

KernelSpec parse_kernel_config(std::istream& in) {
  KernelSpec spec;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::domain_error("kernel config: expected key = value at line " +
                              std::to_string(lineno));
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "base") {
        if (value != "point" && value != "theta")
          throw std::domain_error("kernel config: base must be 'point' or 'theta' (line " +
                                  std::to_string(lineno) + ")");
        spec.base = value;
      }
      else if (key == "tau_re") spec.tau_re = std::stod(value);
      else if (key == "tau_im") spec.tau_im = std::stod(value);
      else if (key == "group_order") spec.group_order = std::stoll(value);
      else if (key == "character_index") spec.character_index = std::stoll(value);
      else if (key == "unitaries") spec.unitaries_path = value;
      else throw std::domain_error("kernel config: unknown key '" + key + "'");
    } catch (const std::invalid_argument&) {
      throw std::domain_error("kernel config: bad value for '" + key + "' at line " +
                              std::to_string(lineno));
    }
  }
  return spec;
}

KernelSpec parse_kernel_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::domain_error("kernel config: cannot open " + path);
  return parse_kernel_config(in);
}

ProjectorUnitaries load_projector_unitaries(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::domain_error("unitaries: cannot open " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw std::domain_error(std::string("unitaries: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw std::domain_error("unitaries: top level must be an object");
  ProjectorUnitaries table;
  for (const auto& [key, value] : doc.items()) {
    std::int64_t q = 0;
    try {
      q = std::stoll(key);
    } catch (...) {
      throw std::domain_error("unitaries: non-numeric level key '" + key + "'");
    }
    if (q < 1) throw std::domain_error("unitaries: level keys must be positive");
    if (!value.is_array()) throw std::domain_error("unitaries: each level must be an array");
    std::vector<Eigen::MatrixXcd> mats;
    for (const auto& mat : value) {
      if (!mat.is_array()) throw std::domain_error("unitaries: matrix must be an array");
      const auto len = mat.size();
      const auto dim = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(len))));
      if (dim * dim != static_cast<Eigen::Index>(len))
        throw std::domain_error("unitaries: matrix entry count is not a square");
      Eigen::MatrixXcd u(dim, dim);
      for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < dim; ++j) {
          const auto& cell = mat[static_cast<std::size_t>(i * dim + j)];
          if (!cell.is_array() || cell.size() != 2)
            throw std::domain_error("unitaries: entries must be [re, im] pairs");
          u(i, j) = std::complex<double>(cell[0].get<double>(), cell[1].get<double>());
        }
      mats.push_back(std::move(u));
    }
    table.emplace(q, std::move(mats));
  }
  return table;
}

}  // namespace cuspbergman
