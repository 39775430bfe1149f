#include "stark/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace stark {

PotentialSpec load_potential_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open potential file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw InputError("malformed potential JSON: " + std::string(e.what()));
  }
  PotentialSpec spec;
  if (!j.contains("gamma") || !j.contains("form"))
    throw InputError("potential JSON needs 'gamma' and 'form'");
  spec.gamma = j["gamma"].get<double>();
  spec.form = j["form"].get<std::string>();
  if (j.contains("coeffs")) spec.coeffs = j["coeffs"].get<std::vector<double>>();
  if (j.contains("samples")) {
    spec.sample_x = j["samples"]["x"].get<std::vector<double>>();
    spec.sample_v = j["samples"]["v"].get<std::vector<double>>();
  }
  return spec;
}

Potential load_potential(const std::string& path) {
  return make_potential(load_potential_spec(path));
}

uint64_t fnv1a64(const std::string& s) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hash_hex(uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_atomic(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write '" + tmp + "'");
    out << content;
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw InputError("cannot rename '" + tmp + "' to '" + path + "'");
}

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace stark
