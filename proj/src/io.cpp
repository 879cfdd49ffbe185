#include "lifschitz/io.hpp"

#include <array>
#include <cmath>
#include <cstdlib>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "lifschitz/errors.hpp"

namespace lifschitz::io {

using nlohmann::json;

std::string fmt(double x) {
  std::array<char, 40> buf{};
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf.data(), buf.size(), "%.*g", prec, x);
    if (!std::isfinite(x) || std::strtod(buf.data(), nullptr) == x) break;
  }
  return buf.data();
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

CsvTable& CsvTable::row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) throw ConfigurationError("csv: row width differs from header");
  rows_.push_back(std::move(cells));
  return *this;
}

std::string CsvTable::str() const {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

void CsvTable::write(const std::filesystem::path& path) const { write_text(path, str()); }

namespace {

json dist_json(const CouplingDistribution& dist) {
  using K = CouplingDistribution::Kind;
  switch (dist.kind()) {
    case K::bernoulli:
      return {{"kind", "bernoulli"}, {"p0", dist.p0()}, {"level", dist.level()}};
    case K::uniform:
      return {{"kind", "uniform"}, {"vmax", dist.vmax()}};
    case K::exponential:
      return {{"kind", "exponential"}, {"rate", dist.rate()}};
    case K::point_masses: {
      json atoms = json::array();
      for (const auto& a : dist.atoms()) atoms.push_back({a.value, a.prob});
      return {{"kind", "point_masses"}, {"atoms", atoms}};
    }
  }
  throw ConfigurationError("unknown distribution kind");
}

CouplingDistribution dist_from(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "bernoulli") return CouplingDistribution::bernoulli(j.at("p0").get<double>(), j.at("level").get<double>());
  if (kind == "uniform") return CouplingDistribution::uniform(j.at("vmax").get<double>());
  if (kind == "exponential") return CouplingDistribution::exponential(j.at("rate").get<double>());
  if (kind == "point_masses") {
    std::vector<Atom> atoms;
    for (const auto& a : j.at("atoms")) atoms.push_back({a.at(0).get<double>(), a.at(1).get<double>()});
    return CouplingDistribution::point_masses(std::move(atoms));
  }
  throw ConfigurationError("unknown distribution kind '" + kind + "'");
}

}  // namespace

std::string distribution_to_json(const CouplingDistribution& dist) { return dist_json(dist).dump(); }

CouplingDistribution distribution_from_json(const std::string& text) {
  try {
    return dist_from(json::parse(text));
  } catch (const json::exception& e) {
    throw ConfigurationError(std::string("distribution json: ") + e.what());
  }
}

std::string disorder_to_json(const DisorderField& field, bool include_values) {
  const auto& box = field.box();
  json j;
  j["dist"] = dist_json(field.dist());
  j["box"] = {{"d", box.d},
              {"lo", std::vector<std::int64_t>(box.lo.begin(), box.lo.begin() + box.d)},
              {"hi", std::vector<std::int64_t>(box.hi.begin(), box.hi.begin() + box.d)}};
  j["seed"] = field.seed();
  if (include_values || !field.regenerable())
    j["values"] = std::vector<double>(field.values().begin(), field.values().end());
  return j.dump();
}

DisorderField disorder_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    const auto dist = dist_from(j.at("dist"));
    LatticeBox box;
    box.d = j.at("box").at("d").get<int>();
    check_dimension(box.d);
    const auto lo = j.at("box").at("lo").get<std::vector<std::int64_t>>();
    const auto hi = j.at("box").at("hi").get<std::vector<std::int64_t>>();
    if (static_cast<int>(lo.size()) != box.d || static_cast<int>(hi.size()) != box.d)
      throw ConfigurationError("disorder json: box bounds must have d entries");
    for (int k = 0; k < box.d; ++k) {
      box.lo[k] = lo[k];
      box.hi[k] = hi[k];
    }
    const auto seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("values")) {
      auto values = j.at("values").get<std::vector<double>>();
      if (values.size() != box.size()) throw ConfigurationError("disorder json: value count differs from box size");
      const auto regenerated = sample_disorder(dist, box, seed);
      const bool derived = !std::equal(values.begin(), values.end(), regenerated.values().begin());
      return DisorderField(dist, box, seed, std::move(values), derived);
    }
    return sample_disorder(dist, box, seed);
  } catch (const json::exception& e) {
    throw ConfigurationError(std::string("disorder json: ") + e.what());
  }
}

CsvTable spectrum_table(const SpectrumResult& spectrum) {
  CsvTable t({"index", "eigenvalue", "residual"});
  for (std::size_t k = 0; k < spectrum.eigenvalues.size(); ++k)
    t.row({std::to_string(k + 1), fmt(spectrum.eigenvalues[k]), fmt(spectrum.residuals[k])});
  return t;
}

CsvTable density_table(const StableKernel& kernel, const std::vector<double>& ts, const std::vector<double>& zs) {
  CsvTable t({"t", "z", "value", "error_bound"});
  for (double time : ts)
    for (double z : zs) {
      const auto v = kernel.density_radial(time, z);
      t.row({fmt(time), fmt(z), fmt(v.value), fmt(v.error_bound)});
    }
  return t;
}

std::string sha256_file(const std::filesystem::path& path) {
  const std::string data = read_text(path);
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed for " + path.string());
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
  if (!f) throw std::runtime_error("write failed for " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

}  // namespace lifschitz::io
