#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "rpz/experiment.hpp"

namespace rpz {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double to_double(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0') {
    throw config_error("config key '" + key + "': bad number '" + value + "'");
  }
  return v;
}

long long to_int(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const long long v = std::strtoll(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0') {
    throw config_error("config key '" + key + "': bad integer '" + value +
                       "'");
  }
  return v;
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0') {
    throw config_error("config key '" + key + "': bad integer '" + value +
                       "'");
  }
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(trim(cur));
  out.erase(std::remove(out.begin(), out.end(), std::string()), out.end());
  return out;
}

std::vector<double> to_double_list(const std::string& key,
                                   const std::string& value) {
  std::vector<double> out;
  for (const auto& tok : split(value, ',')) out.push_back(to_double(key, tok));
  if (out.empty()) throw config_error("config key '" + key + "': empty list");
  return out;
}

std::vector<int> to_int_list(const std::string& key,
                             const std::string& value) {
  std::vector<int> out;
  for (const auto& tok : split(value, ',')) {
    out.push_back(static_cast<int>(to_int(key, tok)));
  }
  if (out.empty()) throw config_error("config key '" + key + "': empty list");
  return out;
}

using Section = std::map<std::string, std::string>;

struct RawConfig {
  Section ensemble, basis, sweep, regions, output;
};

RawConfig tokenize(const std::string& text) {
  RawConfig raw;
  Section* current = nullptr;
  std::string section_name;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t comment = line.find_first_of("#;");
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw config_error("config line " + std::to_string(lineno) +
                           ": malformed section header");
      }
      section_name = trim(line.substr(1, line.size() - 2));
      if (section_name == "ensemble") current = &raw.ensemble;
      else if (section_name == "basis") current = &raw.basis;
      else if (section_name == "sweep") current = &raw.sweep;
      else if (section_name == "regions") current = &raw.regions;
      else if (section_name == "output") current = &raw.output;
      else throw config_error("unknown config section [" + section_name + "]");
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos || current == nullptr) {
      throw config_error("config line " + std::to_string(lineno) +
                         ": expected key = value inside a section");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw config_error("config line " + std::to_string(lineno) +
                         ": empty key");
    }
    if (!current->emplace(key, value).second) {
      throw config_error("duplicate config key '" + key + "' in [" +
                         section_name + "]");
    }
  }
  return raw;
}

// take() consumes recognized keys; anything left over is rejected.
std::string take(Section& sec, const std::string& key,
                 const std::string& fallback) {
  auto it = sec.find(key);
  if (it == sec.end()) return fallback;
  std::string v = it->second;
  sec.erase(it);
  return v;
}

bool has(Section& sec, const std::string& key) {
  return sec.find(key) != sec.end();
}

void reject_leftovers(const Section& sec, const std::string& name) {
  if (!sec.empty()) {
    throw config_error("unknown config key '" + sec.begin()->first +
                       "' in [" + name + "]");
  }
}

EnsembleSpec parse_ensemble(Section sec) {
  EnsembleSpec spec;
  const std::string family = take(sec, "family", "complex-gaussian");
  spec.family = family_from_name(family);
  spec.scale = to_double("scale", take(sec, "scale", "1"));
  if (has(sec, "p")) spec.p = to_double("p", take(sec, "p", ""));
  if (has(sec, "alpha")) spec.alpha = to_double("alpha", take(sec, "alpha", ""));
  if (spec.family == Family::moving_average) {
    EnsembleSpec base;
    base.family = family_from_name(take(sec, "base", "rademacher"));
    if (has(sec, "base_p")) base.p = to_double("base_p", take(sec, "base_p", ""));
    if (has(sec, "base_alpha")) {
      base.alpha = to_double("base_alpha", take(sec, "base_alpha", ""));
    }
    spec.base = std::make_shared<EnsembleSpec>(std::move(base));
    spec.weights = to_double_list("weights", take(sec, "weights", ""));
    if (has(sec, "window")) {
      const long long w = to_int("window", take(sec, "window", ""));
      if (w != static_cast<long long>(spec.weights.size())) {
        throw config_error("window does not match the weights length");
      }
    }
  } else {
    if (has(sec, "base") || has(sec, "weights") || has(sec, "window") ||
        has(sec, "base_p") || has(sec, "base_alpha")) {
      throw config_error(
          "moving-average keys given for a non-moving-average family");
    }
  }
  reject_leftovers(sec, "ensemble");
  validate(spec);
  return spec;
}

BasisConfig parse_basis(Section sec) {
  BasisConfig basis;
  const std::string kind = take(sec, "kind", "monomial");
  if (kind == "monomial") basis.kind = BasisConfig::Kind::monomial;
  else if (kind == "szego") basis.kind = BasisConfig::Kind::szego;
  else throw config_error("unknown basis kind '" + kind + "'");
  const std::string form = take(sec, "weight.form", "constant");
  if (form == "constant") {
    basis.weight.form = WeightSpec::Form::constant;
    basis.weight.c = to_double("weight.c", take(sec, "weight.c", "1"));
  } else if (form == "trig-poly") {
    basis.weight.form = WeightSpec::Form::trig_poly;
    basis.weight.fourier =
        to_double_list("weight.fourier", take(sec, "weight.fourier", ""));
  } else {
    throw config_error("unknown weight form '" + form + "'");
  }
  reject_leftovers(sec, "basis");
  if (basis.kind == BasisConfig::Kind::szego) validate(basis.weight);
  return basis;
}

std::vector<AnnularSector> parse_sector_list(const std::string& value,
                                             double r) {
  std::vector<AnnularSector> out;
  for (const auto& tok : split(value, ';')) {
    const auto parts = split(tok, ':');
    if (parts.size() != 2) {
      throw config_error("sector_list entries must look like alpha:beta");
    }
    AnnularSector s;
    s.r = r;
    s.alpha = to_double("sector_list", parts[0]);
    s.beta = to_double("sector_list", parts[1]);
    validate(s);
    out.push_back(s);
  }
  return out;
}

std::vector<RegionSpec> parse_regions(Section sec) {
  // keys are "<index>.<field>"
  std::map<int, Section> grouped;
  for (const auto& [key, value] : sec) {
    const std::size_t dot = key.find('.');
    if (dot == std::string::npos) {
      throw config_error("region key '" + key +
                         "' must look like <index>.<field>");
    }
    const int idx = static_cast<int>(to_int(key, key.substr(0, dot)));
    grouped[idx][key.substr(dot + 1)] = value;
  }
  std::vector<RegionSpec> out;
  for (auto& [idx, fields] : grouped) {
    const std::string tag = "regions." + std::to_string(idx);
    const std::string kind = take(fields, "kind", "");
    if (kind == "sector") {
      AnnularSector s;
      s.r = to_double(tag, take(fields, "r", "0.5"));
      s.alpha = to_double(tag, take(fields, "alpha", "0"));
      s.beta = to_double(tag, take(fields, "beta", "6.283185307179586"));
      out.push_back(RegionSpec::make_sector(s));
    } else if (kind == "disk") {
      out.push_back(RegionSpec::make_disk(
          to_double(tag, take(fields, "center_theta", "0")),
          to_double(tag, take(fields, "radius", "1"))));
    } else if (kind == "polygon") {
      out.push_back(RegionSpec::make_polygon(
          to_double_list(tag, take(fields, "vertices_theta", ""))));
    } else if (kind == "annulus-complement") {
      out.push_back(RegionSpec::make_annulus_complement(
          to_double(tag, take(fields, "r", "0.5"))));
    } else {
      throw config_error("region " + std::to_string(idx) +
                         ": unknown kind '" + kind + "'");
    }
    reject_leftovers(fields, tag);
  }
  return out;
}

}  // namespace

void validate(const ExperimentConfig& cfg) {
  validate(cfg.ensemble);
  if (cfg.basis.kind == BasisConfig::Kind::szego) validate(cfg.basis.weight);
  if (cfg.degrees.empty()) throw config_error("degrees must be nonempty");
  for (std::size_t i = 0; i < cfg.degrees.size(); ++i) {
    if (cfg.degrees[i] < 1) throw config_error("degrees must be >= 1");
    if (i > 0 && cfg.degrees[i] <= cfg.degrees[i - 1]) {
      throw config_error("degrees must be strictly increasing");
    }
  }
  if (cfg.trials < 1) throw config_error("trials must be >= 1");
  if (!(cfg.t > 0)) throw config_error("t must be positive");
  if (!(cfg.r > 0 && cfg.r < 1)) throw config_error("r must lie in (0,1)");
  if (cfg.sector_count < 1 && cfg.explicit_sectors.empty()) {
    throw config_error("need at least one sector");
  }
  for (const auto& s : cfg.explicit_sectors) validate(s);
  for (const auto& rg : cfg.regions) validate(rg);
  if (cfg.threads < 0) throw config_error("threads must be >= 0");
}

ExperimentConfig parse_config_text(const std::string& text) {
  RawConfig raw = tokenize(text);
  ExperimentConfig cfg;
  cfg.ensemble = parse_ensemble(std::move(raw.ensemble));
  cfg.basis = parse_basis(std::move(raw.basis));

  Section sweep = std::move(raw.sweep);
  if (has(sweep, "degrees")) {
    cfg.degrees = to_int_list("degrees", take(sweep, "degrees", ""));
  }
  cfg.trials = static_cast<int>(
      to_int("trials", take(sweep, "trials", std::to_string(cfg.trials))));
  cfg.t = to_double("t", take(sweep, "t", "1"));
  cfg.r = to_double("r", take(sweep, "r", "0.5"));
  cfg.master_seed = to_u64("master_seed", take(sweep, "master_seed", "1"));
  cfg.sector_count = static_cast<int>(
      to_int("sectors", take(sweep, "sectors", "8")));
  cfg.sector_seed = to_u64("sector_seed", take(sweep, "sector_seed", "1"));
  if (has(sweep, "sector_list")) {
    cfg.explicit_sectors =
        parse_sector_list(take(sweep, "sector_list", ""), cfg.r);
  }
  cfg.threads =
      static_cast<int>(to_int("threads", take(sweep, "threads", "0")));
  reject_leftovers(sweep, "sweep");

  cfg.regions = parse_regions(std::move(raw.regions));

  Section output = std::move(raw.output);
  cfg.output_dir = take(output, "dir", cfg.output_dir);
  const std::string format = take(output, "format", "both");
  if (format == "csv") cfg.format = ExperimentConfig::OutputFormat::csv;
  else if (format == "json") cfg.format = ExperimentConfig::OutputFormat::json;
  else if (format == "both") cfg.format = ExperimentConfig::OutputFormat::both;
  else throw config_error("unknown output format '" + format + "'");
  reject_leftovers(output, "output");

  validate(cfg);
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

}  // namespace rpz
