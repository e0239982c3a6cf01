#include "cmf/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "cmf/errors.hpp"
#include "cmf/io.hpp"

namespace cmf {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void fail_line(int line, const std::string& what) {
  throw ConfigError("config line " + std::to_string(line) + ": " + what);
}

struct RawEntry {
  std::string value;
  int line = 0;
  bool consumed = false;
};

using Section = std::map<std::string, RawEntry>;

std::map<std::string, Section> tokenize(const std::string& text) {
  std::map<std::string, Section> sections;
  std::istringstream in(text);
  std::string line, current;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail_line(lineno, "malformed section header");
      current = trim(line.substr(1, line.size() - 2));
      if (current != "model" && current != "kernel" && current != "experiment")
        fail_line(lineno, "unknown section [" + current + "]");
      sections[current];  // a section may legitimately be empty of overrides
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail_line(lineno, "expected 'key = value'");
    if (current.empty()) fail_line(lineno, "key outside any section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail_line(lineno, "empty key");
    if (!sections[current].emplace(key, RawEntry{value, lineno, false}).second)
      fail_line(lineno, "duplicate key '" + key + "' in [" + current + "]");
  }
  return sections;
}

double parse_real(const RawEntry& e, const std::string& key) {
  const std::string& s = e.value;
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    fail_line(e.line, "field " + key + ": expected a real number, got '" + s + "'");
  return v;
}

long long parse_int(const RawEntry& e, const std::string& key) {
  const std::string& s = e.value;
  long long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    fail_line(e.line, "field " + key + ": expected an integer, got '" + s + "'");
  return v;
}

std::uint64_t parse_u64(const RawEntry& e, const std::string& key) {
  const std::string& s = e.value;
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    fail_line(e.line, "field " + key + ": expected an unsigned integer, got '" + s + "'");
  return v;
}

bool parse_bool(const RawEntry& e, const std::string& key) {
  if (e.value == "true") return true;
  if (e.value == "false") return false;
  fail_line(e.line, "field " + key + ": expected true or false, got '" + e.value + "'");
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

class SectionReader {
 public:
  SectionReader(Section* section, std::string name) : section_(section), name_(std::move(name)) {}

  bool present() const { return section_ != nullptr; }

  const RawEntry* find(const std::string& key) {
    if (!section_) return nullptr;
    const auto it = section_->find(key);
    if (it == section_->end()) return nullptr;
    it->second.consumed = true;
    return &it->second;
  }

  const RawEntry& require(const std::string& key) {
    const RawEntry* e = find(key);
    if (!e) throw ConfigError("missing " + key + " field in [" + name_ + "] section");
    return *e;
  }

  void finish() const {
    if (!section_) return;
    for (const auto& [key, entry] : *section_)
      if (!entry.consumed)
        fail_line(entry.line, "unknown key '" + key + "' in [" + name_ + "]");
  }

 private:
  Section* section_;
  std::string name_;
};

void read_model(SectionReader& sec, ModelConfig& model) {
  model.d = static_cast<int>(parse_int(sec.require("d"), "d"));
  model.T = static_cast<int>(parse_int(sec.require("T"), "T"));
  model.gamma = parse_real(sec.require("gamma"), "gamma");
  if (const RawEntry* e = sec.find("seed")) model.seed = parse_u64(*e, "seed");
  if (const RawEntry* e = sec.find("noise_kind")) {
    if (e->value == "gaussian")
      model.noise.kind = NoiseSpec::Kind::kGaussian;
    else if (e->value == "zero")
      model.noise.kind = NoiseSpec::Kind::kZero;
    else
      fail_line(e->line, "field noise_kind: expected gaussian or zero");
  }
  if (const RawEntry* e = sec.find("noise_sigma")) model.noise.sigma = parse_real(*e, "noise_sigma");
  if (const RawEntry* e = sec.find("init_sigma")) model.init.sigma = parse_real(*e, "init_sigma");
  if (const RawEntry* e = sec.find("init_mean")) {
    std::vector<double> mean;
    for (const std::string& tok : split_ws(e->value)) {
      double v = 0.0;
      const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
        fail_line(e->line, "field init_mean: expected real numbers");
      mean.push_back(v);
    }
    if (static_cast<int>(mean.size()) != model.d)
      fail_line(e->line, "field init_mean: expected " + std::to_string(model.d) + " numbers");
    model.init.mean = std::move(mean);
  }
}

void read_kernel(SectionReader& sec, KernelSpec& kernel) {
  const RawEntry& variant = sec.require("variant");
  if (variant.value == "logistic") {
    kernel = KernelSpec::logistic(parse_real(sec.require("intercept"), "intercept"),
                                  parse_real(sec.require("distance_slope"), "distance_slope"),
                                  parse_real(sec.require("persistence"), "persistence"));
  } else if (variant.value == "bounded_confidence") {
    kernel = KernelSpec::bounded_confidence(parse_real(sec.require("radius"), "radius"));
  } else if (variant.value == "constant") {
    kernel = KernelSpec::constant(parse_real(sec.require("value"), "value"));
  } else {
    fail_line(variant.line, "field variant: expected logistic, bounded_confidence or constant");
  }
  if (const RawEntry* e = sec.find("decay_constant"))
    kernel = KernelSpec(kernel.variant(), parse_real(*e, "decay_constant"));
}

void read_experiment(SectionReader& sec, ExperimentConfig& config) {
  if (const RawEntry* e = sec.find("n_grid")) {
    std::vector<int> grid;
    for (const std::string& tok : split_ws(e->value)) {
      int v = 0;
      const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
        fail_line(e->line, "field n_grid: expected integers");
      grid.push_back(v);
    }
    config.n_grid = std::move(grid);
  }
  if (const RawEntry* e = sec.find("replicates"))
    config.replicates = static_cast<int>(parse_int(*e, "replicates"));
  if (const RawEntry* e = sec.find("reference_samples"))
    config.reference_samples = static_cast<int>(parse_int(*e, "reference_samples"));
  if (const RawEntry* e = sec.find("iterations"))
    config.iterations = static_cast<int>(parse_int(*e, "iterations"));
  if (const RawEntry* e = sec.find("burn_in"))
    config.burn_in = static_cast<int>(parse_int(*e, "burn_in"));
  if (const RawEntry* e = sec.find("output_dir")) {
    if (e->value.empty()) fail_line(e->line, "field output_dir: empty path");
    config.output_dir = e->value;
  }
  if (const RawEntry* e = sec.find("statistics")) {
    std::set<std::string> stats;
    for (const std::string& tok : split_ws(e->value)) {
      if (!kKnownStatistics.contains(tok))
        fail_line(e->line, "field statistics: unknown statistic '" + tok + "'");
      stats.insert(tok);
    }
    config.statistics = std::move(stats);
  }
  if (const RawEntry* e = sec.find("fresh_iteration_noise"))
    config.fresh_iteration_noise = parse_bool(*e, "fresh_iteration_noise");
  if (const RawEntry* e = sec.find("binary_dumps"))
    config.binary_dumps = parse_bool(*e, "binary_dumps");
}

}  // namespace

void ExperimentConfig::validate() const {
  if (n_grid.empty()) throw ConfigError("experiment: n_grid must be nonempty");
  for (int n : n_grid)
    if (n < 1) throw ConfigError("experiment: n_grid entries must be positive");
  if (replicates < 1) throw ConfigError("experiment: replicates must be positive");
  if (reference_samples < 2) throw ConfigError("experiment: reference_samples must be >= 2");
  if (iterations < 0) throw ConfigError("experiment: iterations must be nonnegative");
  if (burn_in < 0 || burn_in > model.T)
    throw ConfigError("experiment: burn_in must lie in [0, T]");
  if (statistics.empty()) throw ConfigError("experiment: statistics must be nonempty");
  for (const auto& s : statistics)
    if (!kKnownStatistics.contains(s)) throw ConfigError("experiment: unknown statistic " + s);
  ModelConfig probe = model;
  probe.n = n_grid.front();
  probe.validate();
}

ExperimentConfig desk_preset() {
  ExperimentConfig c;
  c.model.d = 2;
  c.model.T = 20;
  c.model.gamma = 0.3;
  c.model.seed = 42;
  c.model.noise = {NoiseSpec::Kind::kGaussian, 1.0};
  c.model.init = {{}, 1.0};
  c.model.kernel = KernelSpec::logistic(1.0, 0.5, 1.0);
  c.n_grid = {50, 200, 800};
  c.replicates = 20;
  c.reference_samples = 1000;
  c.iterations = 10;
  c.burn_in = 10;
  return c;
}

ExperimentConfig paper_preset() {
  ExperimentConfig c = desk_preset();
  c.model.T = 100;
  c.n_grid = {10, 20, 50, 100, 200, 500, 1000};
  c.replicates = 100;
  c.reference_samples = 4000;
  c.iterations = 100;
  c.burn_in = 20;
  return c;
}

ExperimentConfig preset_by_name(const std::string& name) {
  if (name == "desk") return desk_preset();
  if (name == "paper") return paper_preset();
  throw ConfigError("unknown preset '" + name + "' (expected desk or paper)");
}

ExperimentConfig parse_config(const std::string& text, const ExperimentConfig& base) {
  ExperimentConfig config = base;
  std::map<std::string, Section> sections = tokenize(text);
  auto reader = [&](const char* name) {
    const auto it = sections.find(name);
    return SectionReader(it == sections.end() ? nullptr : &it->second, name);
  };

  SectionReader model_sec = reader("model");
  if (model_sec.present()) read_model(model_sec, config.model);
  model_sec.finish();

  SectionReader kernel_sec = reader("kernel");
  if (kernel_sec.present()) read_kernel(kernel_sec, config.model.kernel);
  kernel_sec.finish();

  SectionReader exp_sec = reader("experiment");
  if (exp_sec.present()) read_experiment(exp_sec, config);
  exp_sec.finish();

  config.validate();
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path, const ExperimentConfig& base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(std::move(buf).str(), base);
}

std::string serialize_config(const ExperimentConfig& config) {
  std::ostringstream out;
  const ModelConfig& m = config.model;
  out << "[model]\n";
  out << "d = " << m.d << "\n";
  out << "T = " << m.T << "\n";
  out << "gamma = " << format_double(m.gamma) << "\n";
  out << "seed = " << m.seed << "\n";
  out << "noise_kind = " << (m.noise.kind == NoiseSpec::Kind::kGaussian ? "gaussian" : "zero")
      << "\n";
  out << "noise_sigma = " << format_double(m.noise.sigma) << "\n";
  out << "init_sigma = " << format_double(m.init.sigma) << "\n";
  out << "init_mean =";
  for (int c = 0; c < m.d; ++c)
    out << " "
        << format_double(static_cast<std::size_t>(c) < m.init.mean.size()
                             ? m.init.mean[static_cast<std::size_t>(c)]
                             : 0.0);
  out << "\n\n";

  out << "[kernel]\n";
  if (const auto* k = std::get_if<LogisticKernel>(&m.kernel.variant())) {
    out << "variant = logistic\n";
    out << "intercept = " << format_double(k->intercept) << "\n";
    out << "distance_slope = " << format_double(k->distance_slope) << "\n";
    out << "persistence = " << format_double(k->persistence) << "\n";
  } else if (const auto* k = std::get_if<BoundedConfidenceKernel>(&m.kernel.variant())) {
    out << "variant = bounded_confidence\n";
    out << "radius = " << format_double(k->radius) << "\n";
  } else if (const auto* k = std::get_if<ConstantKernel>(&m.kernel.variant())) {
    out << "variant = constant\n";
    out << "value = " << format_double(k->value) << "\n";
  } else {
    throw ConfigError("custom kernels have no serialized form");
  }
  out << "decay_constant = " << format_double(m.kernel.decay_constant()) << "\n\n";

  out << "[experiment]\n";
  out << "n_grid =";
  for (int n : config.n_grid) out << " " << n;
  out << "\n";
  out << "replicates = " << config.replicates << "\n";
  out << "reference_samples = " << config.reference_samples << "\n";
  out << "iterations = " << config.iterations << "\n";
  out << "burn_in = " << config.burn_in << "\n";
  out << "output_dir = " << config.output_dir.string() << "\n";
  out << "statistics =";
  for (const auto& s : config.statistics) out << " " << s;
  out << "\n";
  out << "fresh_iteration_noise = " << (config.fresh_iteration_noise ? "true" : "false") << "\n";
  out << "binary_dumps = " << (config.binary_dumps ? "true" : "false") << "\n";
  return std::move(out).str();
}

}  // namespace cmf
