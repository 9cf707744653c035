#include "experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <exception>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "hklab/families.hpp"
#include "hklab/io.hpp"
#include "result_store.hpp"

namespace hklab::cli {

namespace fs = std::filesystem;

namespace {

constexpr std::array<std::pair<Command, std::string_view>, 7> kCommands{{
    {Command::colength, "colength"},
    {Command::profile, "profile"},
    {Command::hn, "hn"},
    {Command::limits, "limits"},
    {Command::sandwich, "sandwich"},
    {Command::convergence, "convergence"},
    {Command::gm, "gm"},
}};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

template <class Int>
Int parse_int(std::string_view text, std::string_view what) {
  text = trim(text);
  Int value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
    throw ParseError("bad " + std::string(what) + " '" + std::string(text) + "'");
  return value;
}

std::vector<int> parse_int_list(std::string_view text, std::string_view what) {
  std::vector<int> out;
  for (auto piece : split(text, ',')) out.push_back(parse_int<int>(piece, what));
  return out;
}

// One ring/ideal pair at a fixed characteristic.
struct Target {
  std::string label;
  HypersurfaceRing ring;
  IdealSpec ideal;
  std::optional<ReferenceFamily> reference;

  std::uint64_t p() const { return ring.characteristic(); }
};

std::optional<Family> family_of(const ExperimentConfig& cfg) {
  if (!cfg.family) return std::nullopt;
  return Family::parse(*cfg.family);
}

std::vector<Target> build_targets(const ExperimentConfig& cfg) {
  if (cfg.ring && cfg.family) throw ParseError("--ring and --family are mutually exclusive");
  std::vector<Target> targets;
  if (cfg.ring) {
    if (!cfg.primes.empty()) throw ParseError("--primes cannot be combined with --ring; the ring fixes p");
    HypersurfaceRing ring = parse_ring(*cfg.ring);
    IdealSpec ideal = IdealSpec::parse(cfg.ideal, ring);
    targets.push_back({ring.canonical(), ring, ideal, std::nullopt});
    return targets;
  }
  auto family = family_of(cfg);
  if (!family) throw ParseError("one of --ring or --family is required");
  if (cfg.primes.empty()) throw ParseError("--family needs --primes");
  for (std::uint64_t p : cfg.primes) {
    HypersurfaceRing ring = family->ring(p);
    IdealSpec ideal = IdealSpec::parse(cfg.ideal, ring);
    targets.push_back({family->name(), ring, ideal, family->reference()});
  }
  return targets;
}

std::vector<int> diagonal_exponents(const ExperimentConfig& cfg) {
  if (!cfg.d.empty()) return cfg.d;
  if (auto family = family_of(cfg)) return family->exponents;
  throw ParseError("this command needs --d or a --family");
}

/// Runs fn(i) for i in [0, count) on up to `width` threads. Results are
/// collected by index and the first failure in index order is rethrown, so
/// output never depends on scheduling.
template <class T>
std::vector<T> parallel_map(std::size_t count, int width, const std::function<T(std::size_t)>& fn) {
  std::vector<std::optional<T>> slots(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, width)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  std::vector<T> out;
  for (std::size_t i = 0; i < count; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    out.push_back(std::move(*slots[i]));
  }
  return out;
}

class Runner {
 public:
  Runner(const ExperimentConfig& cfg, std::ostream& err) : cfg_(cfg), err_(err) {
    opts_.max_matrix_dim = cfg.cap;
    if (cfg.cache) store_ = std::make_unique<ResultStore>(*cfg.cache, [this](const std::string& msg) { warn(msg); });
  }

  Json execute(Command command) {
    switch (command) {
      case Command::colength: return colength_cmd();
      case Command::profile: return profile_cmd();
      case Command::hn: return hn_cmd();
      case Command::limits: return limits_cmd();
      case Command::sandwich: return sandwich_cmd();
      case Command::convergence: return convergence_cmd();
      case Command::gm: return gm_cmd();
    }
    throw ParseError("unknown command");
  }

 private:
  struct Job {
    const Target* target;
    int n;
  };

  void warn(const std::string& msg) {
    std::lock_guard lock(err_mutex_);
    err_ << "hk-lab: " << msg << '\n';
  }

  std::vector<Job> grid(const std::vector<Target>& targets) const {
    std::vector<Job> jobs;
    for (const auto& t : targets)
      for (int n : cfg_.ns) jobs.push_back({&t, n});
    return jobs;
  }

  ColengthRecord cached_colength(const Target& t, int n) {
    std::string key;
    if (store_) {
      key = ResultStore::key(t.p(), n, t.ring.canonical(), t.ideal.canonical());
      if (auto hit = store_->get(key)) {
        warn("cache hit p=" + std::to_string(t.p()) + " n=" + std::to_string(n));
        return *hit;
      }
    }
    ColengthRecord rec = frobenius_colength(t.ring, t.ideal, n, opts_);
    if (store_) store_->put(key, rec);
    return rec;
  }

  static std::int64_t power_of(std::uint64_t p, int n) {
    std::int64_t q = 1;
    for (int i = 0; i < n; ++i) q *= static_cast<std::int64_t>(p);
    return q;
  }

  void write_file(const std::string& name, const std::function<void(std::ostream&)>& body) const {
    if (!cfg_.out) return;
    fs::create_directories(*cfg_.out);
    std::ofstream f(*cfg_.out / name, std::ios::binary | std::ios::trunc);
    body(f);
    if (!f) throw std::runtime_error("cannot write " + (*cfg_.out / name).string());
  }

  void write_json(const std::string& name, const Json& j) const {
    write_file(name, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  }

  Json colength_cmd() {
    auto targets = build_targets(cfg_);
    auto jobs = grid(targets);
    auto records = parallel_map<ColengthRecord>(jobs.size(), cfg_.jobs,
                                                [&](std::size_t i) { return cached_colength(*jobs[i].target, jobs[i].n); });
    Json results = Json::array();
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      const Target& t = *jobs[i].target;
      results.push_back(Json{{"label", t.label}, {"ring", t.ring.canonical()}, {"ideal", t.ideal.canonical()}, {"record", to_json(records[i])}});
    }
    Json doc{{"command", "colength"}, {"version", kArtifactVersion}, {"results", results}};
    write_json("colength.json", doc);
    write_file("colength.csv", [&](std::ostream& os) {
      write_colength_csv_header(os);
      for (std::size_t i = 0; i < jobs.size(); ++i) write_colength_csv(os, jobs[i].target->label, records[i]);
    });
    return doc;
  }

  CohomologyProfile profile_for(const Target& t, const CurveGeometry& geom, int n) const {
    ProfileRange range;
    range.m_max = cfg_.m_max;
    return cohomology_profile(t.ring, geom, t.ideal, power_of(t.p(), n), range, opts_);
  }

  Json profile_cmd() {
    auto targets = build_targets(cfg_);
    auto jobs = grid(targets);
    auto profiles = parallel_map<CohomologyProfile>(jobs.size(), cfg_.jobs, [&](std::size_t i) {
      const Target& t = *jobs[i].target;
      return profile_for(t, curve_geometry(t.ring), jobs[i].n);
    });
    Json results = Json::array();
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      Json entry{{"label", jobs[i].target->label}, {"n", jobs[i].n}, {"profile", to_json(profiles[i])}};
      results.push_back(entry);
      write_file("profile_p" + std::to_string(profiles[i].p) + "_n" + std::to_string(jobs[i].n) + ".csv",
                 [&](std::ostream& os) { write_profile_csv(os, profiles[i]); });
    }
    Json doc{{"command", "profile"}, {"version", kArtifactVersion}, {"results", results}};
    write_json("profile.json", doc);
    return doc;
  }

  Json hn_cmd() {
    auto targets = build_targets(cfg_);
    auto jobs = grid(targets);
    auto entries = parallel_map<Json>(jobs.size(), cfg_.jobs, [&](std::size_t i) {
      const Target& t = *jobs[i].target;
      const int n = jobs[i].n;
      const CurveGeometry geom = curve_geometry(t.ring);
      const auto prof = profile_for(t, geom, n);
      const auto hn = estimate_hn_profile(prof, geom, static_cast<int>(t.ideal.size()), t.ideal.degree_sum());
      const auto report = vanishing_report(prof, hn, geom);
      const Rational from_profile = hk_from_profile(geom, hn, t.ideal.degrees());
      const ColengthRecord rec = cached_colength(t, n);
      Json entry{{"label", t.label},
                 {"p", t.p()},
                 {"n", n},
                 {"q", prof.q},
                 {"geometry", Json{{"degree", geom.degree}, {"genus", geom.genus}, {"theta", geom.theta}}},
                 {"hn", to_json(hn)},
                 {"vanishing", to_json(report)},
                 {"hk_from_profile", to_string(from_profile)},
                 {"normalized_colength", to_string(rec.normalized)},
                 {"difference", to_string(from_profile - rec.normalized)}};
      if (t.reference) entry["reference"] = to_string(reference_value(*t.reference, t.p()));
      return entry;
    });
    Json doc{{"command", "hn"}, {"version", kArtifactVersion}, {"results", Json(entries)}};
    write_json("hn.json", doc);
    return doc;
  }

  Json limits_cmd() {
    const DiagonalSpec spec(diagonal_exponents(cfg_));
    const auto lim = diagonal_limits(spec);
    Json doc{{"command", "limits"}, {"version", kArtifactVersion}, {"d", spec.exponents()}};
    doc["e_hk_infinity"] = to_string(lim.e_hk_infinity);
    doc["e_naive"] = to_string(lim.e_naive);
    Json refs = Json::array();
    auto family = family_of(cfg_);
    if (family && family->reference()) {
      for (std::uint64_t p : cfg_.primes) {
        const Rational ref = reference_value(*family->reference(), p);
        refs.push_back(Json{{"p", p}, {"reference", to_string(ref)}, {"gap", to_string(ref - lim.e_hk_infinity)}});
      }
    }
    doc["references"] = refs;
    write_json("limits.json", doc);
    return doc;
  }

  Json sandwich_cmd() {
    const DiagonalSpec spec(diagonal_exponents(cfg_));
    if (cfg_.primes.empty()) throw ParseError("sandwich needs --primes");
    std::vector<std::pair<std::uint64_t, int>> jobs;
    for (std::uint64_t p : cfg_.primes)
      for (int n : cfg_.ns) jobs.emplace_back(p, n);
    auto reports = parallel_map<SandwichReport>(jobs.size(), cfg_.jobs,
                                                [&](std::size_t i) { return sandwich_check(spec, jobs[i].first, jobs[i].second, opts_); });
    Json results = Json::array();
    for (const auto& r : reports) results.push_back(to_json(r));
    Json doc{{"command", "sandwich"}, {"version", kArtifactVersion}, {"d", spec.exponents()}, {"results", results}};
    write_json("sandwich.json", doc);
    write_file("sandwich.csv", [&](std::ostream& os) {
      os << "p,n,lower,middle,upper,width,width_times_p,lower_f,middle_f,upper_f\n";
      for (const auto& r : reports)
        os << r.record.p << ',' << r.record.n << ',' << to_string(r.lower) << ',' << to_string(r.middle) << ',' << to_string(r.upper)
           << ',' << to_string(r.width) << ',' << to_string(r.width_p) << ',' << to_double(r.lower) << ',' << to_double(r.middle)
           << ',' << to_double(r.upper) << '\n';
    });
    return doc;
  }

  Json convergence_cmd() {
    auto targets = build_targets(cfg_);
    for (const auto& t : targets)
      if (!t.reference) throw ParseError("convergence needs a family with reference values (fermat-quartic or chang-quartic)");
    auto jobs = grid(targets);
    auto rows = parallel_map<ConvergenceRow>(jobs.size(), cfg_.jobs, [&](std::size_t i) {
      const Target& t = *jobs[i].target;
      const ColengthRecord rec = cached_colength(t, jobs[i].n);
      return ConvergenceRow::make(t.p(), jobs[i].n, rec.q, rec.normalized, reference_value(*t.reference, t.p()));
    });
    Json row_json = Json::array(), fits = Json::array();
    for (const auto& r : rows) row_json.push_back(to_json(r));
    for (int n : cfg_.ns) {
      std::vector<ConvergenceRow> same_n;
      for (const auto& r : rows)
        if (r.n == n) same_n.push_back(r);
      Json fit = to_json(convergence_fit(same_n));
      fit["n"] = n;
      fits.push_back(fit);
    }
    Json doc{{"command", "convergence"}, {"version", kArtifactVersion}, {"family", targets.front().label}, {"rows", row_json}, {"fits", fits}};
    write_json("convergence.json", doc);
    write_file("convergence.csv", [&](std::ostream& os) { write_convergence_csv(os, rows); });
    return doc;
  }

  Json gm_cmd() {
    const DiagonalSpec spec(diagonal_exponents(cfg_));
    Json doc{{"command", "gm"}, {"version", kArtifactVersion}, {"d", spec.exponents()}};
    doc.update(to_json(diagonal_limits(spec)));
    write_json("gm.json", doc);
    return doc;
  }

  const ExperimentConfig& cfg_;
  std::ostream& err_;
  std::mutex err_mutex_;
  ColengthOptions opts_;
  std::unique_ptr<ResultStore> store_;
};

}  // namespace

std::string_view command_name(Command c) {
  for (const auto& [cmd, name] : kCommands)
    if (cmd == c) return name;
  return "?";
}

std::optional<Command> parse_command(std::string_view text) {
  for (const auto& [cmd, name] : kCommands)
    if (name == text) return cmd;
  return std::nullopt;
}

Settings read_config_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read config file " + path.string());
  Settings settings;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = line;
    if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    auto eq = view.find('=');
    if (eq == std::string_view::npos)
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": expected key=value");
    std::string key(trim(view.substr(0, eq)));
    std::replace(key.begin(), key.end(), '_', '-');
    if (key.starts_with("--")) key.erase(0, 2);
    settings[key] = std::string(trim(view.substr(eq + 1)));
  }
  return settings;
}

std::vector<std::uint64_t> parse_primes(std::string_view text) {
  std::vector<std::uint64_t> primes;
  for (auto piece : split(text, ',')) {
    auto dash = piece.find('-');
    if (dash == std::string_view::npos) {
      const auto p = parse_int<std::uint64_t>(piece, "prime");
      if (!is_prime(p)) throw ParseError(std::to_string(p) + " is not prime");
      primes.push_back(p);
      continue;
    }
    const auto lo = parse_int<std::uint64_t>(piece.substr(0, dash), "prime range");
    const auto hi = parse_int<std::uint64_t>(piece.substr(dash + 1), "prime range");
    if (lo > hi) throw ParseError("empty prime range '" + std::string(piece) + "'");
    for (std::uint64_t p = lo; p <= hi; ++p)
      if (is_prime(p)) primes.push_back(p);
  }
  std::sort(primes.begin(), primes.end());
  primes.erase(std::unique(primes.begin(), primes.end()), primes.end());
  return primes;
}

std::vector<std::uint64_t> filter_residues(const std::vector<std::uint64_t>& primes, std::string_view filter) {
  auto colon = filter.find(':');
  if (colon == std::string_view::npos) throw ParseError("residue filter must look like M:r1,r2");
  const auto modulus = parse_int<std::uint64_t>(filter.substr(0, colon), "residue modulus");
  if (modulus == 0) throw ParseError("residue modulus must be positive");
  std::vector<std::uint64_t> residues;
  for (auto piece : split(filter.substr(colon + 1), ',')) residues.push_back(parse_int<std::uint64_t>(piece, "residue") % modulus);
  std::vector<std::uint64_t> kept;
  for (std::uint64_t p : primes)
    if (std::find(residues.begin(), residues.end(), p % modulus) != residues.end()) kept.push_back(p);
  return kept;
}

ExperimentConfig config_from_settings(const Settings& settings) {
  static const std::vector<std::string> known{"family", "ring", "ideal", "primes", "residues", "n", "m-max", "out", "cache", "jobs", "cap", "d"};
  for (const auto& [key, value] : settings)
    if (std::find(known.begin(), known.end(), key) == known.end()) throw ParseError("unknown setting '" + key + "'");

  ExperimentConfig cfg;
  auto get = [&](const std::string& key) -> std::optional<std::string> {
    auto it = settings.find(key);
    if (it == settings.end()) return std::nullopt;
    return it->second;
  };
  if (auto v = get("family")) {
    Family::parse(*v);  // validate early
    cfg.family = *v;
  }
  if (auto v = get("ring")) cfg.ring = *v;
  if (auto v = get("ideal")) cfg.ideal = *v;
  if (auto v = get("primes")) cfg.primes = parse_primes(*v);
  if (auto v = get("residues")) cfg.primes = filter_residues(cfg.primes, *v);
  if (auto v = get("n")) {
    cfg.ns = parse_int_list(*v, "n");
    for (int n : cfg.ns)
      if (n < 1) throw ParseError("n must be at least 1");
  }
  if (auto v = get("m-max")) {
    cfg.m_max = parse_int<int>(*v, "m-max");
    if (*cfg.m_max < 0) throw ParseError("m-max must be nonnegative");
  }
  if (auto v = get("out")) cfg.out = fs::path(*v);
  if (auto v = get("cache")) cfg.cache = fs::path(*v);
  if (auto v = get("jobs")) {
    cfg.jobs = parse_int<int>(*v, "jobs");
    if (cfg.jobs < 1) throw ParseError("jobs must be at least 1");
  }
  if (auto v = get("cap")) {
    cfg.cap = parse_int<std::size_t>(*v, "cap");
    if (cfg.cap == 0) throw ParseError("cap must be positive");
  }
  if (auto v = get("d")) {
    cfg.d = parse_int_list(*v, "exponent");
    for (int e : cfg.d)
      if (e < 1) throw ParseError("exponents must be positive");
  }
  return cfg;
}

int run(const ExperimentConfig& config, Command command, std::ostream& out, std::ostream& err) {
  try {
    Runner runner(config, err);
    out << runner.execute(command).dump(2) << '\n';
    return kExitOk;
  } catch (const ParseError& e) {
    err << "hk-lab: " << e.what() << '\n';
    return kExitParse;
  } catch (const InfeasibleError& e) {
    err << "hk-lab: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const std::exception& e) {
    err << "hk-lab: " << e.what() << '\n';
    return kExitMath;
  }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hilbert-Kunz experiments over prime fields", "hk-lab"};
  app.require_subcommand(1, 1);
  app.fallthrough();

  Settings cli;
  std::vector<std::pair<std::string, CLI::Option*>> options;
  auto flag = [&](const std::string& key, const std::string& help) {
    options.emplace_back(key, app.add_option("--" + key, cli[key], help));
  };
  flag("family", "fermat-quartic | chang-quartic | buchweitz-chen | diagonal:d1,..,ds");
  flag("ring", "explicit ring, e.g. fermat:s=3,d=4,p=5 or poly:p=7,s=3,f=x^4+y^4+z^4");
  flag("ideal", "'maximal' (default) or comma-separated generators");
  flag("primes", "prime list and ranges, e.g. 3,5,7 or 5-31");
  flag("residues", "keep primes with p mod M in the list, e.g. 8:1,7");
  flag("n", "Frobenius exponents, e.g. 1,2");
  flag("m-max", "last degree of cohomology profiles");
  flag("out", "directory for CSV and JSON files");
  flag("cache", "directory of the colength result store");
  flag("jobs", "parallel (p, n) jobs");
  flag("cap", "largest matrix dimension allowed (default 5000)");
  flag("d", "diagonal exponents, e.g. 1,1,1");
  std::string config_path;
  app.add_option("--config", config_path, "key=value file mirroring the flags; flags win");

  for (const auto& [cmd, name] : kCommands) app.add_subcommand(std::string(name));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitParse;
  }

  Command command = Command::colength;
  for (auto* sub : app.get_subcommands()) command = *parse_command(sub->get_name());

  ExperimentConfig cfg;
  try {
    Settings settings;
    if (!config_path.empty()) settings = read_config_file(config_path);
    for (const auto& [key, opt] : options)
      if (opt->count() > 0) settings[key] = cli[key];
    cfg = config_from_settings(settings);
  } catch (const ParseError& e) {
    err << "hk-lab: " << e.what() << '\n';
    return kExitParse;
  }
  return run(cfg, command, out, err);
}

}  // namespace hklab::cli
