#include <CLI11.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include "vigfgan/errors.hpp"
#include "vigfgan/plot.hpp"
#include "vigfgan/suites.hpp"
#include "vigfgan/toy_gan.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::map<std::string, std::set<std::string>> kAllowedKeys = {
    {"general", {"seed", "jobs"}},
    {"verify", {"suites"}},
    {"bounds", {"densities", "seed", "classes", "mu", "gamma", "q", "sigma"}},
    {"factorize", {"dims", "depths", "activations", "nets", "points", "seed"}},
    {"train",
     {"objective", "link", "gen_activation", "gen_mu", "disc_activation", "target", "optimizer", "latent", "lr",
      "batch", "steps", "seed", "disc_steps_per_gen", "weight_clip", "latent_dim", "hidden", "eval_every",
      "kde_samples", "holdout_samples"}},
    {"sweep", {"experiments", "steps", "eval_every", "kde_samples", "seeds", "target"}},
    {"game", {"signatures", "q", "z"}},
    {"plot", {"inputs"}},
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    const auto b = item.find_first_not_of(" \t"), e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

class Config {
 public:
  Config() = default;
  explicit Config(const std::string& path) {
    if (!fs::exists(path)) throw ConfigError("config file not found: " + path);
    try {
      boost::property_tree::ini_parser::read_ini(path, tree_);
    } catch (const boost::property_tree::ini_parser_error& e) {
      throw ConfigError("cannot parse config: " + std::string(e.what()));
    }
    for (const auto& [section, body] : tree_) {
      if (!body.data().empty()) throw ConfigError("config key '" + section + "' must live in a [section]");
      const auto it = kAllowedKeys.find(section);
      if (it == kAllowedKeys.end()) throw ConfigError("unknown config section '" + section + "'");
      for (const auto& kv : body)
        if (!it->second.count(kv.first)) throw ConfigError("unknown config key '" + section + "." + kv.first + "'");
    }
  }

  std::optional<std::string> raw(const std::string& section, const std::string& key) const {
    const auto v = tree_.get_optional<std::string>(boost::property_tree::ptree::path_type(section + "/" + key, '/'));
    if (!v) return std::nullopt;
    return *v;
  }

  template <class T>
  T get(const std::string& section, const std::string& key, T fallback) const {
    const auto v = raw(section, key);
    if (!v) return fallback;
    return parse<T>(section + "." + key, *v);
  }

  template <class T>
  std::vector<T> list(const std::string& section, const std::string& key, std::vector<T> fallback) const {
    const auto v = raw(section, key);
    if (!v) return fallback;
    std::vector<T> out;
    for (const auto& item : split_list(*v)) out.push_back(parse<T>(section + "." + key, item));
    if (out.empty()) throw ConfigError("empty list for config key '" + section + "." + key + "'");
    return out;
  }

 private:
  template <class T>
  static T parse(const std::string& name, const std::string& s) {
    if constexpr (std::is_same_v<T, std::string>) {
      if (s.empty()) throw ConfigError("empty value for config key '" + name + "'");
      return s;
    } else {
      std::istringstream is(s);
      T v{};
      is >> v;
      if (s.empty() || is.fail() || !(is >> std::ws).eof())
        throw ConfigError("invalid value '" + s + "' for config key '" + name + "'");
      return v;
    }
  }

  boost::property_tree::ptree tree_;
};

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Run {
  std::string command;
  std::string config_path;
  Config cfg;
  std::optional<std::uint64_t> seed;
  fs::path out;
  int jobs = 1;
  std::string filter;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  json summary = json::object();

  void write(const std::string& name, const std::string& text) {
    const auto path = out / name;
    std::ofstream f(path, std::ios::binary);
    f << text;
    if (!f) throw std::runtime_error("cannot write " + path.string());
    outputs.push_back(name);
  }

  std::uint64_t seed_or(const std::string& section, std::uint64_t fallback) const {
    if (seed) return *seed;
    return cfg.get<std::uint64_t>(section, "seed", cfg.get<std::uint64_t>("general", "seed", fallback));
  }
};

std::vector<std::string> filtered(const std::vector<std::string>& all, const std::string& filter, const char* what) {
  if (filter.empty()) return all;
  std::vector<std::string> out;
  for (const auto& f : split_list(filter)) {
    if (std::find(all.begin(), all.end(), f) == all.end()) throw ConfigError(std::string("unknown ") + what + " '" + f + "' in --filter");
    out.push_back(f);
  }
  return out;
}

int cmd_verify(Run& r) {
  auto names = r.cfg.list<std::string>("verify", "suites", vig::verify_suite_names());
  for (const auto& n : names)
    if (std::find(vig::verify_suite_names().begin(), vig::verify_suite_names().end(), n) ==
        vig::verify_suite_names().end())
      throw ConfigError("unknown suite '" + n + "' in config key 'verify.suites'");
  names = filtered(names, r.filter, "suite");
  std::vector<vig::CheckRow> rows(names.size());
  vig::parallel_for(static_cast<int>(names.size()), r.jobs, [&](int i) { rows[i] = vig::run_verify_suite(names[i]); });
  int failed = 0;
  for (const auto& row : rows) {
    std::cout << (row.pass ? "PASS " : "FAIL ") << row.suite << " gap=" << vig::fmt_double(row.gap) << "\n";
    failed += !row.pass;
  }
  r.write("verify.csv", vig::verify_csv(rows));
  r.summary = {{"checks", rows.size()}, {"failed", failed}};
  return failed ? 1 : 0;
}

int cmd_bounds(Run& r) {
  vig::BoundsOptions o;
  o.densities = r.cfg.get<int>("bounds", "densities", o.densities);
  if (o.densities < 1) throw ConfigError("config key 'bounds.densities' must be >= 1");
  o.seed = r.seed_or("bounds", o.seed);
  o.classes = r.cfg.list<std::string>("bounds", "classes", o.classes);
  for (const auto& c : o.classes)
    if (std::find(vig::bounds_class_names().begin(), vig::bounds_class_names().end(), c) == vig::bounds_class_names().end())
      throw ConfigError("unknown class '" + c + "' in config key 'bounds.classes'");
  o.classes = filtered(o.classes, r.filter, "class");
  o.mu = r.cfg.list<double>("bounds", "mu", o.mu);
  o.gamma = r.cfg.list<double>("bounds", "gamma", o.gamma);
  o.q = r.cfg.list<double>("bounds", "q", o.q);
  o.sigma = r.cfg.list<double>("bounds", "sigma", o.sigma);
  const auto t = vig::bounds_table(o);
  r.write("bounds.csv", t.csv);
  std::cout << t.rows << " rows, " << t.violations << " violations\n";
  r.summary = {{"rows", t.rows}, {"violations", t.violations}};
  return t.violations ? 1 : 0;
}

int cmd_factorize(Run& r) {
  vig::FactorizeOptions o;
  o.dims = r.cfg.list<int>("factorize", "dims", o.dims);
  o.depths = r.cfg.list<int>("factorize", "depths", o.depths);
  o.activations = r.cfg.list<std::string>("factorize", "activations", o.activations);
  o.activations = filtered(o.activations, r.filter, "activation");
  o.nets = r.cfg.get<int>("factorize", "nets", o.nets);
  o.points = r.cfg.get<int>("factorize", "points", o.points);
  o.seed = r.seed_or("factorize", o.seed);
  for (int d : o.dims)
    if (d < 1 || d > 3) throw ConfigError("config key 'factorize.dims' accepts 1..3");
  for (int L : o.depths)
    if (L < 1) throw ConfigError("config key 'factorize.depths' must be >= 1");
  const auto t = vig::factorize_table(o);
  r.write("factorize.csv", t.csv);
  const bool ok = t.max_gap <= o.tolerance;
  std::cout << t.rows << " points, max relative gap " << vig::fmt_double(t.max_gap) << (ok ? " PASS" : " FAIL") << "\n";
  r.summary = {{"rows", t.rows}, {"max_gap", t.max_gap}, {"tolerance", o.tolerance}};
  return ok ? 0 : 1;
}

vig::TrainConfig train_config(const Run& r) {
  const auto& c = r.cfg;
  const auto obj = vig::objective_from_string(c.get<std::string>("train", "objective", "gan"));
  auto t = vig::TrainConfig::defaults(obj);
  if (auto l = c.raw("train", "link")) t.link = vig::link_from_string(*l);
  t.gen_activation = c.get("train", "gen_activation", t.gen_activation);
  t.gen_mu = c.get("train", "gen_mu", t.gen_mu);
  t.disc_activation = c.get("train", "disc_activation", t.disc_activation);
  t.target = c.get("train", "target", t.target);
  t.optimizer = c.get("train", "optimizer", t.optimizer);
  t.latent = c.get("train", "latent", t.latent);
  t.lr = c.get("train", "lr", t.lr);
  t.batch = c.get("train", "batch", t.batch);
  t.steps = c.get("train", "steps", t.steps);
  t.disc_steps_per_gen = c.get("train", "disc_steps_per_gen", t.disc_steps_per_gen);
  t.weight_clip = c.get("train", "weight_clip", t.weight_clip);
  t.latent_dim = c.get("train", "latent_dim", t.latent_dim);
  t.hidden = c.get("train", "hidden", t.hidden);
  t.eval_every = c.get("train", "eval_every", t.eval_every);
  t.kde_samples = c.get("train", "kde_samples", t.kde_samples);
  t.holdout_samples = c.get("train", "holdout_samples", t.holdout_samples);
  t.seed = r.seed_or("train", 0);
  t.validate();
  return t;
}

int cmd_train(Run& r) {
  vig::TrainConfig cfg;
  try {
    cfg = train_config(r);
  } catch (const vig::Error& e) {
    throw ConfigError(std::string("invalid [train] config: ") + e.what());
  }
  const auto rep = vig::train(cfg);
  std::ostringstream os;
  os << "step,kde_loglik,bandwidth,disc_loss,gen_loss,degenerate\n";
  for (const auto& c : rep.checkpoints)
    os << c.step << ',' << vig::fmt_double(c.kde_loglik) << ',' << vig::fmt_double(c.bandwidth) << ','
       << vig::fmt_double(c.disc_loss) << ',' << vig::fmt_double(c.gen_loss) << ',' << (c.degenerate ? "true" : "false")
       << '\n';
  r.write("train.csv", os.str());
  std::cout << "status " << rep.status << ", best kde " << vig::fmt_double(rep.best_kde) << " at step " << rep.best_step
            << "\n";
  r.summary = {{"status", rep.status},
               {"best_step", rep.best_step},
               {"best_kde_loglik", rep.best_kde},
               {"objective", vig::to_string(cfg.objective)},
               {"link", vig::to_string(cfg.link)},
               {"kde_samples", cfg.kde_samples},
               {"kde_note", "KDE is fit on kde_samples 2-D model samples per checkpoint"}};
  return rep.status == "ok" ? 0 : 1;
}

int cmd_sweep(Run& r) {
  vig::SweepOptions o;
  o.steps = r.cfg.get("sweep", "steps", o.steps);
  o.eval_every = r.cfg.get("sweep", "eval_every", o.eval_every);
  o.kde_samples = r.cfg.get("sweep", "kde_samples", o.kde_samples);
  o.target = r.cfg.get("sweep", "target", o.target);
  o.seeds = r.cfg.list<std::uint64_t>("sweep", "seeds", o.seeds);
  if (r.seed) o.seeds = {*r.seed, *r.seed + 1, *r.seed + 2};
  if (o.steps < 0 || o.eval_every < 1 || o.kde_samples < 100)
    throw ConfigError("config keys 'sweep.steps' >= 0, 'sweep.eval_every' >= 1, 'sweep.kde_samples' >= 100");
  try {
    vig::make_target(o.target);
  } catch (const vig::UnknownTarget&) {
    throw ConfigError("unknown target '" + o.target + "' in config key 'sweep.target'");
  }
  auto exps = r.cfg.list<std::string>("sweep", "experiments", {"A", "B"});
  for (const auto& e : exps)
    if (e != "A" && e != "B") throw ConfigError("unknown experiment '" + e + "' in config key 'sweep.experiments'");
  exps = filtered(exps, r.filter, "experiment");
  o.jobs = r.jobs;
  o.progress = [](const std::string& s) { std::cerr << s << "\n"; };
  int diverged = 0;
  for (const auto& e : exps) {
    const auto t = e == "A" ? vig::experiment_A(o) : vig::experiment_B(o);
    const std::string base = e == "A" ? "experiment_a" : "experiment_b";
    r.write(base + ".csv", t.runs);
    r.write(base + (e == "A" ? "_summary.csv" : "_paired.csv"), t.summary);
    diverged += t.diverged;
  }
  r.summary = {{"diverged", diverged},
               {"steps", o.steps},
               {"seeds", o.seeds},
               {"kde_samples", o.kde_samples},
               {"kde_note", "KDE is fit on kde_samples 2-D model samples per checkpoint"}};
  return diverged ? 1 : 0;
}

int cmd_game(Run& r) {
  vig::GameOptions o;
  o.signatures = r.cfg.list<std::string>("game", "signatures", o.signatures);
  if (!r.filter.empty()) o.signatures = split_list(r.filter);
  for (const auto& s : o.signatures) try {
      vig::signature_by_spec(s);
    } catch (const std::exception& e) {
      throw ConfigError("bad signature '" + s + "' in config key 'game.signatures': " + e.what());
    }
  o.q = r.cfg.list<double>("game", "q", o.q);
  o.z = r.cfg.list<double>("game", "z", o.z);
  for (double v : o.q)
    if (!(v > 0)) throw ConfigError("config key 'game.q' needs positive values");
  for (double v : o.z)
    if (!(v > 0)) throw ConfigError("config key 'game.z' needs positive values");
  const auto t = vig::game_table(o);
  r.write("risk_table.csv", t.csv);
  std::cout << t.rows << " rows, " << t.skipped << " undefined points skipped\n";
  r.summary = {{"rows", t.rows}, {"skipped", t.skipped}};
  return 0;
}

int cmd_plot(Run& r) {
  auto inputs = r.inputs;
  if (inputs.empty()) inputs = r.cfg.list<std::string>("plot", "inputs", {});
  if (inputs.empty()) {
    for (const auto& e : fs::directory_iterator(r.out))
      if (e.path().extension() == ".csv") inputs.push_back(e.path().string());
    std::sort(inputs.begin(), inputs.end());
  }
  if (inputs.empty()) throw ConfigError("nothing to plot: no CSV inputs");
  int plots = 0;
  for (const auto& in : inputs) {
    if (!r.filter.empty() && fs::path(in).filename().string().find(r.filter) == std::string::npos) continue;
    std::ifstream f(in, std::ios::binary);
    if (!f) throw ConfigError("cannot read plot input " + in);
    std::stringstream ss;
    ss << f.rdbuf();
    for (const auto& svg : vig::plot_csv(fs::path(in).stem().string(), ss.str())) {
      r.write(svg.name, svg.svg);
      ++plots;
    }
  }
  std::cout << plots << " plots\n";
  r.summary = {{"plots", plots}};
  return 0;
}

void write_manifest(Run& r, const std::string& started, int code) {
  json m = {{"command", r.command},
            {"config", r.config_path},
            {"seed", r.seed ? json(*r.seed) : json(nullptr)},
            {"version", kVersion},
            {"started", started},
            {"finished", utc_now()},
            {"outputs", r.outputs},
            {"exit_code", code},
            {"pass", code == 0},
            {"summary", r.summary}};
  const std::string name = r.command + "_manifest.json";
  std::ofstream(r.out / name) << m.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vig-f-GAN verification and experiment runner"};
  app.set_version_flag("--version", kVersion);
  Run run;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  app.add_option("--config", run.config_path, "INI config file");
  app.add_option("--seed", seed, "override every seed in the config");
  app.add_option("--out", out, "output directory (VIGFGAN_OUT overrides)");
  auto* jobs_opt = app.add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--filter", run.filter, "restrict to a suite, class, activation, experiment or file");
  app.require_subcommand(1, 1);

  const std::vector<std::pair<std::string, std::string>> cmds = {
      {"verify", "identity and divergence checks -> verify.csv"},
      {"bounds", "penalty bound sweeps -> bounds.csv"},
      {"factorize", "escort factorization vs change of variables -> factorize.csv"},
      {"train", "one toy GAN run -> train.csv"},
      {"sweep", "experiments A and B -> experiment_a.csv, experiment_b.csv"},
      {"game", "risk-aversion table -> risk_table.csv"},
      {"plot", "CSV -> SVG"}};
  for (const auto& [name, help] : cmds) {
    auto* sub = app.add_subcommand(name, help);
    sub->fallthrough();
    if (name == "plot") sub->add_option("inputs", run.inputs, "CSV files (default: every CSV in the output dir)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  run.command = app.get_subcommands().front()->get_name();
  run.seed = seed;
  run.jobs = jobs;
  if (const char* env = std::getenv("VIGFGAN_OUT"); env && *env) out = env;
  run.out = out;

  const std::string started = utc_now();
  int code = 0;
  try {
    if (!run.config_path.empty()) run.cfg = Config(run.config_path);
    if (!jobs_opt->count()) run.jobs = run.cfg.get<int>("general", "jobs", run.jobs);
    if (run.jobs < 1) throw ConfigError("config key 'general.jobs' must be >= 1");
    fs::create_directories(run.out);
    if (run.command == "verify") code = cmd_verify(run);
    else if (run.command == "bounds") code = cmd_bounds(run);
    else if (run.command == "factorize") code = cmd_factorize(run);
    else if (run.command == "train") code = cmd_train(run);
    else if (run.command == "sweep") code = cmd_sweep(run);
    else if (run.command == "game") code = cmd_game(run);
    else code = cmd_plot(run);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    code = 1;
  }
  try {
    write_manifest(run, started, code);
  } catch (const std::exception& e) {
    std::cerr << "error writing manifest: " << e.what() << "\n";
    return 1;
  }
  return code;
}
