#include "paternalism/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "paternalism/csv.hpp"
#include "paternalism/errors.hpp"
#include "paternalism/estimation_game.hpp"
#include "paternalism/random_utility.hpp"
#include "paternalism/region_grid.hpp"
#include "paternalism/simulation.hpp"
#include "paternalism/stats_tests.hpp"

#ifndef PATERNALISM_VERSION
#define PATERNALISM_VERSION "dev"
#endif

namespace paternalism {

const char* version() { return PATERNALISM_VERSION; }

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string provenance(std::optional<std::uint64_t> seed, std::uint64_t hash) {
  return fmt::format("# paternalism {} seed={} config={:016x}\n", version(), seed ? std::to_string(*seed) : "NA",
                     hash);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError(fmt::format("cannot open '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError(fmt::format("cannot open '{}'", path));
  return in;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DomainError(fmt::format("cannot write '{}'", path.string()));
  f << text;
  if (!f) throw DomainError(fmt::format("failed writing '{}'", path.string()));
}

// Sends text to the --output file or to stdout.
void emit(std::ostream& out, const std::string& output, const std::string& text) {
  if (output.empty()) out << text;
  else write_file(output, text);
}

std::vector<Knowledge> parse_k_grid(const std::string& text) {
  std::vector<Knowledge> grid;
  for (const auto& field : csv::split_line(text)) grid.push_back(parse_knowledge(field));
  if (grid.empty()) throw DomainError("--k-grid is empty");
  return grid;
}

struct Options {
  unsigned threads = 1;
  std::string output;

  double post_p = 0.2;
  double post_ref = 0.2;
  std::string k_grid = "0,1,2,5,10,25,50,1000,inf";
  std::optional<int> digits;

  int steps = 101;
  double eps_x = 0.0;
  double eps_y = 0.0;
  std::string preferred = "one";
  std::string svg;

  std::string input;
  double phi_init = 0.5;
  double sigma_init = 1.0;
  std::string fit_path;
  double threshold = 0.5;

  std::string config;
  std::string out_dir;
  std::optional<std::uint64_t> seed;

  std::string prop_a;
  std::string prop_b;
};

std::string posterior_table(const Options& o, std::uint64_t hash) {
  const auto grid = parse_k_grid(o.k_grid);
  std::string text = provenance(std::nullopt, hash);
  text += "k,mean,median,mode,var,mae,rmse,kl,w1\n";
  for (const auto& k : grid) {
    const auto s = posterior_summary(k, o.post_p, o.post_ref);
    auto num = [&](double v) { return csv::format_number(v, o.digits); };
    text += fmt::format("{},{},{},{},{},{},{},{},{}\n", to_string(k), num(s.mean), num(s.median),
                        s.mode ? num(*s.mode) : "", num(s.variance), num(s.mae), num(s.rmse), num(s.kl), num(s.w1));
  }
  return text;
}

std::string regions(const Options& o, std::uint64_t hash) {
  if (o.steps < 2) throw DomainError("--steps must be at least 2");
  RegionGridOptions ro;
  if (o.preferred == "one") ro.preferred = OptionId::One;
  else if (o.preferred == "two") ro.preferred = OptionId::Two;
  else throw DomainError("--preferred must be 'one' or 'two'");
  ro.threads = o.threads;
  std::optional<MistakeTemplate> mistakes;
  if (o.eps_x != 0.0 || o.eps_y != 0.0) mistakes = MistakeTemplate{o.eps_x, o.eps_y};
  if (!(o.eps_x >= 0.0 && o.eps_x <= 1.0 && o.eps_y >= 0.0 && o.eps_y <= 1.0))
    throw DomainError("--eps-x and --eps-y must lie in [0, 1]");
  const auto grid = region_grid(o.steps, o.steps, mistakes, ro);
  if (!o.svg.empty()) {
    std::ostringstream svg;
    write_region_svg(svg, grid);
    write_file(o.svg, svg.str());
  }
  std::ostringstream ss;
  ss << provenance(std::nullopt, hash);
  write_region_csv(ss, grid, o.digits);
  return ss.str();
}

std::string fit_command(const Options& o, std::uint64_t hash) {
  auto in = open_input(o.input);
  const auto rows = read_interventions(in);
  const auto obs = to_observations(rows);
  if (obs.empty()) throw DomainError("no intervened rows to fit");
  FitOptions fo;
  fo.phi_init = o.phi_init;
  fo.sigma_init = o.sigma_init;
  const auto result = fit(obs, fo);
  // JSON has no comments, so the provenance line travels as a field.
  auto j = nlohmann::ordered_json::parse(to_json(result));
  j["provenance"] = fmt::format("paternalism {} seed=NA config={:016x}", version(), hash);
  return j.dump(2) + "\n";
}

std::string predict_command(const Options& o, std::uint64_t hash) {
  const auto fitted = fit_from_json(read_file(o.fit_path));
  if (!(o.threshold >= 0.0 && o.threshold <= 1.0)) throw DomainError("--threshold must lie in [0, 1]");
  auto in = open_input(o.input);
  const auto rows = read_interventions(in);
  std::vector<InterventionRow> kept;
  for (const auto& r : rows)
    if (r.intervened) kept.push_back(r);
  const auto obs = to_observations(kept);
  const auto predicted = predict_classify(obs, fitted, o.threshold);

  std::string text = provenance(std::nullopt, hash);
  text += "ca_id,ca_pref,pi,p_impose_one,predicted,imposed\n";
  for (std::size_t i = 0; i < kept.size(); ++i) {
    const double prob = impose_probability(obs[i].ca_type, fitted.phi_hat, obs[i].pi_belief, fitted.sigma_hat);
    text += fmt::format("{},{},{},{},{},{}\n", kept[i].ca_id, kept[i].ca_pref == OptionId::One ? 1 : 2,
                        csv::format_number(kept[i].pi), csv::format_number(prob, o.digits), predicted[i] ? 1 : 2,
                        obs[i].imposed_one ? 1 : 2);
  }
  return text;
}

void simulate_command(const Options& o) {
  auto cfg = read_sim_config(read_file(o.config));
  if (o.seed) cfg.seed = *o.seed;
  const auto hash = config_hash(cfg);
  const auto panel = run_experiment(cfg);

  std::filesystem::create_directories(o.out_dir);
  const std::filesystem::path dir(o.out_dir);
  const auto header = provenance(cfg.seed, hash);
  std::ostringstream cas, choosers, rates;
  cas << header;
  write_cas_csv(cas, panel);
  choosers << header;
  write_choosers_csv(choosers, panel);
  rates << header;
  write_rates_csv(rates, intervention_rate_curve(panel));
  write_file(dir / "cas.csv", cas.str());
  write_file(dir / "choosers.csv", choosers.str());
  write_file(dir / "rates.csv", rates.str());
  write_file(dir / "config.json", nlohmann::ordered_json::parse(to_json(cfg)).dump(2) + "\n");
}

std::string prop_command(const Options& o, std::uint64_t hash) {
  const auto a = parse_proportion(o.prop_a);
  const auto b = parse_proportion(o.prop_b);
  std::string text = provenance(std::nullopt, hash);
  text += "test,chi2,df,p,degenerate\n";
  auto row = [&](const char* name, const ChiSquareResult& r) {
    text += fmt::format("{},{},1,{},{}\n", name, csv::format_number(r.chi2, o.digits),
                        csv::format_number(r.p, o.digits), r.degenerate ? 1 : 0);
  };
  row("yates", prop_test_yates(a, b));
  row("uncorrected", prop_test_uncorrected(a, b));
  return text;
}

std::string pagel_command(const Options& o, std::uint64_t hash) {
  auto in = open_input(o.input);
  const auto r = pages_l(read_rank_panel(in));
  auto num = [&](double v) { return csv::format_number(v, o.digits); };
  std::string text = provenance(std::nullopt, hash);
  text += "L,mean,variance,z,chi2,p,p_one_sided\n";
  text += fmt::format("{},{},{},{},{},{},{}\n", num(r.L), num(r.mean), num(r.variance), num(r.z), num(r.chi2),
                      num(r.p), num(r.p_one_sided));
  return text;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Self-interested paternalism: welfare regions, Estimation Game posteriors, MLE and simulation"};
  app.set_version_flag("--version", std::string(version()));
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--threads", o.threads, "Worker cap for parallel sweeps")->check(CLI::Range(1u, 1024u));

  auto add_digits = [&](CLI::App* sub) {
    sub->add_option("--digits", o.digits, "Fixed decimals for table rendering (default: full precision)")
        ->check(CLI::Range(0, 17));
  };
  auto add_output = [&](CLI::App* sub) { sub->add_option("-o,--output", o.output, "Write to this file"); };

  auto* post = app.add_subcommand("posterior-table", "Summary statistics of the marginal posterior by k");
  post->add_option("--p", o.post_p, "True loss probability")->check(CLI::Range(0.0, 1.0));
  post->add_option("--ref", o.post_ref, "Reference point for MAE and RMSE")->check(CLI::Range(0.0, 1.0));
  post->add_option("--k-grid", o.k_grid, "Comma-separated draws; 'inf' for exact knowledge");
  add_digits(post);
  add_output(post);

  auto* reg = app.add_subcommand("regions", "Optimal-policy regions over (phi, q)");
  reg->add_option("--steps", o.steps, "Grid points per axis");
  reg->add_option("--eps-x", o.eps_x, "Share choosing Two while preferring One");
  reg->add_option("--eps-y", o.eps_y, "Share choosing One while preferring Two");
  reg->add_option("--preferred", o.preferred, "CA's preferred option: one or two");
  reg->add_option("--svg", o.svg, "Also write an SVG heatmap here");
  add_digits(reg);
  add_output(reg);

  auto* fit_cmd = app.add_subcommand("fit", "Maximum-likelihood fit of (phi, sigma)");
  fit_cmd->add_option("--input", o.input, "Intervention CSV")->required();
  fit_cmd->add_option("--phi-init", o.phi_init, "Starting phi");
  fit_cmd->add_option("--sigma-init", o.sigma_init, "Starting sigma");
  add_output(fit_cmd);

  auto* pred = app.add_subcommand("predict", "Classify imposed options with a fitted model");
  pred->add_option("--input", o.input, "Intervention CSV")->required();
  pred->add_option("--fit", o.fit_path, "FitResult JSON")->required();
  pred->add_option("--threshold", o.threshold, "Probability cut-off for predicting Option One");
  add_digits(pred);
  add_output(pred);

  auto* sim = app.add_subcommand("simulate", "Seeded synthetic experiment panel");
  sim->add_option("--config", o.config, "SimConfig JSON")->required();
  sim->add_option("--out", o.out_dir, "Output directory")->required();
  sim->add_option("--seed", o.seed, "Override the config seed");

  auto* stats = app.add_subcommand("stats", "Hypothesis tests");
  stats->require_subcommand(1);
  auto* prop = stats->add_subcommand("prop", "Two-proportion chi-square test with Yates correction");
  prop->add_option("--a", o.prop_a, "successes/total")->required();
  prop->add_option("--b", o.prop_b, "successes/total")->required();
  add_digits(prop);
  add_output(prop);
  auto* pagel = stats->add_subcommand("pagel", "Page's L trend test");
  pagel->add_option("--input", o.input, "Panel CSV: one row per subject, columns in trend order")->required();
  add_digits(pagel);
  add_output(pagel);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  std::string joined;
  for (int i = 1; i < argc; ++i) {
    joined += argv[i];
    joined += '\x1f';
  }
  const auto hash = fnv1a(joined);

  try {
    if (*post) emit(out, o.output, posterior_table(o, hash));
    else if (*reg) emit(out, o.output, regions(o, hash));
    else if (*fit_cmd) emit(out, o.output, fit_command(o, hash));
    else if (*pred) emit(out, o.output, predict_command(o, hash));
    else if (*sim) simulate_command(o);
    else if (*prop) emit(out, o.output, prop_command(o, hash));
    else if (*pagel) emit(out, o.output, pagel_command(o, hash));
  } catch (const std::exception& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    err << "error: " << msg << '\n';
    return 1;
  }
  return 0;
}

}  // namespace paternalism
