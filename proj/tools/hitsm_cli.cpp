#include "hitsm/model_io.hpp"
#include "hitsm/oracle.hpp"

#include <CLI11.hpp>

#include <iomanip>
#include <iostream>
#include <sstream>

using namespace hitsm;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kInvalid = 1, kPrecondition = 2, kIo = 3, kVerifyFailed = 4 };

struct Config {
  std::string model_path;
  std::vector<double> eps{1e-2, 1e-3, 1e-4};
  std::vector<double> s{0.5, 1, 2};
  std::size_t samples = 100000;
  std::uint64_t seed = 20240101;
  std::string format = "text";
  bool trace = false;
  std::string start;
  unsigned workers = 0;
};

std::vector<double> parse_grid(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t used = 0;
    double v = std::stod(tok, &used);
    if (used != tok.size() || !(v > 0)) throw CLI::ValidationError(what, "entries must be positive numbers");
    out.push_back(v);
  }
  if (out.empty()) throw CLI::ValidationError(what, "empty grid");
  return out;
}

std::string leading_text(const ComparableFn& f) { return to_string(cf_leading(f)); }

void print_report(const ConditionReport& r, bool as_json, std::ostream& os) {
  if (as_json) {
    json j;
    for (auto* e : r.entries()) j[e->name] = {{"pass", e->pass}, {"witnesses", e->witnesses}};
    j["pass"] = r.all_pass();
    os << j.dump(2) << '\n';
    return;
  }
  for (auto* e : r.entries()) {
    os << std::left << std::setw(20) << e->name << (e->pass ? "pass" : "FAIL") << '\n';
    for (const auto& w : e->witnesses) os << "    " << w << '\n';
  }
}

void print_hitting(const HittingResult& r, const SemiMarkovModel& m, bool expectations, std::ostream& os) {
  for (const auto& [key, e] : r.entries) {
    os << m.states[e.i] << " -> " << m.states[e.j] << "  P0=" << to_string(e.hit_prob);
    if (!expectations) {
      os << "  psi=" << lt_pretty(e.psi) << "  check_v~" << leading_text(e.check_v);
      if (e.switch_index > 0) os << "  switch=" << e.switch_index;
    } else {
      os << "  bar_E=" << to_string(e.bar_E) << "  bar_v~" << leading_text(e.bar_v) << "  E_check=" << e.E_check.str()
         << "  moment_match=" << (e.moment_match ? "yes" : "no");
    }
    os << '\n';
  }
  if (r.zero_mass_warning) os << "warning: a limit law charges zero while allow_zero_mass is off\n";
}

struct Pipeline {
  SemiMarkovModel model;
  ConditionReport report;
  ReductionTrace trace;
  HittingResult result;
};

Pipeline run_pipeline(const Config& c) {
  Pipeline p;
  p.model = load_model(c.model_path);
  p.report = validate_model(p.model);
  if (!p.report.structural_pass()) {
    print_report(p.report, false, std::cerr);
    throw PreconditionError("model violates the standing conditions");
  }
  p.trace = reduce(p.model);
  p.result = analyze(p.trace, p.model);
  return p;
}

int cmd_validate(const Config& c) {
  SemiMarkovModel m = load_model(c.model_path);
  ConditionReport r = validate_model(m);
  print_report(r, c.format == "json", std::cout);
  return r.all_pass() ? kOk : kInvalid;
}

int cmd_reduce(const Config& c) {
  SemiMarkovModel m = load_model(c.model_path);
  ConditionReport rep = validate_model(m);
  if (!rep.structural_pass()) {
    print_report(rep, false, std::cerr);
    return kInvalid;
  }
  ReductionTrace t = reduce(m);
  if (c.format == "json" || c.trace) {
    json j = trace_to_json(t, m);
    if (!c.trace) j.erase("steps");
    std::cout << j.dump(2) << '\n';
    return kOk;
  }
  std::cout << "exclusion order:";
  for (int k : t.exclusion_order) std::cout << ' ' << m.states[k];
  std::cout << "\nfinal state: " << m.states[t.final_state] << '\n';
  for (std::size_t n = 0; n < t.steps.size(); ++n) {
    const auto& st = t.steps[n];
    std::cout << "step " << n;
    if (st.excluded >= 0) std::cout << " (excluded " << m.states[st.excluded] << ")";
    std::cout << '\n';
    for (int i : st.after.alive) std::cout << "  v[" << m.states[i] << "] ~ " << leading_text(st.after.v[i]) << '\n';
  }
  return kOk;
}

int cmd_hitting(const Config& c, bool expectations) {
  Pipeline p = run_pipeline(c);
  if (c.format == "json") {
    std::cout << hitting_to_json(p.result, p.model).dump(2) << '\n';
    return kOk;
  }
  print_hitting(p.result, p.model, expectations, std::cout);
  return kOk;
}

int cmd_simulate(const Config& c) {
  Pipeline p = run_pipeline(c);
  const auto& m = p.model;
  int start = c.start.empty() ? m.exterior().front() : m.index_of(c.start);
  if (start < 0) throw PreconditionError("unknown start state '" + c.start + "'");
  double eps = c.eps.front();
  double s = c.s.size() == 1 ? c.s.front() : 1.0;
  const HittingEntry& any = p.result.at(start, p.result.targets.front());
  double check = cf_eval(any.check_v, eps);
  double bar = cf_eval(any.bar_v, eps);

  auto xs = simulate_hitting(m, eps, start, c.samples, c.seed, c.workers);
  SampleStats by_bar = sample_stats(xs, bar, s);
  SampleStats by_check = sample_stats(xs, check, s);
  FixedEpsModel f = fix_eps(m, Real(eps));
  Real exact_mean = 0, exact_tr = 0;
  auto E = exact_expectation(f);
  auto L = exact_laplace(f, Real(s) / Real(check));
  for (int j : p.result.targets) {
    exact_mean += E[start][j];
    exact_tr += L[start][j];
  }
  double em = to_double(exact_mean) / bar;
  double et = to_double(exact_tr);

  if (c.format == "json") {
    json freq = json::object();
    for (const auto& [k, v] : by_bar.entry_freq) freq[m.states[k]] = v;
    json j{{"start", m.states[start]},
           {"eps", eps},
           {"samples", c.samples},
           {"seed", c.seed},
           {"s", s},
           {"mean_over_bar_v", by_bar.mean},
           {"mean_se", by_bar.mean_se},
           {"exact_mean_over_bar_v", em},
           {"transform", by_check.transform},
           {"transform_se", by_check.transform_se},
           {"exact_transform", et},
           {"entry_freq", freq}};
    std::cout << j.dump(2) << '\n';
    return kOk;
  }
  std::cout << std::setprecision(6) << "start " << m.states[start] << ", eps " << eps << ", n " << c.samples << ", seed "
            << c.seed << '\n'
            << "mean tau/bar_v      " << by_bar.mean << " +- " << by_bar.mean_se << "  (exact " << em << ")\n"
            << "E exp(-s tau/check_v) " << by_check.transform << " +- " << by_check.transform_se << "  (exact " << et
            << ", s=" << s << ")\n";
  for (const auto& [k, v] : by_bar.entry_freq) std::cout << "entered " << m.states[k] << "  " << v << '\n';
  return kOk;
}

int cmd_verify(const Config& c) {
  SemiMarkovModel m = load_model(c.model_path);
  ConditionReport rep = validate_model(m);
  bool json_out = c.format == "json";
  if (!rep.structural_pass()) {
    print_report(rep, json_out, std::cout);
    return kInvalid;
  }
  ReductionTrace t = reduce(m);
  HittingResult r = analyze(t, m);
  ConvergenceReport conv = convergence_check(m, r, c.eps, c.s);
  bool ok = rep.all_pass() && conv.all_pass();
  if (json_out) {
    json j;
    json cond;
    for (auto* e : rep.entries()) cond[e->name] = {{"pass", e->pass}, {"witnesses", e->witnesses}};
    j["conditions"] = cond;
    j["hitting"] = hitting_to_json(r, m);
    j["convergence"] = convergence_to_json(conv, m);
    j["pass"] = ok;
    std::cout << j.dump(2) << '\n';
  } else {
    print_report(rep, false, std::cout);
    std::cout << '\n';
    print_hitting(r, m, false, std::cout);
    print_hitting(r, m, true, std::cout);
    std::cout << '\n' << convergence_to_text(conv, m) << (ok ? "verify: pass\n" : "verify: FAIL\n");
  }
  return ok ? kOk : kVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hitting-time asymptotics for perturbed semi-Markov processes"};
  app.require_subcommand(1);
  Config cfg;
  std::string eps_text, s_text;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("model", cfg.model_path, "model file (JSON)")->required();
    sub->add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"text", "json"}));
  };
  auto add_grids = [&](CLI::App* sub) {
    sub->add_option("--eps", eps_text, "comma-separated eps grid, decreasing");
    sub->add_option("--s", s_text, "comma-separated transform arguments");
  };

  auto* validate = app.add_subcommand("validate", "check the standing conditions");
  add_common(validate);
  auto* red = app.add_subcommand("reduce", "run the phase-space reduction");
  add_common(red);
  red->add_flag("--trace", cfg.trace, "emit every intermediate matrix as JSON");
  auto* hit = app.add_subcommand("hitting", "limiting transforms and hitting probabilities");
  add_common(hit);
  auto* exp = app.add_subcommand("expect", "limiting expectations of hitting times");
  add_common(exp);
  auto* sim = app.add_subcommand("simulate", "Monte Carlo hitting times at one eps");
  add_common(sim);
  add_grids(sim);
  sim->add_option("--samples", cfg.samples, "number of trajectories")->check(CLI::PositiveNumber);
  sim->add_option("--seed", cfg.seed, "RNG seed");
  sim->add_option("--start", cfg.start, "initial state label");
  sim->add_option("--workers", cfg.workers, "worker threads (0 = default)");
  auto* ver = app.add_subcommand("verify", "compare limits against the fixed-eps oracle");
  add_common(ver);
  add_grids(ver);

  try {
    app.parse(argc, argv);
    if (!eps_text.empty()) cfg.eps = parse_grid(eps_text, "--eps");
    if (!s_text.empty()) cfg.s = parse_grid(s_text, "--s");
    for (std::size_t k = 1; k < cfg.eps.size(); ++k)
      if (cfg.eps[k] >= cfg.eps[k - 1]) throw CLI::ValidationError("--eps", "grid must be strictly decreasing");
    for (double e : cfg.eps)
      if (e > 1) throw CLI::ValidationError("--eps", "values must lie in (0, 1]");
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kInvalid;
  } catch (const std::invalid_argument&) {
    std::cerr << "malformed grid\n";
    return kInvalid;
  }

  try {
    if (*validate) return cmd_validate(cfg);
    if (*red) return cmd_reduce(cfg);
    if (*hit) return cmd_hitting(cfg, false);
    if (*exp) return cmd_hitting(cfg, true);
    if (*sim) return cmd_simulate(cfg);
    if (*ver) return cmd_verify(cfg);
  } catch (const std::ios_base::failure& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kInvalid;
  } catch (const FamilyMixError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kPrecondition;
  }
  return kOk;
}
