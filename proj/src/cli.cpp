#include "racelab/cli.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "racelab/gadgets.hpp"
#include "racelab/hb.hpp"
#include "racelab/instance.hpp"
#include "racelab/lockcover.hpp"
#include "racelab/lockset.hpp"
#include "racelab/syncp.hpp"

namespace racelab {

const std::vector<std::string>& detector_names() {
  static const std::vector<std::string> names = {"hb-lockstamp", "hb-djit",   "hb-graph",
                                                 "hb-auto",      "lockset",   "lockcover",
                                                 "syncp-oracle"};
  return names;
}

RunResult run_detector(const Trace& trace, const std::string& algo, const RunOptions& options) {
  using Clock = std::chrono::steady_clock;
  RunResult r;
  r.algo = algo;
  std::optional<TraceIndex> index;
  if (algo == "lockcover") index.emplace(trace);

  auto start = Clock::now();
  if (algo == "hb-lockstamp") {
    r.race = detect_hb_race_lockstamp(trace);
  } else if (algo == "hb-djit") {
    r.race = detect_hb_race_djit(trace);
  } else if (algo == "hb-graph") {
    r.race = detect_hb_race_graph(trace);
  } else if (algo == "hb-auto") {
    r.race = detect_hb_race_auto(trace);
  } else if (algo == "lockset") {
    r.race = detect_lockset_race(trace);
  } else if (algo == "lockcover") {
    r.race = detect_lockcover_race(trace, *index);
  } else if (algo == "syncp-oracle") {
    auto outcome = detect_syncp_race_oracle(trace, options.budget);
    r.budget_exceeded = outcome.status == SyncpOutcome::Status::BudgetExceeded;
    r.race = outcome.race;
    r.witness = outcome.witness.events;
    r.nodes = outcome.nodes;
  } else {
    throw std::invalid_argument("unknown algorithm " + algo);
  }
  r.millis = std::chrono::duration<double, std::milli>(Clock::now() - start).count();

  if (options.report_all && algo.rfind("hb-", 0) == 0) r.racy_events = hb_racy_events_djit(trace);
  return r;
}

std::string run_result_json(const Trace& trace, const RunResult& result) {
  nlohmann::ordered_json j;
  if (result.budget_exceeded) {
    j["race"] = nullptr;
    j["status"] = "budget-exceeded";
  } else {
    j["race"] = result.race.has_value();
  }
  if (result.race) {
    j["kind"] = kind_name(result.race->kind);
    j["e1"] = result.race->first;
    j["e2"] = result.race->second;
    j["var"] = trace.vars().name(result.race->var);
  }
  j["algo"] = result.algo;
  j["elapsed_ms"] = result.millis;
  j["N"] = trace.size();
  j["T"] = trace.num_threads();
  j["L"] = trace.num_locks();
  j["V"] = trace.num_vars();
  if (!result.racy_events.empty()) j["racy_events"] = result.racy_events;
  if (result.algo == "syncp-oracle") {
    j["nodes"] = result.nodes;
    if (result.race) j["witness"] = result.witness;
  }
  return j.dump() + "\n";
}

namespace {

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Instance load_instance(const std::string& path) {
  try {
    return parse_instance(read_file(path));
  } catch (const std::invalid_argument& e) {
    throw InputError(path + ": " + e.what());
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  if (s.empty()) return out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, sep);)
    if (!item.empty()) out.push_back(item);
  return out;
}

std::size_t to_size(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    auto v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw InputError("bad number for " + what + ": " + s);
  }
}

double to_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InputError("bad number for " + what + ": " + s);
  }
}

const std::vector<std::string> kGenKinds = {"ov-hb", "ov3-syncp", "ov-lockcover", "hs-lockset",
                                            "random"};

std::size_t arity_for(const std::string& kind) { return kind == "ov3-syncp" ? 3 : 2; }

Trace generate(const std::string& kind, const Instance& inst) {
  if (kind == "hs-lockset") {
    if (!std::holds_alternative<HsInstance>(inst))
      throw InputError("hs-lockset needs an hs instance");
    return gen_hs_to_lockset(std::get<HsInstance>(inst));
  }
  if (!std::holds_alternative<OvInstance>(inst)) throw InputError(kind + " needs an OV instance");
  const auto& ov = std::get<OvInstance>(inst);
  if (ov.arity() != arity_for(kind))
    throw InputError(kind + " needs an ov" + std::to_string(arity_for(kind)) + " instance");
  if (kind == "ov-hb") return gen_ov_to_hb(ov);
  if (kind == "ov3-syncp") return gen_ov3_to_syncp(ov);
  return gen_ov_to_lockcover(ov);
}

Instance random_instance(const std::string& kind, std::size_t n, std::size_t d, double density,
                         std::uint64_t seed) {
  if (kind == "hs-lockset") return random_hs_instance(n, d, density, seed);
  return random_ov_instance(arity_for(kind), n, d, density, seed);
}

// "kind:key=value,..." for bench.
struct GenSpec {
  std::string kind;
  std::map<std::string, std::string> params;

  std::string get(const std::string& key, const std::string& fallback) const {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  }
};

GenSpec parse_gen_spec(const std::string& text) {
  GenSpec spec;
  auto colon = text.find(':');
  spec.kind = text.substr(0, colon);
  if (std::find(kGenKinds.begin(), kGenKinds.end(), spec.kind) == kGenKinds.end())
    throw InputError("unknown generator " + spec.kind);
  if (colon != std::string::npos) {
    for (const auto& kv : split(text.substr(colon + 1), ',')) {
      auto eq = kv.find('=');
      if (eq == std::string::npos) throw InputError("bad generator parameter " + kv);
      spec.params[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
  }
  return spec;
}

Trace generate_for_bench(const GenSpec& spec, std::size_t size, std::uint64_t seed) {
  if (spec.kind == "random") {
    RandomTraceParams p;
    p.events = size;
    p.threads = to_size(spec.get("T", "4"), "T");
    p.locks = to_size(spec.get("L", "4"), "L");
    p.vars = to_size(spec.get("V", "8"), "V");
    p.acquire_prob = to_double(spec.get("p", "0.3"), "p");
    p.seed = seed;
    return gen_random_trace(p);
  }
  std::size_t d = to_size(spec.get("d", "8"), "d");
  double density = to_double(spec.get("density", "0.5"), "density");
  return generate(spec.kind, random_instance(spec.kind, size, d, density, seed));
}

class Cli {
 public:
  Cli(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int run(const std::vector<std::string>& args) {
    CLI::App app{"Data race detection and race-complexity gadgets"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    int code = exit_code::kDone;
    std::string file, file2, output, algo, kind, mode, instance_path, algos, gen_spec, sweep;
    bool report_all = false;
    std::uint64_t budget = kDefaultBudget, seed = 0;
    std::size_t n = 0, d = 0, events = 0, threads = 0, locks = 0, vars = 0, reps = 1;
    double density = 0.5, acquire_prob = 0.3;

    auto* validate = app.add_subcommand("validate", "Check that a trace parses and is well-formed");
    validate->add_option("FILE", file)->required();
    validate->callback([&] { code = cmd_validate(file); });

    auto* detect = app.add_subcommand("detect", "Run a race detector");
    detect->add_option("--algo", algo)->required()->check(CLI::IsMember(detector_names()));
    detect->add_option("FILE", file)->required();
    detect->add_flag("--report-all", report_all, "List every racing access (HB detectors)");
    detect->add_option("--budget", budget, "Search state limit for syncp-oracle");
    detect->callback([&] { code = cmd_detect(file, algo, RunOptions{report_all, budget}); });

    auto* gen = app.add_subcommand("gen", "Generate a trace");
    gen->add_option("KIND", kind)->required()->check(CLI::IsMember(kGenKinds));
    auto* inst_opt = gen->add_option("--instance", instance_path);
    auto* n_opt = gen->add_option("--n", n);
    auto* d_opt = gen->add_option("--d", d);
    gen->add_option("--density", density, "P(1) for random instances");
    auto* ev_opt = gen->add_option("--events", events);
    gen->add_option("--threads", threads);
    gen->add_option("--locks", locks);
    gen->add_option("--vars", vars);
    gen->add_option("--acquire-prob", acquire_prob);
    gen->add_option("--seed", seed);
    gen->add_option("-o", output)->required();
    inst_opt->excludes(n_opt)->excludes(ev_opt);
    n_opt->needs(d_opt);
    gen->callback([&] {
      code = cmd_gen(kind, instance_path, n, d, density,
                     RandomTraceParams{events, threads, locks, vars, acquire_prob, seed}, seed,
                     output);
    });

    auto* exp = app.add_subcommand("export-ov", "Export a single-variable trace as an OV instance");
    exp->add_option("FILE", file)->required();
    exp->add_option("-o", output)->required();
    exp->callback([&] { code = cmd_export(file, output); });

    auto* cert = app.add_subcommand("certify", "Emit or check a lock-set certificate");
    cert->add_option("MODE", mode)->required()->check(CLI::IsMember({"emit", "check"}));
    cert->add_option("FILE", file)->required();
    cert->add_option("CERT", file2);
    cert->callback([&] { code = cmd_certify(mode, file, file2); });

    auto* vw = app.add_subcommand("verify-witness", "Check a sync-preserving race witness");
    vw->add_option("TRACE", file)->required();
    vw->add_option("WITNESS", file2)->required();
    vw->callback([&] { code = cmd_verify_witness(file, file2); });

    auto* bench = app.add_subcommand("bench", "Time detectors over generated traces");
    bench->add_option("--algos", algos)->required();
    bench->add_option("--gen", gen_spec)->required();
    bench->add_option("--sweep", sweep)->required();
    bench->add_option("--reps", reps);
    bench->add_option("-o", output)->required();
    bench->callback([&] { code = cmd_bench(algos, gen_spec, sweep, reps, output); });

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
      app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
      out_ << app.help();
      return exit_code::kDone;
    } catch (const CLI::CallForAllHelp&) {
      out_ << app.help("", CLI::AppFormatMode::All);
      return exit_code::kDone;
    } catch (const CLI::ParseError& e) {
      err_ << e.what() << "\n";
      return exit_code::kInputError;
    } catch (const InputError& e) {
      err_ << "error: " << e.what() << "\n";
      return exit_code::kInputError;
    } catch (const ParseError& e) {
      err_ << "parse error: " << e.what() << "\n";
      return exit_code::kInputError;
    } catch (const WellFormednessError& e) {
      err_ << e.what() << "\n";
      return exit_code::kInputError;
    } catch (const std::invalid_argument& e) {
      err_ << "error: " << e.what() << "\n";
      return exit_code::kInputError;
    } catch (const std::runtime_error& e) {
      err_ << "error: " << e.what() << "\n";
      return exit_code::kInputError;
    }
    return code;
  }

 private:
  int cmd_validate(const std::string& file) {
    Trace t = load_trace(file);
    nlohmann::ordered_json j;
    j["valid"] = true;
    j["N"] = t.size();
    j["T"] = t.num_threads();
    j["L"] = t.num_locks();
    j["V"] = t.num_vars();
    out_ << j.dump() << "\n";
    return exit_code::kDone;
  }

  int cmd_detect(const std::string& file, const std::string& algo, const RunOptions& options) {
    Trace t = load_trace(file);
    RunResult r = run_detector(t, algo, options);
    out_ << run_result_json(t, r);
    return r.budget_exceeded ? exit_code::kBudgetExceeded : exit_code::kDone;
  }

  int cmd_gen(const std::string& kind, const std::string& instance_path, std::size_t n,
              std::size_t d, double density, const RandomTraceParams& params, std::uint64_t seed,
              const std::string& output) {
    Trace t;
    if (kind == "random") {
      if (!instance_path.empty() || n != 0) throw InputError("random takes --events and friends");
      if (params.events == 0 || params.threads == 0 || params.vars == 0)
        throw InputError("random needs --events, --threads and --vars");
      t = gen_random_trace(params);
    } else if (!instance_path.empty()) {
      t = generate(kind, load_instance(instance_path));
    } else {
      if (n == 0 || d == 0) throw InputError(kind + " needs --instance or --n and --d");
      t = generate(kind, random_instance(kind, n, d, density, seed));
    }
    save_trace(t, output);
    return exit_code::kDone;
  }

  int cmd_export(const std::string& file, const std::string& output) {
    Trace t = load_trace(file);
    write_file(output, write_instance(export_singlevar_to_ov(t).instance));
    return exit_code::kDone;
  }

  int cmd_certify(const std::string& mode, const std::string& file, const std::string& cert_path) {
    Trace t = load_trace(file);
    if (mode == "emit") {
      std::string json = certificate_to_json(t, emit_certificate(t));
      if (cert_path.empty()) out_ << json;
      else write_file(cert_path, json);
      return exit_code::kDone;
    }
    if (cert_path.empty()) throw InputError("certify check needs a certificate file");
    Certificate cert = certificate_from_json(t, read_file(cert_path));
    auto check = verify_certificate(t, cert);
    if (check.accepted) return exit_code::kDone;
    err_ << "rejected: " << check.reason;
    if (check.witness != kNoEvent) err_ << " at event " << check.witness;
    if (check.witness2 != kNoEvent) err_ << " and " << check.witness2;
    err_ << "\n";
    return exit_code::kRejected;
  }

  int cmd_verify_witness(const std::string& trace_path, const std::string& witness_path) {
    Trace t = load_trace(trace_path);
    RaceWitness w = witness_from_json(read_file(witness_path));
    auto check = check_race_witness(t, TraceIndex(t), w.reordering, w.e1, w.e2);
    if (check.ok) return exit_code::kDone;
    err_ << "rejected: " << check.reason;
    if (check.at != kNoEvent) err_ << " at event " << check.at;
    err_ << "\n";
    return exit_code::kRejected;
  }

  int cmd_bench(const std::string& algos, const std::string& gen_spec, const std::string& sweep,
                std::size_t reps, const std::string& output) {
    auto algo_list = split(algos, ',');
    for (const auto& a : algo_list)
      if (std::find(detector_names().begin(), detector_names().end(), a) == detector_names().end())
        throw InputError("unknown algorithm " + a);
    GenSpec spec = parse_gen_spec(gen_spec);
    std::vector<std::size_t> sizes;
    for (const auto& s : split(sweep, ',')) sizes.push_back(to_size(s, "sweep"));
    std::uint64_t base_seed = to_size(spec.get("seed", "1"), "seed");

    std::ostringstream csv;
    csv << "algo,N,T,L,V,rep,millis,race\n";
    for (std::size_t size : sizes) {
      for (std::size_t rep = 0; rep < reps; ++rep) {
        Trace t = generate_for_bench(spec, size, base_seed + rep);
        for (const auto& a : algo_list) {
          RunResult r = run_detector(t, a);
          csv << a << ',' << t.size() << ',' << t.num_threads() << ',' << t.num_locks() << ','
              << t.num_vars() << ',' << rep << ',' << r.millis << ','
              << (r.budget_exceeded ? "budget" : r.race ? "1" : "0") << '\n';
        }
      }
    }
    write_file(output, csv.str());
    return exit_code::kDone;
  }

  std::ostream& out_;
  std::ostream& err_;
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  return Cli(out, err).run(args);
}

}  // namespace racelab
