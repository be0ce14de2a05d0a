#include "rapp/harness.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace rapp {

namespace {

// Roster and intent texts the fixtures must reproduce.
const std::vector<std::string> kRoster{
    "MobilityPredictor",        "TrafficSteeringA",     "TrafficSteeringB",           "PowerSavingController",
    "SpectrumSharingOptimizer", "LatencyAwareMACScheduler", "WirelessAnomalyDetector", "MassiveMIMOBeamformer",
    "UplinkPowerControlAgent",  "BasebandPlacementScheduler", "AdmissionControlManager", "RANSlicingManagerA",
    "RANSlicingManagerB",       "URLLCGuard"};

const std::map<IntentId, std::string> kIntentTexts{
    {1, "Enhance mobility robustness for high-speed UEs."},
    {2, "Minimise RAN energy consumption during off-peak hours."},
    {3, "Guarantee sub-5 ms E2E latency for factory-automation slice."},
    {4, "Detect and mitigate wireless traffic anomalies in real time."},
    {5, "Maximise video-streaming throughput with limited spectrum."},
    {6, "Guarantee deterministic latency for URLLC under load surges."},
    {7, "Assure slice isolation with vendor-A slicing in multi-traffic scenarios."},
};

const std::map<int, std::pair<std::vector<IntentId>, std::vector<IntentId>>> kScenarios{
    {1, {{3, 4}, {2}}},
    {2, {{1, 2, 7}, {5}}},
    {3, {{2, 4, 5, 6}, {3, 7}}},
    {4, {{1, 2, 3, 4, 5, 6, 7}, {}}},
};

Json read_json(const std::filesystem::path& dir, const std::string& name) {
  std::ifstream in(dir / name, std::ios::binary);
  if (!in) throw FixtureError(name + ": cannot open " + (dir / name).string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw FixtureError(name + ": not valid JSON: " + e.what());
  }
}

template <class T>
std::vector<T> read_array(const Json& j, const std::string& name) {
  if (!j.is_array()) throw FixtureError(name + ": top level must be an array");
  std::vector<T> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    try {
      out.push_back(j[i].get<T>());
    } catch (const std::exception& e) {
      throw FixtureError(name + "[" + std::to_string(i) + "]: " + e.what());
    }
  }
  return out;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

const ScenarioSpec& Fixtures::scenario(int id) const {
  for (const auto& s : scenarios)
    if (s.id == id) return s;
  throw Error("unknown scenario " + std::to_string(id));
}

std::filesystem::path data_dir() {
  if (const char* v = std::getenv("RAPP_DATA_DIR")) return v;
  return RAPP_DEFAULT_DATA_DIR;
}

Fixtures load_fixtures(const std::filesystem::path& dir) {
  Fixtures fx;

  const Json kj = read_json(dir, "kpis.json");
  std::set<std::string> kpis;
  try {
    kpis = kj.get<std::set<std::string>>();
  } catch (const std::exception& e) {
    throw FixtureError(std::string("kpis.json: expected an array of names: ") + e.what());
  }

  auto profiles = read_array<XAppProfile>(read_json(dir, "xapps.json"), "xapps.json");
  if (profiles.size() != kExpectedXApps)
    throw FixtureError("xapps.json: expected " + std::to_string(kExpectedXApps) + " profiles, found " +
                       std::to_string(profiles.size()));
  for (std::size_t i = 0; i < profiles.size(); ++i)
    for (const auto& [k, _] : profiles[i].kpi_effects)
      if (!kpis.count(k))
        throw FixtureError("xapps.json[" + std::to_string(i) + "].kpi_effects: unknown KPI '" + k + "'");
  try {
    fx.registry = Registry(std::move(profiles), kpis);
  } catch (const Error& e) {
    throw FixtureError(std::string("xapps.json.id: ") + e.what());
  }

  auto intents = read_array<Intent>(read_json(dir, "intents.json"), "intents.json");
  if (intents.size() != kExpectedIntents)
    throw FixtureError("intents.json: expected " + std::to_string(kExpectedIntents) + " intents, found " +
                       std::to_string(intents.size()));
  for (std::size_t i = 0; i < intents.size(); ++i) {
    const auto where = "intents.json[" + std::to_string(i) + "]";
    for (const auto& [k, _] : intents[i].target_kpis)
      if (!kpis.count(k)) throw FixtureError(where + ".target_kpis: unknown KPI '" + k + "'");
    for (const auto& x : intents[i].required_xapps)
      if (!fx.registry.contains(x)) throw FixtureError(where + ".required_xapps: unknown xApp '" + x + "'");
    if (!fx.intents.emplace(intents[i].id, intents[i]).second)
      throw FixtureError(where + ".id: duplicate intent id " + std::to_string(intents[i].id));
  }

  const Json sj = read_json(dir, "scenarios.json");
  if (!sj.is_array() || sj.size() != kExpectedScenarios)
    throw FixtureError("scenarios.json: expected an array of " + std::to_string(kExpectedScenarios) + " scenarios");
  for (std::size_t i = 0; i < sj.size(); ++i) {
    const auto where = "scenarios.json[" + std::to_string(i) + "]";
    ScenarioSpec s;
    try {
      s.id = sj[i].at("id").get<int>();
      s.new_intents = sj[i].at("new_intents").get<std::vector<IntentId>>();
      s.pre_deployed_intents = sj[i].at("pre_deployed_intents").get<std::vector<IntentId>>();
    } catch (const std::exception& e) {
      throw FixtureError(where + ": " + e.what());
    }
    for (const auto* list : {&s.new_intents, &s.pre_deployed_intents})
      for (IntentId id : *list)
        if (!fx.intents.count(id)) throw FixtureError(where + ": unknown intent id " + std::to_string(id));
    for (IntentId id : s.new_intents)
      if (std::count(s.pre_deployed_intents.begin(), s.pre_deployed_intents.end(), id))
        throw FixtureError(where + ".pre_deployed_intents: intent " + std::to_string(id) + " is also new");
    for (const auto& other : fx.scenarios)
      if (other.id == s.id) throw FixtureError(where + ".id: duplicate scenario id " + std::to_string(s.id));
    fx.scenarios.push_back(std::move(s));
  }

  const Json mj = read_json(dir, "vendor_matrix.json");
  try {
    fx.matrix = mj.get<VendorCompatibilityMatrix>();
  } catch (const std::exception& e) {
    throw FixtureError(std::string("vendor_matrix.json.incompatible: ") + e.what());
  }

  const auto corpus = dir / "corpus";
  if (!std::filesystem::is_directory(corpus)) throw FixtureError("corpus/: directory missing");
  for (const auto& e : std::filesystem::directory_iterator(corpus))
    if (e.is_regular_file()) fx.corpus[e.path().filename().string()] = slurp(e.path());
  if (fx.corpus.empty()) throw FixtureError("corpus/: no documents");
  return fx;
}

Fixtures load_default_fixtures() { return load_fixtures(data_dir() / "fixtures" / "default"); }

ScenarioSolution solve_scenario(const Fixtures& fx, const ScenarioSpec& spec) {
  ScenarioSolution sol;
  for (const auto* list : {&spec.new_intents, &spec.pre_deployed_intents})
    for (IntentId id : *list) sol.truths[id] = synthesize_ground_truth(fx.intents.at(id), fx.registry, fx.matrix);
  for (IntentId id : spec.pre_deployed_intents) sol.pre.active.push_back(sol.truths.at(id));
  std::map<IntentId, Pipeline> fresh;
  for (IntentId id : spec.new_intents) fresh[id] = sol.truths.at(id);
  ConflictContext ctx{fx.registry, fx.intents, fx.matrix};
  sol.oracle = max_conflict_free_subset(fresh, sol.pre, ctx, &fresh);
  return sol;
}

std::vector<std::string> validate_fixtures(const Fixtures& fx) {
  std::vector<std::string> problems;
  std::vector<std::string> ids;
  for (const auto& x : fx.registry.profiles()) ids.push_back(x.id);
  auto roster = kRoster;
  std::sort(roster.begin(), roster.end());
  if (ids != roster) problems.push_back("xApp roster differs from the expected fourteen ids");

  for (const auto& [id, text] : kIntentTexts) {
    auto it = fx.intents.find(id);
    if (it == fx.intents.end()) problems.push_back("intent " + std::to_string(id) + " missing");
    else if (it->second.text != text) problems.push_back("intent " + std::to_string(id) + " text differs");
  }

  for (const auto& [sid, comp] : kScenarios) {
    const ScenarioSpec* s = nullptr;
    for (const auto& c : fx.scenarios)
      if (c.id == sid) s = &c;
    if (!s) {
      problems.push_back("scenario " + std::to_string(sid) + " missing");
      continue;
    }
    if (s->new_intents != comp.first || s->pre_deployed_intents != comp.second)
      problems.push_back("scenario " + std::to_string(sid) + " composition differs");
  }

  const ConflictContext ctx{fx.registry, fx.intents, fx.matrix};
  for (const auto& s : fx.scenarios) {
    const auto tag = "scenario " + std::to_string(s.id) + ": ";
    ScenarioSolution sol;
    try {
      sol = solve_scenario(fx, s);
    } catch (const Error& e) {
      problems.push_back(tag + e.what());
      continue;
    }
    std::vector<Pipeline> all;
    for (const auto& [_, p] : sol.truths) all.push_back(p);
    for (std::size_t i = 0; i < all.size(); ++i) {
      if (!validate_pipeline_structure(all[i], fx.registry).ok())
        problems.push_back(tag + "reference for intent " + std::to_string(all[i].intent_id) + " is malformed");
      std::vector<Pipeline> others;
      for (std::size_t j = 0; j < all.size(); ++j)
        if (j != i) others.push_back(all[j]);
      auto v = validity(all[i], others, ctx);
      if (!v.valid)
        problems.push_back(tag + "reference for intent " + std::to_string(all[i].intent_id) + " conflicts (" +
                           to_string(v.records.front().kind) + " on " + v.records.front().subject + ")");
    }
    if (sol.oracle.objective_value != static_cast<int>(s.new_intents.size()))
      problems.push_back(tag + "oracle objective " + std::to_string(sol.oracle.objective_value) + " below " +
                         std::to_string(s.new_intents.size()));
  }
  return problems;
}

TransportKind transport_from_string(const std::string& s) {
  if (s == "http") return TransportKind::Http;
  if (s == "mock-oracle" || s == "mock_oracle") return TransportKind::MockOracle;
  if (s == "mock-noisy" || s == "mock_noisy") return TransportKind::MockNoisy;
  throw UsageError("unknown transport '" + s + "' (expected http, mock-oracle or mock-noisy)");
}

std::string to_string(TransportKind k) {
  switch (k) {
    case TransportKind::Http: return "http";
    case TransportKind::MockOracle: return "mock-oracle";
    case TransportKind::MockNoisy: return "mock-noisy";
  }
  return "?";
}

std::unique_ptr<ChatTransport> make_transport(TransportKind kind, std::shared_ptr<const MockWorld> world,
                                              std::uint64_t seed) {
  switch (kind) {
    case TransportKind::Http: return std::make_unique<HttpTransport>(HttpConfig::from_env());
    case TransportKind::MockOracle: return std::make_unique<OracleMockTransport>(std::move(world));
    case TransportKind::MockNoisy: return std::make_unique<NoisyMockTransport>(std::move(world), seed);
  }
  throw UsageError("unknown transport");
}

Harness::Harness(Fixtures fx, std::shared_ptr<Embedder> embedder, std::optional<PromptLibrary> prompts)
    : fx_(std::move(fx)),
      embedder_(std::move(embedder)),
      store_(embedder_),
      prompts_(prompts ? std::move(*prompts) : PromptLibrary::load_default(data_dir())),
      world_(MockWorld::build(fx_.registry, fx_.intents, fx_.matrix)) {
  for (const auto& [name, text] : fx_.corpus) store_.add_document(name, text);
  for (const auto& s : fx_.scenarios) solutions_[s.id] = solve_scenario(fx_, s);
}

const ScenarioSolution& Harness::solution(int scenario) const {
  auto it = solutions_.find(scenario);
  if (it == solutions_.end()) throw Error("unknown scenario " + std::to_string(scenario));
  return it->second;
}

RunReport Harness::run(int scenario, const RunOptions& opts, ChatTransport* transport, BatchOutcome* trace) const {
  const auto& spec = fx_.scenario(scenario);
  const auto& sol = solution(scenario);

  std::unique_ptr<ChatTransport> owned;
  if (!transport) {
    owned = make_transport(opts.transport, world_, opts.seed);
    transport = owned.get();
  }

  MemoryKernel memory(embedder_);
  RunContext ctx;
  ctx.mode = opts.mode;
  ctx.batch = spec.new_intents;
  ctx.deployed = sol.pre;
  ctx.max_iterations = opts.max_iterations;
  ctx.seed = opts.seed;
  ctx.analogues_k = opts.analogues;
  const AgentEnv env{fx_.registry, fx_.intents, fx_.matrix, prompts_, &store_, memory, *transport};

  auto outcome = orchestrate_batch(ctx, env, sol.truths, sol.oracle.objective_value);

  RunReport r;
  r.scenario = scenario;
  r.mode = to_string(opts.mode);
  r.seed = opts.seed;
  r.transport = transport->descriptor();
  if (outcome.best) {
    int right = 0;
    for (IntentId id : spec.new_intents) {
      auto p = outcome.best->proposed.find(id);
      if (p != outcome.best->proposed.end() && pipelines_equal(p->second, sol.truths.at(id))) ++right;
    }
    r.generation_accuracy = static_cast<double>(right) / static_cast<double>(spec.new_intents.size());
    r.deployment_success = sol.oracle.objective_value == 0
                               ? 1.0
                               : static_cast<double>(outcome.best->score.correct_deployed) / sol.oracle.objective_value;
  }
  r.iterations_to_synthesis = outcome.iterations_to_synthesis.value_or(opts.max_iterations);
  r.iterations_to_deployment = outcome.iterations_to_deployment.value_or(opts.max_iterations);
  r.converged = outcome.converged();

  if (opts.memory_out) memory.save(*opts.memory_out);
  if (trace) *trace = std::move(outcome);
  return r;
}

namespace {

MetricSpread spread(const std::vector<double>& xs) {
  MetricSpread s;
  if (xs.empty()) return s;
  s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  s.min = *std::min_element(xs.begin(), xs.end());
  s.max = *std::max_element(xs.begin(), xs.end());
  return s;
}

std::string num(double v) { return Json(v).dump(); }

nlohmann::ordered_json report_json(const RunReport& r) {
  nlohmann::ordered_json j;
  j["scenario"] = r.scenario;
  j["mode"] = r.mode;
  j["generation_accuracy"] = r.generation_accuracy;
  j["deployment_success"] = r.deployment_success;
  j["iterations_to_synthesis"] = r.iterations_to_synthesis;
  j["iterations_to_deployment"] = r.iterations_to_deployment;
  j["converged"] = r.converged;
  j["seed"] = r.seed;
  j["transport"] = r.transport;
  return j;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

}  // namespace

std::vector<ModeSummary> compare_modes(const Harness& h, int scenario, const std::vector<Mode>& modes,
                                       TransportKind transport, const std::vector<std::uint64_t>& seeds,
                                       std::vector<RunReport>* runs) {
  if (seeds.empty()) throw UsageError("compare_modes needs at least one seed");
  std::vector<ModeSummary> rows;
  for (Mode m : modes) {
    std::vector<double> ga, ds, is, id, conv;
    for (auto seed : seeds) {
      RunOptions opts;
      opts.mode = m;
      opts.transport = transport;
      opts.seed = seed;
      auto r = h.run(scenario, opts);
      ga.push_back(r.generation_accuracy);
      ds.push_back(r.deployment_success);
      is.push_back(r.iterations_to_synthesis);
      id.push_back(r.iterations_to_deployment);
      conv.push_back(r.converged ? 1.0 : 0.0);
      if (runs) runs->push_back(std::move(r));
    }
    rows.push_back({scenario, to_string(m), seeds.size(), spread(ga), spread(ds), spread(is), spread(id),
                    spread(conv).mean});
  }
  return rows;
}

void emit_report(const std::vector<RunReport>& reports, const std::string& format, std::ostream& out) {
  if (format == "json") {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : reports) arr.push_back(report_json(r));
    out << arr.dump(2) << "\n";
  } else if (format == "csv") {
    out << kCsvHeader << "\n";
    for (const auto& r : reports)
      out << r.scenario << "," << r.mode << "," << num(r.generation_accuracy) << "," << num(r.deployment_success)
          << "," << r.iterations_to_synthesis << "," << r.iterations_to_deployment << ","
          << (r.converged ? "true" : "false") << "," << r.seed << "," << csv_field(r.transport) << "\n";
  } else {
    throw UsageError("unknown report format '" + format + "' (expected json or csv)");
  }
}

void emit_report(const std::vector<RunReport>& reports, const std::string& format, const std::filesystem::path& file) {
  std::ostringstream buf;
  emit_report(reports, format, buf);
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write report " + file.string());
  out << buf.str();
  if (!out) throw Error("failed writing report " + file.string());
}

void emit_comparison(const std::vector<ModeSummary>& rows, const std::string& format, std::ostream& out) {
  auto spread_json = [](const MetricSpread& s) {
    nlohmann::ordered_json j;
    j["mean"] = s.mean;
    j["min"] = s.min;
    j["max"] = s.max;
    return j;
  };
  if (format == "json") {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
      nlohmann::ordered_json j;
      j["scenario"] = r.scenario;
      j["mode"] = r.mode;
      j["runs"] = r.runs;
      j["generation_accuracy"] = spread_json(r.generation_accuracy);
      j["deployment_success"] = spread_json(r.deployment_success);
      j["iterations_to_synthesis"] = spread_json(r.iterations_to_synthesis);
      j["iterations_to_deployment"] = spread_json(r.iterations_to_deployment);
      j["converged_fraction"] = r.converged_fraction;
      arr.push_back(std::move(j));
    }
    out << arr.dump(2) << "\n";
  } else if (format == "csv") {
    out << "scenario,mode,runs";
    for (const char* m : {"generation_accuracy", "deployment_success", "iterations_to_synthesis",
                          "iterations_to_deployment"})
      out << "," << m << "_mean," << m << "_min," << m << "_max";
    out << ",converged_fraction\n";
    for (const auto& r : rows) {
      out << r.scenario << "," << r.mode << "," << r.runs;
      for (const auto* s : {&r.generation_accuracy, &r.deployment_success, &r.iterations_to_synthesis,
                            &r.iterations_to_deployment})
        out << "," << num(s->mean) << "," << num(s->min) << "," << num(s->max);
      out << "," << num(r.converged_fraction) << "\n";
    }
  } else {
    throw UsageError("unknown report format '" + format + "' (expected json or csv)");
  }
}

}  // namespace rapp
