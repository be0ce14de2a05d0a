#include "rapp/agents.hpp"

#include <algorithm>
#include <cctype>

namespace rapp {

std::string to_string(Mode m) {
  switch (m) {
    case Mode::F5: return "F5";
    case Mode::SA: return "SA";
    case Mode::NR: return "NR";
    case Mode::NP: return "NP";
    case Mode::FCFS: return "FCFS";
  }
  return "?";
}

Mode mode_from_string(const std::string& s) {
  std::string u;
  for (char c : s) u.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  for (Mode m : {Mode::F5, Mode::SA, Mode::NR, Mode::NP, Mode::FCFS})
    if (to_string(m) == u) return m;
  throw Error("unknown mode '" + s + "' (expected f5, sa, nr, np or fcfs)");
}

bool uses_perception(Mode m) { return m == Mode::F5 || m == Mode::NR || m == Mode::FCFS; }
bool uses_refinement(Mode m) { return m == Mode::F5 || m == Mode::NP || m == Mode::FCFS; }

namespace {

Json policy_json(const Pipeline& p) { return to_json(to_policy_doc(p)); }

Json policies_json(const std::vector<const Pipeline*>& ps) {
  Json arr = Json::array();
  for (const auto* p : ps) arr.push_back(policy_json(*p));
  return arr;
}

Json deployed_json(const RunContext& ctx) {
  Json arr = Json::array();
  for (const auto& p : ctx.deployed.active) arr.push_back(policy_json(p));
  return arr;
}

Json retrieved_json(const std::vector<ScoredChunk>& chunks) {
  Json arr = Json::array();
  for (const auto& c : chunks)
    arr.push_back({{"doc_id", c.chunk->doc_id},
                   {"start", c.chunk->span.start},
                   {"end", c.chunk->span.end},
                   {"text", c.chunk->text}});
  return arr;
}

Json analogues_json(const std::vector<Analogue>& as) {
  Json arr = Json::array();
  for (const auto& a : as)
    arr.push_back({{"intent_id", a.intent.id}, {"intent_text", a.intent.text}, {"policy", policy_json(a.pipeline)}});
  return arr;
}

Json current_json(const IntentView& v) { return v.current ? policy_json(*v.current) : Json(nullptr); }

/// Sends the prompt, then at most one repair prompt carrying the parser's complaints.
template <class T, class Parse>
std::optional<T> call_with_repair(AgentRole role, IntentId intent, const RunContext& ctx, const AgentEnv& env,
                                  const Json& payload, Parse parse, std::vector<CallRecord>& log) {
  CallRecord rec{ctx.iteration, role, intent, 0, false, {}};
  ChatRequest req{env.transport.model(),
                  {{"system", env.prompts.system_prompt(role, env.registry)},
                   {"user", env.prompts.user_prompt(role, payload)}},
                  std::nullopt};
  std::optional<T> result;
  try {
    for (int attempt = 1; attempt <= 2 && !result; ++attempt) {
      rec.attempts = attempt;
      const auto reply = env.transport.complete(req);
      Parsed<T> parsed = parse(reply.content);
      if (parsed.ok()) {
        result = std::move(parsed.value);
        rec.errors.clear();
      } else {
        rec.errors = parsed.errors;
        req.messages.push_back({"assistant", reply.content});
        req.messages.push_back({"user", env.prompts.repair_prompt(parsed.errors)});
      }
    }
  } catch (const TransportError& e) {
    rec.errors.push_back(std::string("transport: ") + e.what());
  }
  rec.ok = result.has_value();
  log.push_back(std::move(rec));
  return result;
}

std::string retrieval_query(const Intent& intent, const Pipeline* current) {
  std::string q = intent.text;
  if (current)
    for (const auto& n : current->nodes) q += " " + n.xapp_id;
  for (const auto& x : intent.required_xapps) q += " " + x;
  return q;
}

}  // namespace

std::optional<PerceptionDoc> run_perception(const RunContext& ctx, const IntentView& view, const AgentEnv& env,
                                            std::vector<CallRecord>& log) {
  if (!uses_perception(ctx.mode)) throw Error("mode " + to_string(ctx.mode) + " has no perception agent");
  Json payload{{"role", "perception"},
               {"iteration", ctx.iteration},
               {"intent", *view.intent},
               {"deployed_policies", deployed_json(ctx)},
               {"peer_policies", policies_json(view.peers)},
               {"current_candidate", current_json(view)},
               {"retrieved", retrieved_json(view.retrieved)}};
  return call_with_repair<PerceptionDoc>(AgentRole::Perception, view.intent->id, ctx, env, payload,
                                         [](const std::string& t) { return parse_perception(t); }, log);
}

std::optional<PolicyDoc> run_reasoning(const RunContext& ctx, const IntentView& view,
                                       const std::optional<PerceptionDoc>& perception,
                                       const std::vector<Analogue>& analogues, const AgentEnv& env,
                                       std::vector<CallRecord>& log) {
  if (ctx.mode == Mode::SA) throw Error("mode SA uses the single combined prompt");
  Json payload{{"role", "reasoning"},
               {"iteration", ctx.iteration},
               {"intent", *view.intent},
               {"deployed_policies", deployed_json(ctx)},
               {"peer_policies", policies_json(view.peers)},
               {"previous_candidate", current_json(view)},
               {"perception", perception ? to_json(*perception) : Json(nullptr)},
               {"analogues", analogues_json(analogues)},
               {"retrieved", retrieved_json(view.retrieved)}};
  const IntentId id = view.intent->id;
  return call_with_repair<PolicyDoc>(AgentRole::Reasoning, id, ctx, env, payload,
                                     [&](const std::string& t) { return parse_policy(t, env.registry, id); }, log);
}

std::optional<RefinementDoc> run_refinement(const RunContext& ctx, const IntentView& view, const PolicyDoc& candidate,
                                            const std::string& failure_summary, const AgentEnv& env,
                                            std::vector<CallRecord>& log) {
  if (!uses_refinement(ctx.mode)) throw Error("mode " + to_string(ctx.mode) + " has no refinement agent");
  Json payload{{"role", "refinement"},
               {"iteration", ctx.iteration},
               {"intent", *view.intent},
               {"candidate", to_json(candidate)},
               {"failure_summary", failure_summary},
               {"deployment_context",
                {{"deployed_policies", deployed_json(ctx)}, {"peer_policies", policies_json(view.peers)}}}};
  return call_with_repair<RefinementDoc>(
      AgentRole::Refinement, view.intent->id, ctx, env, payload,
      [&](const std::string& t) { return parse_refinement(t, env.registry, candidate); }, log);
}

std::optional<std::map<IntentId, PolicyDoc>> run_single_agent(const RunContext& ctx,
                                                              const std::vector<IntentView>& views,
                                                              const std::map<IntentId, std::vector<Analogue>>& analogues,
                                                              const AgentEnv& env, std::vector<CallRecord>& log) {
  Json items = Json::array();
  std::vector<IntentId> ids;
  for (const auto& v : views) {
    ids.push_back(v.intent->id);
    auto it = analogues.find(v.intent->id);
    items.push_back({{"intent", *v.intent},
                     {"previous_candidate", current_json(v)},
                     {"analogues", analogues_json(it == analogues.end() ? std::vector<Analogue>{} : it->second)}});
  }
  Json payload{{"role", "single_agent"},
               {"iteration", ctx.iteration},
               {"intents", std::move(items)},
               {"deployed_policies", deployed_json(ctx)},
               {"retrieved", retrieved_json(views.empty() ? std::vector<ScoredChunk>{} : views.front().retrieved)}};
  return call_with_repair<std::map<IntentId, PolicyDoc>>(
      AgentRole::SingleAgent, 0, ctx, env, payload,
      [&](const std::string& t) { return parse_single_agent(t, env.registry, ids); }, log);
}

const ScoredSolution& enforce_monotonicity(const ScoredSolution& previous_best, const ScoredSolution& candidate) {
  return candidate.score >= previous_best.score ? candidate : previous_best;
}

std::set<IntentId> fcfs_select(const std::map<IntentId, Pipeline>& candidates, const DeploymentState& pre,
                               const ConflictContext& ctx) {
  std::vector<Pipeline> running = pre.active;
  std::set<IntentId> admitted;
  for (const auto& [id, p] : candidates) {
    const auto mine = p.node_ids();
    const bool shares = std::any_of(running.begin(), running.end(), [&](const Pipeline& q) {
      return std::any_of(q.nodes.begin(), q.nodes.end(), [&](const PipelineNode& n) { return mine.count(n.xapp_id) > 0; });
    });
    if (shares || !validity(p, running, ctx).valid) continue;
    admitted.insert(id);
    running.push_back(p);
  }
  return admitted;
}

std::set<IntentId> optimal_select(const std::map<IntentId, Pipeline>& candidates, const DeploymentState& pre,
                                  const ConflictContext& ctx, const std::map<IntentId, Pipeline>& truths) {
  auto problem = make_subset_problem(candidates, pre, ctx, &truths);
  return best_valid_subset(problem, SubsetPriority::CorrectFirst).members(problem);
}

BatchOutcome orchestrate_batch(RunContext ctx, const AgentEnv& env, const std::map<IntentId, Pipeline>& truths,
                               int objective) {
  if (ctx.max_iterations < 1 || ctx.max_iterations > kMaxIterations)
    throw Error("max_iterations must be in 1.." + std::to_string(kMaxIterations));
  std::sort(ctx.batch.begin(), ctx.batch.end());
  for (IntentId id : ctx.batch)
    if (!truths.count(id)) throw Error("no reference pipeline for intent " + std::to_string(id));

  const auto cctx = env.conflict_context();
  BatchOutcome out;
  std::map<IntentId, Pipeline> previous;

  for (int it = 1; it <= ctx.max_iterations; ++it) {
    ctx.iteration = it;
    out.iterations_run = it;

    std::vector<IntentView> views;
    for (IntentId id : ctx.batch) {
      IntentView v;
      v.intent = &env.intents.at(id);
      if (auto p = previous.find(id); p != previous.end()) v.current = &p->second;
      for (const auto& [other, p] : previous)
        if (other != id) v.peers.push_back(&p);
      if (env.store) v.retrieved = env.store->query(retrieval_query(*v.intent, v.current), it);
      views.push_back(std::move(v));
    }

    std::map<IntentId, Pipeline> candidates;
    if (ctx.mode == Mode::SA) {
      std::map<IntentId, std::vector<Analogue>> analogues;
      for (const auto& v : views) analogues[v.intent->id] = env.memory.retrieve_analogues(*v.intent, ctx.analogues_k);
      if (auto docs = run_single_agent(ctx, views, analogues, env, out.calls))
        for (const auto& [id, d] : *docs) candidates[id] = to_pipeline(d);
    } else {
      for (const auto& v : views) {
        std::optional<PerceptionDoc> perception;
        if (uses_perception(ctx.mode)) {
          perception = run_perception(ctx, v, env, out.calls);
          if (!perception) continue;
        }
        const auto analogues = env.memory.retrieve_analogues(*v.intent, ctx.analogues_k);
        auto policy = run_reasoning(ctx, v, perception, analogues, env, out.calls);
        if (!policy) continue;
        if (uses_refinement(ctx.mode)) {
          auto refined = run_refinement(ctx, v, *policy, env.memory.failure_summary(*v.intent), env, out.calls);
          if (!refined) continue;
          policy = refined->revised_policy;
        }
        candidates[v.intent->id] = to_pipeline(*policy);
      }
    }

    // Deployment selection over structurally sound candidates only.
    std::map<IntentId, Pipeline> sound;
    std::vector<Pipeline> sound_list;
    for (const auto& [id, p] : candidates) {
      if (!validate_pipeline_structure(p, env.registry).ok()) continue;
      sound[id] = p;
      sound_list.push_back(p);
    }
    const auto deployed = ctx.mode == Mode::FCFS ? fcfs_select(sound, ctx.deployed, cctx)
                                                 : optimal_select(sound, ctx.deployed, cctx, truths);
    const auto graph = build_conflict_graph(sound_list, ctx.deployed, cctx);

    ScoredSolution current{candidates, deployed, score_solution(candidates, deployed, truths, graph.record_count()), it};
    out.best = out.best ? enforce_monotonicity(*out.best, current) : current;
    out.candidate_scores.push_back(current.score);
    out.best_scores.push_back(out.best->score);

    for (const auto& [id, p] : candidates) {
      MemoryEntry e;
      e.intent = env.intents.at(id);
      e.pipeline = p;
      e.outcome.deployed = deployed.count(id) > 0;
      e.outcome.correct = pipelines_equal(p, truths.at(id));
      if (sound.count(id)) e.outcome.conflicts = graph.touching(id);
      e.outcome.iteration = it;
      e.outcome.score = current.score;
      env.memory.record(std::move(e));
    }

    const auto& best = *out.best;
    const bool synthesized = std::all_of(ctx.batch.begin(), ctx.batch.end(), [&](IntentId id) {
      auto p = best.proposed.find(id);
      return p != best.proposed.end() && pipelines_equal(p->second, truths.at(id));
    });
    if (synthesized && !out.iterations_to_synthesis) out.iterations_to_synthesis = it;
    if (best.score.correct_deployed >= objective && !out.iterations_to_deployment) out.iterations_to_deployment = it;
    if (out.converged()) break;
  }
  return out;
}

}  // namespace rapp
