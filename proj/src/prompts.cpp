#include "rapp/prompts.hpp"

#include <fstream>
#include <sstream>

namespace rapp {

std::string to_string(AgentRole r) {
  switch (r) {
    case AgentRole::Perception: return "perception";
    case AgentRole::Reasoning: return "reasoning";
    case AgentRole::Refinement: return "refinement";
    case AgentRole::SingleAgent: return "single_agent";
  }
  return "?";
}

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("cannot read prompt asset " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const AgentRole kRoles[] = {AgentRole::Perception, AgentRole::Reasoning, AgentRole::Refinement,
                            AgentRole::SingleAgent};

}  // namespace

PromptLibrary PromptLibrary::load(const std::filesystem::path& prompts_dir, const std::filesystem::path& schemas_dir) {
  PromptLibrary lib;
  for (AgentRole r : kRoles) {
    const auto name = to_string(r);
    lib.files_[name + ".system"] = slurp(prompts_dir / (name + ".system.md"));
    lib.files_[name + ".user"] = slurp(prompts_dir / (name + ".user.md"));
  }
  lib.files_["repair"] = slurp(prompts_dir / "repair.user.md");
  lib.files_["taxonomy"] = slurp(prompts_dir / "taxonomy.md");
  for (const char* s : {"perception", "policy", "refinement", "single_agent"}) {
    auto text = slurp(schemas_dir / (std::string(s) + ".schema.json"));
    if (!Json::accept(text)) throw Error("schema " + std::string(s) + " is not valid JSON");
    lib.files_[std::string("schema.") + s] = std::move(text);
  }
  return lib;
}

PromptLibrary PromptLibrary::load_default(const std::filesystem::path& data_dir) {
  return load(data_dir / "prompts" / "v1", data_dir / "schemas" / "v1");
}

const std::string& PromptLibrary::file(const std::string& key) const {
  auto it = files_.find(key);
  if (it == files_.end()) throw Error("prompt asset '" + key + "' not loaded");
  return it->second;
}

std::string PromptLibrary::schema_text(AgentRole role) const {
  switch (role) {
    case AgentRole::Perception: return file("schema.perception");
    case AgentRole::Reasoning: return file("schema.policy");
    case AgentRole::Refinement:
      return file("schema.refinement") + "\nwhere policy.schema.json is:\n" + file("schema.policy");
    case AgentRole::SingleAgent:
      return file("schema.single_agent") + "\nwhere policy.schema.json is:\n" + file("schema.policy");
  }
  return {};
}

std::string PromptLibrary::system_prompt(AgentRole role, const Registry& registry) const {
  return fill_template(file(to_string(role) + ".system"), {{"taxonomy", file("taxonomy")},
                                                           {"xapp_catalog", render_xapp_catalog(registry)},
                                                           {"schema", schema_text(role)}});
}

std::string PromptLibrary::user_prompt(AgentRole role, const Json& payload) const {
  return fill_template(file(to_string(role) + ".user"), {{"payload", payload.dump(2)}});
}

std::string PromptLibrary::repair_prompt(const std::vector<std::string>& errors) const {
  std::string list;
  for (const auto& e : errors) list += "- " + e + "\n";
  return fill_template(file("repair"), {{"errors", list}});
}

std::string render_xapp_catalog(const Registry& registry) {
  auto join = [](const auto& xs) {
    std::string s;
    for (const auto& x : xs) s += (s.empty() ? "" : ", ") + x;
    return s.empty() ? std::string("none") : s;
  };
  std::ostringstream os;
  for (const auto& x : registry.profiles()) {
    std::vector<std::string> effects;
    for (const auto& [k, d] : x.kpi_effects)
      if (d != 0) effects.push_back(k + (d > 0 ? "+" : "-"));
    os << "- " << x.id << " [" << to_string(x.stage) << ", vendor " << x.vendor << ", dialect " << x.dialect
       << "] capabilities: " << join(x.capabilities) << "; parameters: " << join(x.controlled_params)
       << "; effects: " << join(effects) << "\n";
  }
  return os.str();
}

std::string fill_template(std::string text, const std::map<std::string, std::string>& values) {
  for (const auto& [key, value] : values) {
    const std::string token = "{{" + key + "}}";
    for (auto pos = text.find(token); pos != std::string::npos; pos = text.find(token, pos + value.size()))
      text.replace(pos, token.size(), value);
  }
  return text;
}

Json extract_payload(const ChatRequest& request) {
  for (const auto& m : request.messages) {
    if (m.role != "user") continue;
    const auto open = m.content.find("```json");
    if (open == std::string::npos) break;
    const auto start = m.content.find('\n', open);
    const auto stop = m.content.rfind("```");
    if (start == std::string::npos || stop <= start) break;
    try {
      return Json::parse(m.content.substr(start + 1, stop - start - 1));
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(std::string("payload block is not valid JSON: ") + e.what());
    }
  }
  throw Error("request carries no ```json payload block");
}

}  // namespace rapp
