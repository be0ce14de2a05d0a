#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "rapp/domain.hpp"
#include "rapp/transport.hpp"

namespace rapp {

enum class AgentRole { Perception, Reasoning, Refinement, SingleAgent };

std::string to_string(AgentRole r);

/// Versioned system/user templates and JSON schemas, loaded from disk.
/// Placeholders: {{taxonomy}}, {{xapp_catalog}}, {{schema}}, {{payload}}, {{errors}}.
class PromptLibrary {
public:
  /// Reads <prompts_dir>/{role}.system.md, {role}.user.md, repair.user.md, taxonomy.md and
  /// <schemas_dir>/{perception,policy,refinement,single_agent}.schema.json.
  static PromptLibrary load(const std::filesystem::path& prompts_dir, const std::filesystem::path& schemas_dir);
  /// Same, from <data_dir>/prompts/v1 and <data_dir>/schemas/v1.
  static PromptLibrary load_default(const std::filesystem::path& data_dir);

  std::string system_prompt(AgentRole role, const Registry& registry) const;
  std::string user_prompt(AgentRole role, const Json& payload) const;
  std::string repair_prompt(const std::vector<std::string>& errors) const;
  /// Schema text shown to the model for this role (policy schema inlined where referenced).
  std::string schema_text(AgentRole role) const;

private:
  std::map<std::string, std::string> files_;
  const std::string& file(const std::string& key) const;
};

/// One line per xApp: stage, vendor, dialect, capabilities, parameters, KPI effects.
std::string render_xapp_catalog(const Registry& registry);

/// Replaces every {{key}} occurrence.
std::string fill_template(std::string text, const std::map<std::string, std::string>& values);

/// The ```json block of the first user message; throws Error when absent or unparseable.
Json extract_payload(const ChatRequest& request);

}  // namespace rapp
