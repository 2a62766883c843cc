#include "lapi/prompt_assets.hpp"

#include <fstream>
#include <sstream>

namespace lapi::prompts {

std::string render(std::string_view tmpl, const std::map<std::string, std::string>& vars) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    const auto open = tmpl.find('{', pos);
    if (open == std::string_view::npos) {
      out.append(tmpl.substr(pos));
      break;
    }
    out.append(tmpl.substr(pos, open - pos));
    const auto close = tmpl.find('}', open + 1);
    if (close == std::string_view::npos) {
      out.append(tmpl.substr(open));
      break;
    }
    const std::string key(tmpl.substr(open + 1, close - open - 1));
    if (auto it = vars.find(key); it != vars.end()) {
      out.append(it->second);
      pos = close + 1;
    } else {
      out.push_back('{');
      pos = open + 1;
    }
  }
  return out;
}

const std::vector<AssetSpec>& asset_specs() {
  static const std::vector<AssetSpec> specs{
      {"category_threat", {}},
      {"category_effectiveness", {}},
      {"hbm_weighting", {"query"}},
      {"hbm_synthesis",
       {"query", "threat_prompt", "effectiveness_prompt", "threat_weight", "effectiveness_weight"}},
      {"rule_judge", {"response", "rules"}},
      {"refine", {"prompt", "unmet_rules"}},
      {"zero_shot", {"query"}},
      {"zero_shot_rules", {"query", "rules"}},
      {"cot", {"query", "rules_block", "hbm_block"}},
      {"cot_hbm_framing", {}},
      {"fewshot", {"examples", "query"}},
      {"rubric_judge", {"response", "query", "rubric"}},
      {"rubric_fluency", {}},
      {"rubric_coherence", {}},
      {"rubric_naturalness", {}},
      {"rubric_empathy", {}},
      {"rubric_patient_centricity", {}},
      {"equivalence_judge", {"first", "second"}},
      {"revision", {"query", "draft", "claims"}},
  };
  return specs;
}

PromptAssets PromptAssets::load(const std::filesystem::path& dir) {
  PromptAssets assets;
  assets.dir_ = dir;
  for (const auto& spec : asset_specs()) {
    const auto path = dir / (std::string(spec.name) + ".txt");
    std::ifstream in(path);
    if (!in) throw TemplateError("prompt asset missing: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    for (const char* placeholder : spec.placeholders) {
      const std::string token = "{" + std::string(placeholder) + "}";
      if (text.find(token) == std::string::npos)
        throw TemplateError("prompt asset " + path.string() + " lacks required placeholder " +
                            token);
    }
    assets.templates_.emplace(spec.name, std::move(text));
  }
  return assets;
}

const std::string& PromptAssets::get(std::string_view name) const {
  auto it = templates_.find(name);
  if (it == templates_.end())
    throw TemplateError("unknown prompt asset: " + std::string(name));
  return it->second;
}

}  // namespace lapi::prompts
