#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "lapi/errors.hpp"

namespace lapi::prompts {

// Replaces every "{key}" occurrence with vars.at(key). Braces that do not
// spell a provided key are left untouched, so JSON snippets inside templates
// survive rendering.
std::string render(std::string_view tmpl, const std::map<std::string, std::string>& vars);

// The template files every engine run needs, with the placeholders each one
// must contain. File names are part of the CLI contract (see README).
struct AssetSpec {
  const char* name;  // file name without extension
  std::vector<const char*> placeholders;
};

const std::vector<AssetSpec>& asset_specs();

// Loads all templates from a directory of <name>.txt files and validates
// placeholders up front; a missing file or placeholder throws TemplateError
// before any LLM call is made.
class PromptAssets {
public:
  static PromptAssets load(const std::filesystem::path& dir);

  const std::string& get(std::string_view name) const;
  const std::filesystem::path& dir() const { return dir_; }

private:
  std::filesystem::path dir_;
  std::map<std::string, std::string, std::less<>> templates_;
};

}  // namespace lapi::prompts
