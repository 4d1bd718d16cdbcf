#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "honeygen/error.hpp"
#include "honeygen/text.hpp"
#include "honeygen/token_specs.hpp"

namespace honeygen {

enum class BlockCategory { kGeneratorInstruction, kInputPreamble, kOutputFormat };

inline constexpr std::size_t kGeneratorBlocks = 7;
inline constexpr std::size_t kInputBlocks = 6;
inline constexpr std::size_t kOutputBlocks = 5;
inline constexpr std::size_t kTripleCount = kGeneratorBlocks * kInputBlocks * kOutputBlocks;

inline constexpr std::string_view kHoneyTokenPlaceholder = "{honey_token}";
inline constexpr std::string_view kInputPlaceholder = "{input}";

struct BuildingBlock {
  BlockCategory category = BlockCategory::kGeneratorInstruction;
  int id = 0;
  std::string text;  // template; may be empty
};

struct BlockTable {
  std::array<BuildingBlock, kGeneratorBlocks> generator;
  std::array<BuildingBlock, kInputBlocks> input;
  std::array<BuildingBlock, kOutputBlocks> output;
};

inline const BlockTable& builtin_blocks() {
  using C = BlockCategory;
  static const BlockTable table = {
      {{{C::kGeneratorInstruction, 0, "You are now a {honey_token} generator."},
        {C::kGeneratorInstruction, 1, "Act as a {honey_token} generator."},
        {C::kGeneratorInstruction, 2, "Behave like a {honey_token} generator."},
        {C::kGeneratorInstruction, 3, "Generate a {honey_token}."},
        {C::kGeneratorInstruction, 4, "Create a {honey_token}."},
        {C::kGeneratorInstruction, 5, "Make a {honey_token}."},
        {C::kGeneratorInstruction, 6, ""}}},
      {{{C::kInputPreamble, 0, "I will provide you with the following information: {input}."},
        {C::kInputPreamble, 1, "Consider the following information: \xE2\x80\x9C{input}\xE2\x80\x9D."},
        {C::kInputPreamble, 2, "Take the following information into account: '{input}'"},
        {C::kInputPreamble, 3, "I will provide you with the following information: {{input}}."},
        {C::kInputPreamble, 4, "Consider the following information: {{input}}."},
        {C::kInputPreamble, 5, "Take the following information into account: {{input}}."}}},
      {{{C::kOutputFormat, 0, "Refrain from explaining your response."},
        {C::kOutputFormat, 1,
         "Only reply with the {honey_token} and nothing else. Do not write explanations."},
        {C::kOutputFormat, 2, "Quick answer."},
        {C::kOutputFormat, 3, "Just the answer."},
        {C::kOutputFormat, 4, ""}}},
  };
  return table;
}

struct BlockTriple {
  int generator_id = 0;
  int input_id = 0;
  int output_id = 0;

  auto operator<=>(const BlockTriple&) const = default;

  bool valid() const {
    return generator_id >= 0 && generator_id < static_cast<int>(kGeneratorBlocks) &&
           input_id >= 0 && input_id < static_cast<int>(kInputBlocks) && output_id >= 0 &&
           output_id < static_cast<int>(kOutputBlocks);
  }

  // "[1,4,1]"
  std::string to_string() const {
    return "[" + std::to_string(generator_id) + "," + std::to_string(input_id) + "," +
           std::to_string(output_id) + "]";
  }
};

// Accepts "1,4,1" or "[1,4,1]".
inline BlockTriple parse_triple(std::string_view s) {
  s = text::trim(s);
  if (s.size() >= 2 && s.front() == '[' && s.back() == ']') s = s.substr(1, s.size() - 2);
  auto parts = text::split(s, ',');
  if (parts.size() != 3) throw Error(ErrorCode::kInvalidTriple, "expected g,i,o: " + std::string(s));
  std::array<int, 3> ids{};
  for (std::size_t i = 0; i < 3; ++i) {
    auto v = text::parse_double(parts[i]);
    if (!v || *v != static_cast<int>(*v))
      throw Error(ErrorCode::kInvalidTriple, "not an integer: " + std::string(parts[i]));
    ids[i] = static_cast<int>(*v);
  }
  BlockTriple t{ids[0], ids[1], ids[2]};
  if (!t.valid()) throw Error(ErrorCode::kInvalidTriple, "triple out of range: " + t.to_string());
  return t;
}

inline std::vector<BlockTriple> enumerate_triples() {
  std::vector<BlockTriple> out;
  out.reserve(kTripleCount);
  for (int g = 0; g < static_cast<int>(kGeneratorBlocks); ++g)
    for (int i = 0; i < static_cast<int>(kInputBlocks); ++i)
      for (int o = 0; o < static_cast<int>(kOutputBlocks); ++o) out.push_back({g, i, o});
  return out;
}

struct AssembledPrompt {
  BlockTriple triple;
  TokenTypeId token_type = TokenTypeId::A;
  std::string input_payload;
  std::string text;
};

inline std::string render_block(std::string_view templ, std::string_view noun,
                                std::string_view payload) {
  std::string out = text::replace_all(std::string(templ), kHoneyTokenPlaceholder, noun);
  return text::replace_all(std::move(out), kInputPlaceholder, payload);
}

// generator, input, special instruction, output; non-empty parts joined by
// one space.
inline AssembledPrompt assemble(const BlockTriple& triple, TokenTypeId token_type,
                                std::string_view input_payload,
                                const BlockTable& blocks = builtin_blocks(),
                                const TokenSpecTable& specs = builtin_token_specs()) {
  if (!triple.valid()) throw Error(ErrorCode::kInvalidTriple, "invalid triple " + triple.to_string());
  if (static_cast<int>(token_type) < 0 || static_cast<int>(token_type) > 6)
    throw Error(ErrorCode::kUnknownTokenType, "unknown token type");
  const TokenTypeSpec& spec = token_spec(token_type, specs);
  const std::string& input_templ = blocks.input[static_cast<std::size_t>(triple.input_id)].text;
  if (input_templ.find(kInputPlaceholder) != std::string::npos && text::is_blank(input_payload))
    throw Error(ErrorCode::kInvalidArgument, "input block " + std::to_string(triple.input_id) +
                                                 " needs a non-empty input payload");

  const std::array<std::string, 4> parts = {
      render_block(blocks.generator[static_cast<std::size_t>(triple.generator_id)].text,
                   spec.generator_noun, input_payload),
      render_block(input_templ, spec.generator_noun, input_payload),
      spec.special_instruction,
      render_block(blocks.output[static_cast<std::size_t>(triple.output_id)].text,
                   spec.generator_noun, input_payload)};
  std::string prompt;
  for (const auto& part : parts) {
    std::string_view p = text::trim(part);
    if (p.empty()) continue;
    if (!prompt.empty()) prompt.push_back(' ');
    prompt.append(p);
  }
  return {triple, token_type, std::string(input_payload), std::move(prompt)};
}

// Override file: {"generator": [{"id": 0, "template": "..."}], "input": [...],
// "output": [...]}. Categories or ids not mentioned keep the built-in text.
inline BlockTable blocks_from_json(const nlohmann::json& j, BlockTable base = builtin_blocks()) {
  auto apply = [&](const char* key, auto& column) {
    if (!j.contains(key)) return;
    for (const auto& entry : j.at(key)) {
      const int id = entry.at("id").get<int>();
      if (id < 0 || id >= static_cast<int>(column.size()))
        throw Error(ErrorCode::kInvalidTriple,
                    std::string(key) + " block id out of range: " + std::to_string(id));
      column[static_cast<std::size_t>(id)].text = entry.at("template").get<std::string>();
    }
  };
  try {
    apply("generator", base.generator);
    apply("input", base.input);
    apply("output", base.output);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("block override: ") + e.what());
  }
  return base;
}

inline BlockTable load_blocks(const std::filesystem::path& path) {
  try {
    return blocks_from_json(nlohmann::json::parse(text::read_file(path)));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
}

inline nlohmann::json blocks_to_json(const BlockTable& table) {
  auto column = [](const auto& blocks) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& b : blocks) arr.push_back({{"id", b.id}, {"template", b.text}});
    return arr;
  };
  return {{"generator", column(table.generator)},
          {"input", column(table.input)},
          {"output", column(table.output)}};
}

}  // namespace honeygen
