#include "reflectionless/config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include "json.hpp"
#include "reflectionless/error.hpp"

namespace refl {

namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::SchemaError, path + ": " + what);
}

void reject_unknown_keys(const json& obj, const std::string& path,
                         std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) schema_error(path.empty() ? key : path + "." + key, "unknown key");
  }
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) schema_error(path, "expected a number");
  return v.get<double>();
}

long as_integer(const json& v, const std::string& path) {
  if (v.is_number_integer()) return v.get<long>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d == static_cast<double>(static_cast<long>(d))) return static_cast<long>(d);
  }
  schema_error(path, "expected an integer");
}

std::vector<double> as_numbers(const json& v, const std::string& path, bool allow_scalar) {
  if (allow_scalar && v.is_number()) return {v.get<double>()};
  if (!v.is_array()) schema_error(path, allow_scalar ? "expected a number or an array of numbers"
                                                     : "expected an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(as_number(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

double single_value(const json& v, const std::string& path) {
  auto values = as_numbers(v, path, true);
  if (values.size() != 1) schema_error(path, "constant background takes a single value");
  return values.front();
}

Background parse_background(const json& bg) {
  if (!bg.is_object()) schema_error("background", "expected an object");
  reject_unknown_keys(bg, "background", {"kind", "a", "b", "phase"});
  if (!bg.contains("kind")) schema_error("background.kind", "missing");
  if (!bg["kind"].is_string()) schema_error("background.kind", "expected a string");
  const auto kind = bg["kind"].get<std::string>();

  if (kind == "free") {
    for (const char* key : {"a", "b", "phase"})
      if (bg.contains(key)) schema_error(std::string("background.") + key, "not allowed for kind \"free\"");
    return Background::free();
  }
  if (kind == "constant") {
    if (bg.contains("phase")) schema_error("background.phase", "not allowed for kind \"constant\"");
    if (!bg.contains("a")) schema_error("background.a", "missing");
    const double a = single_value(bg["a"], "background.a");
    const double b = bg.contains("b") ? single_value(bg["b"], "background.b") : 0.0;
    return Background::constant(a, b);
  }
  if (kind == "periodic") {
    if (!bg.contains("a")) schema_error("background.a", "missing");
    auto a = as_numbers(bg["a"], "background.a", true);
    if (a.empty()) schema_error("background.a", "must not be empty");
    std::vector<double> b;
    if (bg.contains("b")) {
      b = as_numbers(bg["b"], "background.b", true);
      if (b.size() != a.size()) schema_error("background.b", "length must match background.a");
    }
    const long phase = bg.contains("phase") ? as_integer(bg["phase"], "background.phase") : 0;
    return Background::periodic(std::move(a), std::move(b), phase);
  }
  schema_error("background.kind", "expected \"free\", \"constant\" or \"periodic\"");
}

Perturbation parse_perturbation(const json& p) {
  if (!p.is_object()) schema_error("perturbation", "expected an object");
  reject_unknown_keys(p, "perturbation", {"offset", "a", "b"});
  Perturbation out;
  if (p.contains("offset")) out.offset = as_integer(p["offset"], "perturbation.offset");
  if (p.contains("a")) out.a = as_numbers(p["a"], "perturbation.a", false);
  if (p.contains("b")) out.b = as_numbers(p["b"], "perturbation.b", false);
  return out;
}

}  // namespace

JacobiSpec parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::SchemaError, std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) schema_error("<root>", "expected an object");
  reject_unknown_keys(doc, "", {"background", "perturbation"});
  if (!doc.contains("background")) schema_error("background", "missing");
  Background bg = parse_background(doc["background"]);
  Perturbation pert = doc.contains("perturbation") ? parse_perturbation(doc["perturbation"]) : Perturbation{};
  return JacobiSpec(std::move(bg), std::move(pert));
}

JacobiSpec load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::SchemaError, "cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const JacobiSpec& spec) {
  json doc;
  const Background& bg = spec.background();
  if (bg.kind() == Background::Kind::Constant) {
    const double a = bg.a_cell()[0];
    const double b = bg.b_cell()[0];
    if (a == 1.0 && b == 0.0) {
      doc["background"] = {{"kind", "free"}};
    } else {
      doc["background"] = {{"kind", "constant"}, {"a", a}, {"b", b}};
    }
  } else {
    doc["background"] = {{"kind", "periodic"},
                         {"a", std::vector<double>(bg.a_cell().begin(), bg.a_cell().end())},
                         {"b", std::vector<double>(bg.b_cell().begin(), bg.b_cell().end())},
                         {"phase", bg.phase()}};
  }
  const Perturbation& p = spec.perturbation();
  if (!p.empty()) {
    json pj = {{"offset", p.offset}};
    if (!p.a.empty()) pj["a"] = p.a;
    if (!p.b.empty()) pj["b"] = p.b;
    doc["perturbation"] = std::move(pj);
  }
  return doc.dump();
}

}  // namespace refl
