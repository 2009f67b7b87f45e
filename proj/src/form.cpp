#include "layoutkit/form.hpp"

#include <set>

#include <nlohmann/json.hpp>

#include "layoutkit/error.hpp"

namespace layoutkit {

using Json = nlohmann::ordered_json;

namespace {

struct PrimitiveInfo {
  PrimitiveType type;
  std::string_view name;
  std::size_t width;
};

constexpr PrimitiveInfo kPrimitives[] = {
    {PrimitiveType::float64, "float64", 8}, {PrimitiveType::float32, "float32", 4},
    {PrimitiveType::int64, "int64", 8},     {PrimitiveType::int32, "int32", 4},
    {PrimitiveType::int16, "int16", 2},     {PrimitiveType::int8, "int8", 1},
    {PrimitiveType::uint8, "uint8", 1},     {PrimitiveType::boolean, "bool", 1},
};

const PrimitiveInfo& info(PrimitiveType type) {
  for (const auto& p : kPrimitives) {
    if (p.type == type) return p;
  }
  return kPrimitives[0];
}

Json to_json(const FormNode& node) {
  Json out = Json::object();
  switch (node.kind()) {
    case NodeKind::primitive:
      out["class"] = "NumpyArray";
      out["primitive"] = std::string(primitive_name(node.primitive_type()));
      break;
    case NodeKind::list_offset:
      out["class"] = "ListOffsetArray";
      out["offsets"] = "i64";
      out["content"] = to_json(node.content());
      break;
    case NodeKind::record: {
      out["class"] = "RecordArray";
      Json contents = Json::object();
      for (std::size_t i = 0; i < node.children().size(); ++i) {
        contents[node.field_names()[i]] = to_json(node.children()[i]);
      }
      out["contents"] = std::move(contents);
      break;
    }
    case NodeKind::indexed_option:
      out["class"] = "IndexedOptionArray";
      out["index"] = "i64";
      out["content"] = to_json(node.content());
      break;
  }
  out["form_key"] = node.form_key();
  return out;
}

const Json& require(const Json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw FormError(path + ": missing required key \"" + key + "\"");
  }
  return *it;
}

std::string require_string(const Json& obj, const char* key, const std::string& path) {
  const Json& value = require(obj, key, path);
  if (!value.is_string()) {
    throw FormError(path + "." + key + ": expected a string");
  }
  return value.get<std::string>();
}

FormNode from_json(const Json& obj, const std::string& path, std::set<std::string>& keys) {
  if (!obj.is_object()) {
    throw FormError(path + ": expected an object");
  }
  std::string cls = require_string(obj, "class", path);
  FormNode node;
  if (cls == "NumpyArray") {
    std::string prim = require_string(obj, "primitive", path);
    auto type = primitive_from_name(prim);
    if (!type) {
      throw FormError(path + ".primitive: unsupported primitive \"" + prim + "\"");
    }
    node = FormNode::primitive(*type);
  } else if (cls == "ListOffsetArray") {
    std::string offsets = require_string(obj, "offsets", path);
    if (offsets != "i64") {
      throw FormError(path + ".offsets: unsupported offsets type \"" + offsets + "\"");
    }
    node = FormNode::list_offset(from_json(require(obj, "content", path), path + ".content", keys));
  } else if (cls == "IndexedOptionArray") {
    std::string index = require_string(obj, "index", path);
    if (index != "i64") {
      throw FormError(path + ".index: unsupported index type \"" + index + "\"");
    }
    node = FormNode::indexed_option(from_json(require(obj, "content", path), path + ".content", keys));
  } else if (cls == "RecordArray") {
    const Json& contents = require(obj, "contents", path);
    if (!contents.is_object()) {
      throw FormError(path + ".contents: expected an object of fields");
    }
    std::vector<std::pair<std::string, FormNode>> fields;
    for (const auto& [name, sub] : contents.items()) {
      fields.emplace_back(name, from_json(sub, path + ".contents." + name, keys));
    }
    node = FormNode::record(std::move(fields));
  } else {
    throw FormError(path + ": unsupported node class \"" + cls + "\"");
  }
  std::string key = require_string(obj, "form_key", path);
  if (!keys.insert(key).second) {
    throw FormError(path + ".form_key: duplicate form_key \"" + key + "\"");
  }
  node.set_form_key(std::move(key));
  return node;
}

void collect_names(const FormNode& node, std::vector<std::string>& out) {
  if (auto name = node.buffer_name()) {
    out.push_back(std::move(*name));
  }
  for (const auto& child : node.children()) {
    collect_names(child, out);
  }
}

void number(FormNode& node, std::size_t& next) {
  node.set_form_key("node" + std::to_string(next++));
  for (auto& child : node.children()) {
    number(child, next);
  }
}

}  // namespace

std::string_view primitive_name(PrimitiveType type) noexcept { return info(type).name; }

std::optional<PrimitiveType> primitive_from_name(std::string_view name) noexcept {
  for (const auto& p : kPrimitives) {
    if (p.name == name) return p.type;
  }
  return std::nullopt;
}

std::size_t primitive_width(PrimitiveType type) noexcept { return info(type).width; }

bool is_floating(PrimitiveType type) noexcept {
  return type == PrimitiveType::float64 || type == PrimitiveType::float32;
}

FormNode FormNode::primitive(PrimitiveType type) {
  FormNode node;
  node.kind_ = NodeKind::primitive;
  node.primitive_ = type;
  return node;
}

FormNode FormNode::list_offset(FormNode content) {
  FormNode node;
  node.kind_ = NodeKind::list_offset;
  node.children_.push_back(std::move(content));
  return node;
}

FormNode FormNode::indexed_option(FormNode content) {
  FormNode node;
  node.kind_ = NodeKind::indexed_option;
  node.children_.push_back(std::move(content));
  return node;
}

FormNode FormNode::record(std::vector<std::pair<std::string, FormNode>> fields) {
  FormNode node;
  node.kind_ = NodeKind::record;
  std::set<std::string> seen;
  for (auto& [name, child] : fields) {
    if (!seen.insert(name).second) {
      throw ConfigError("duplicate record field \"" + name + "\"");
    }
    node.field_names_.push_back(name);
    node.children_.push_back(std::move(child));
  }
  return node;
}

const FormNode& FormNode::content() const {
  if (kind_ != NodeKind::list_offset && kind_ != NodeKind::indexed_option) {
    throw std::logic_error("FormNode::content on a node without a single content");
  }
  return children_.front();
}

FormNode& FormNode::content() {
  return const_cast<FormNode&>(std::as_const(*this).content());
}

std::optional<std::string> FormNode::buffer_name() const {
  switch (kind_) {
    case NodeKind::primitive:
      return form_key_ + "-data";
    case NodeKind::list_offset:
      return form_key_ + "-offsets";
    case NodeKind::indexed_option:
      return form_key_ + "-index";
    case NodeKind::record:
      break;
  }
  return std::nullopt;
}

std::size_t assign_form_keys(FormNode& root) {
  std::size_t next = 0;
  number(root, next);
  return next;
}

std::string serialize(const FormNode& form) { return to_json(form).dump(); }

FormNode parse_form(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw FormError(std::string("$: malformed JSON: ") + e.what());
  }
  std::set<std::string> keys;
  return from_json(doc, "$", keys);
}

std::vector<std::string> buffer_names(const FormNode& form) {
  std::vector<std::string> out;
  collect_names(form, out);
  return out;
}

std::size_t node_count(const FormNode& form) {
  std::size_t count = 1;
  for (const auto& child : form.children()) {
    count += node_count(child);
  }
  return count;
}

}  // namespace layoutkit
