#include "layoutkit/dynamic_builder.hpp"

#include <algorithm>
#include <optional>
#include <variant>

#include "layoutkit/error.hpp"

namespace layoutkit {

using Kind = InferredType::Kind;

namespace {

const char* kind_name(Kind kind) {
  switch (kind) {
    case Kind::unknown:
      return "unknown";
    case Kind::boolean:
      return "bool";
    case Kind::integer:
      return "int64";
    case Kind::real:
      return "float64";
    case Kind::list:
      return "list";
    case Kind::record:
      return "record";
    case Kind::option:
      return "option";
  }
  return "?";
}

bool is_numeric(Kind kind) { return kind == Kind::boolean || kind == Kind::integer || kind == Kind::real; }

Kind number_kind(const LogicalValue::Number& number) {
  if (std::holds_alternative<bool>(number.value)) return Kind::boolean;
  if (std::holds_alternative<std::int64_t>(number.value)) return Kind::integer;
  return Kind::real;
}

InferredType make(Kind kind, std::vector<InferredType> children = {}, std::vector<std::string> names = {}) {
  InferredType t;
  t.kind = kind;
  t.children = std::move(children);
  t.field_names = std::move(names);
  return t;
}

InferredType optional_of(InferredType inner) {
  if (inner.kind == Kind::option) return inner;
  return make(Kind::option, {std::move(inner)});
}

const LogicalValue* find_field(const LogicalValue::Record& fields, const std::string& name) {
  for (const auto& [field_name, value] : fields) {
    if (field_name == name) return &value;
  }
  return nullptr;
}

}  // namespace

InferredType InferredType::of(const LogicalValue& value) {
  if (value.is_missing()) return make(Kind::option, {make(Kind::unknown)});
  if (value.is_number()) return make(number_kind(value.number()));
  if (value.is_list()) {
    InferredType content;
    for (const auto& item : value.items()) {
      content = join(content, of(item), "[]");
    }
    return make(Kind::list, {std::move(content)});
  }
  InferredType record = make(Kind::record);
  for (const auto& [name, field] : value.fields()) {
    if (std::find(record.field_names.begin(), record.field_names.end(), name) != record.field_names.end()) {
      throw BuilderError(": duplicate field \"" + name + "\" in record value");
    }
    record.field_names.push_back(name);
    record.children.push_back(of(field));
  }
  return record;
}

InferredType InferredType::join(const InferredType& a, const InferredType& b, const std::string& path) {
  if (a.kind == Kind::unknown) return b;
  if (b.kind == Kind::unknown) return a;
  if (a.kind == Kind::option || b.kind == Kind::option) {
    const InferredType& inner_a = a.kind == Kind::option ? a.children[0] : a;
    const InferredType& inner_b = b.kind == Kind::option ? b.children[0] : b;
    return optional_of(join(inner_a, inner_b, path));
  }
  if (is_numeric(a.kind) && is_numeric(b.kind)) {
    return make(std::max(a.kind, b.kind));
  }
  if (a.kind == Kind::list && b.kind == Kind::list) {
    return make(Kind::list, {join(a.children[0], b.children[0], path + "[]")});
  }
  if (a.kind == Kind::record && b.kind == Kind::record) {
    InferredType out = make(Kind::record);
    for (std::size_t i = 0; i < a.field_names.size(); ++i) {
      const auto& name = a.field_names[i];
      auto it = std::find(b.field_names.begin(), b.field_names.end(), name);
      out.field_names.push_back(name);
      if (it == b.field_names.end()) {
        out.children.push_back(optional_of(a.children[i]));
      } else {
        out.children.push_back(join(a.children[i], b.children[it - b.field_names.begin()], path + "." + name));
      }
    }
    for (std::size_t i = 0; i < b.field_names.size(); ++i) {
      const auto& name = b.field_names[i];
      if (std::find(a.field_names.begin(), a.field_names.end(), name) == a.field_names.end()) {
        out.field_names.push_back(name);
        out.children.push_back(optional_of(b.children[i]));
      }
    }
    return out;
  }
  throw BuilderError(path + ": cannot combine " + kind_name(a.kind) + " with " + kind_name(b.kind));
}

// ---------------------------------------------------------------------------

struct DynamicBuilder::Node {
  explicit Node(std::size_t capacity) : panel_capacity(capacity) {}

  std::size_t panel_capacity;
  Kind kind = Kind::unknown;
  std::variant<std::monostate, GrowableBuffer<bool>, GrowableBuffer<std::int64_t>, GrowableBuffer<double>> data;
  // List offsets or option index.
  std::optional<GrowableBuffer<std::int64_t>> positions;
  std::vector<std::string> names;
  std::vector<std::unique_ptr<Node>> children;
  std::size_t record_length = 0;

  std::size_t length() const {
    switch (kind) {
      case Kind::unknown:
        return 0;
      case Kind::boolean:
      case Kind::integer:
      case Kind::real:
        return std::visit(
            [](const auto& buffer) -> std::size_t {
              if constexpr (std::is_same_v<std::decay_t<decltype(buffer)>, std::monostate>) {
                return 0;
              } else {
                return buffer.length();
              }
            },
            data);
      case Kind::list:
        return positions->length() - 1;
      case Kind::option:
        return positions->length();
      case Kind::record:
        return record_length;
    }
    return 0;
  }

  InferredType type() const {
    InferredType t = make(kind);
    t.field_names = names;
    for (const auto& child : children) t.children.push_back(child->type());
    return t;
  }

  /// True when `value` can be written without changing this node's type.
  bool fits(const LogicalValue& value) const {
    if (kind == Kind::option) return value.is_missing() || children[0]->fits(value);
    if (value.is_missing()) return false;
    if (value.is_number()) {
      Kind incoming = number_kind(value.number());
      return is_numeric(kind) && incoming <= kind;
    }
    if (value.is_list()) {
      if (kind != Kind::list) return false;
      return std::all_of(value.items().begin(), value.items().end(),
                         [&](const LogicalValue& item) { return children[0]->fits(item); });
    }
    if (kind != Kind::record) return false;
    const auto& fields = value.fields();
    std::size_t matched = 0;
    for (std::size_t i = 0; i < names.size(); ++i) {
      const LogicalValue* field = find_field(fields, names[i]);
      if (field == nullptr) {
        if (children[i]->kind != Kind::option) return false;
      } else {
        if (!children[i]->fits(*field)) return false;
        ++matched;
      }
    }
    return matched == fields.size();
  }

  /// Writes a value this node's type already covers.
  void append(const LogicalValue& value) {
    switch (kind) {
      case Kind::option:
        if (value.is_missing()) {
          positions->append(-1);
        } else {
          positions->append(static_cast<std::int64_t>(children[0]->length()));
          children[0]->append(value);
        }
        return;
      case Kind::boolean:
        std::get<GrowableBuffer<bool>>(data).append(std::get<bool>(value.number().value));
        return;
      case Kind::integer: {
        const auto& v = value.number().value;
        std::int64_t x = std::holds_alternative<bool>(v) ? std::int64_t{std::get<bool>(v)} : std::get<std::int64_t>(v);
        std::get<GrowableBuffer<std::int64_t>>(data).append(x);
        return;
      }
      case Kind::real: {
        const auto& v = value.number().value;
        double x = std::visit([](auto n) { return static_cast<double>(n); }, v);
        std::get<GrowableBuffer<double>>(data).append(x);
        return;
      }
      case Kind::list:
        for (const auto& item : value.items()) children[0]->append(item);
        positions->append(static_cast<std::int64_t>(children[0]->length()));
        return;
      case Kind::record: {
        static const LogicalValue kMissing;
        for (std::size_t i = 0; i < names.size(); ++i) {
          const LogicalValue* field = find_field(value.fields(), names[i]);
          children[i]->append(field != nullptr ? *field : kMissing);
        }
        ++record_length;
        return;
      }
      case Kind::unknown:
        break;
    }
    throw std::logic_error("append into an unknown dynamic node");
  }

  template <typename To, typename From>
  void convert() {
    GrowableBuffer<To> converted(panel_capacity);
    std::get<GrowableBuffer<From>>(data).for_each(
        [&](std::size_t, From value) { converted.append(static_cast<To>(value)); });
    data = std::move(converted);
  }

  /// Changes storage so that this node has type `target`, a generalization
  /// of its current type.
  void promote(const InferredType& target) {
    if (target.kind == Kind::option && kind != Kind::option) {
      auto inner = std::make_unique<Node>(panel_capacity);
      std::size_t rows = length();
      inner->kind = kind;
      inner->data = std::move(data);
      inner->positions = std::move(positions);
      inner->names = std::move(names);
      inner->children = std::move(children);
      inner->record_length = record_length;
      kind = Kind::option;
      data = std::monostate{};
      positions.emplace(panel_capacity);
      for (std::size_t i = 0; i < rows; ++i) positions->append(static_cast<std::int64_t>(i));
      names.clear();
      children.clear();
      children.push_back(std::move(inner));
      record_length = 0;
      children[0]->promote(target.children[0]);
      return;
    }
    switch (kind) {
      case Kind::unknown:
        become(target);
        return;
      case Kind::boolean:
        if (target.kind == Kind::integer) {
          convert<std::int64_t, bool>();
        } else if (target.kind == Kind::real) {
          convert<double, bool>();
        }
        kind = target.kind;
        return;
      case Kind::integer:
        if (target.kind == Kind::real) {
          convert<double, std::int64_t>();
          kind = Kind::real;
        }
        return;
      case Kind::real:
        return;
      case Kind::list:
      case Kind::option:
        children[0]->promote(target.children[0]);
        return;
      case Kind::record: {
        std::vector<std::unique_ptr<Node>> reordered;
        for (std::size_t i = 0; i < target.field_names.size(); ++i) {
          auto it = std::find(names.begin(), names.end(), target.field_names[i]);
          std::unique_ptr<Node> child;
          if (it != names.end()) {
            child = std::move(children[static_cast<std::size_t>(it - names.begin())]);
          } else {
            // Field first seen now: every earlier row lacks it.
            child = std::make_unique<Node>(panel_capacity);
            child->kind = Kind::option;
            child->positions.emplace(panel_capacity);
            for (std::size_t r = 0; r < record_length; ++r) child->positions->append(-1);
            child->children.push_back(std::make_unique<Node>(panel_capacity));
          }
          child->promote(target.children[i]);
          reordered.push_back(std::move(child));
        }
        names = target.field_names;
        children = std::move(reordered);
        return;
      }
    }
  }

  /// Turns an empty unknown node into an empty node of `target`'s type.
  void become(const InferredType& target) {
    kind = target.kind;
    switch (kind) {
      case Kind::unknown:
        return;
      case Kind::boolean:
        data = GrowableBuffer<bool>(panel_capacity);
        return;
      case Kind::integer:
        data = GrowableBuffer<std::int64_t>(panel_capacity);
        return;
      case Kind::real:
        data = GrowableBuffer<double>(panel_capacity);
        return;
      case Kind::list:
      case Kind::option:
        positions.emplace(panel_capacity);
        if (kind == Kind::list) positions->append(0);
        children.push_back(std::make_unique<Node>(panel_capacity));
        children[0]->become(target.children[0]);
        return;
      case Kind::record:
        names = target.field_names;
        for (const auto& field : target.children) {
          children.push_back(std::make_unique<Node>(panel_capacity));
          children.back()->become(field);
        }
        return;
    }
  }

  FormNode form() const {
    switch (kind) {
      case Kind::unknown:
      case Kind::real:
        return FormNode::primitive(PrimitiveType::float64);
      case Kind::boolean:
        return FormNode::primitive(PrimitiveType::boolean);
      case Kind::integer:
        return FormNode::primitive(PrimitiveType::int64);
      case Kind::list:
        return FormNode::list_offset(children[0]->form());
      case Kind::option:
        return FormNode::indexed_option(children[0]->form());
      case Kind::record: {
        std::vector<std::pair<std::string, FormNode>> fields;
        for (std::size_t i = 0; i < names.size(); ++i) fields.emplace_back(names[i], children[i]->form());
        return FormNode::record(std::move(fields));
      }
    }
    return FormNode::primitive(PrimitiveType::float64);
  }

  void collect(const FormNode& form_node, std::vector<NamedBuffer>& out) const {
    auto copy = [&](const auto& buffer) {
      NamedBuffer named{*form_node.buffer_name(), std::vector<std::byte>(buffer.nbytes())};
      buffer.concatenate_into(std::span<std::byte>(named.bytes));
      out.push_back(std::move(named));
    };
    switch (kind) {
      case Kind::unknown:
        out.push_back({*form_node.buffer_name(), {}});
        return;
      case Kind::boolean:
      case Kind::integer:
      case Kind::real:
        std::visit(
            [&](const auto& buffer) {
              if constexpr (!std::is_same_v<std::decay_t<decltype(buffer)>, std::monostate>) copy(buffer);
            },
            data);
        return;
      case Kind::list:
      case Kind::option:
        copy(*positions);
        children[0]->collect(form_node.content(), out);
        return;
      case Kind::record:
        for (std::size_t i = 0; i < children.size(); ++i) children[i]->collect(form_node.children()[i], out);
        return;
    }
  }
};

DynamicBuilder::DynamicBuilder(std::size_t panel_capacity)
    : panel_capacity_(panel_capacity), root_(std::make_unique<Node>(panel_capacity)) {
  if (panel_capacity == 0) {
    throw ConfigError("panel capacity must be positive");
  }
}

DynamicBuilder::~DynamicBuilder() = default;
DynamicBuilder::DynamicBuilder(DynamicBuilder&&) noexcept = default;
DynamicBuilder& DynamicBuilder::operator=(DynamicBuilder&&) noexcept = default;

void DynamicBuilder::append_value(const LogicalValue& value) {
  if (!root_->fits(value)) {
    std::string path = "$[" + std::to_string(rows_) + "]";
    InferredType incoming;
    try {
      incoming = InferredType::of(value);
    } catch (const BuilderError& e) {
      throw BuilderError(path + e.what());
    }
    root_->promote(InferredType::join(root_->type(), incoming, path));
  }
  root_->append(value);
  ++rows_;
}

std::size_t DynamicBuilder::length() const { return rows_; }

InferredType DynamicBuilder::inferred_type() const { return root_->type(); }

FormNode DynamicBuilder::form_node() const {
  FormNode form = root_->form();
  assign_form_keys(form);
  return form;
}

std::string DynamicBuilder::form() const { return serialize(form_node()); }

BufferSet DynamicBuilder::snapshot() const {
  BufferSet set;
  FormNode form = form_node();
  set.form = serialize(form);
  set.length = rows_;
  root_->collect(form, set.buffers);
  return set;
}

}  // namespace layoutkit
