#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "longvid/error.hpp"
#include "longvid/planner.hpp"
#include "text_util.hpp"

namespace longvid {
namespace {

// Just enough of Python/JSON literal syntax for what chat models print.
struct Value {
  enum class Type { Str, Num, Dict, List, Null } type = Type::Null;
  std::string str;
  double num = 0.0;
  std::vector<std::pair<std::string, Value>> dict;
  std::vector<Value> list;

  const Value* get(std::string_view key) const {
    for (const auto& [k, v] : dict) {
      if (detail::iequals(detail::trim(k), key)) return &v;
    }
    return nullptr;
  }
};

class LiteralParser {
 public:
  LiteralParser(std::string_view text, std::size_t pos) : s_(text), i_(pos) {}

  std::optional<Value> dict() {
    if (!eat('{')) return std::nullopt;
    Value v;
    v.type = Value::Type::Dict;
    skip();
    if (eat('}')) return v;
    for (;;) {
      skip();
      auto key = string();
      if (!key) return std::nullopt;
      skip();
      if (!eat(':')) return std::nullopt;
      auto val = value();
      if (!val) return std::nullopt;
      v.dict.emplace_back(std::move(*key), std::move(*val));
      skip();
      if (eat(',')) {
        skip();
        if (eat('}')) return v;
        continue;
      }
      if (eat('}')) return v;
      return std::nullopt;
    }
  }

  std::size_t pos() const { return i_; }

 private:
  bool eat(char c) {
    if (i_ < s_.size() && s_[i_] == c) {
      ++i_;
      return true;
    }
    return false;
  }

  // Whitespace and '#' comments.
  void skip() {
    while (i_ < s_.size()) {
      if (detail::is_space(s_[i_])) {
        ++i_;
      } else if (s_[i_] == '#') {
        // The comment runs to the end of the line, minus any closing brackets
        // the tool descriptions put after it.
        auto eol = s_.find('\n', i_);
        if (eol == std::string_view::npos) eol = s_.size();
        auto end = eol;
        while (end > i_ && (s_[end - 1] == '}' || s_[end - 1] == ']' || detail::is_space(s_[end - 1]))) --end;
        i_ = end;
      } else {
        break;
      }
    }
  }

  std::optional<std::string> string() {
    if (i_ >= s_.size()) return std::nullopt;
    const char q = s_[i_];
    if (q != '\'' && q != '"') return std::nullopt;
    ++i_;
    std::string out;
    while (i_ < s_.size()) {
      char c = s_[i_++];
      if (c == q) return out;
      if (c == '\n') return std::nullopt;
      if (c == '\\' && i_ < s_.size()) {
        char e = s_[i_++];
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          default: out += e;
        }
        continue;
      }
      out += c;
    }
    return std::nullopt;
  }

  std::optional<Value> value() {
    skip();
    if (i_ >= s_.size()) return std::nullopt;
    const char c = s_[i_];
    if (c == '{') return dict();
    if (c == '[') {
      ++i_;
      Value v;
      v.type = Value::Type::List;
      skip();
      if (eat(']')) return v;
      for (;;) {
        auto item = value();
        if (!item) return std::nullopt;
        v.list.push_back(std::move(*item));
        skip();
        if (eat(',')) {
          skip();
          if (eat(']')) return v;
          continue;
        }
        if (eat(']')) return v;
        return std::nullopt;
      }
    }
    if (c == '\'' || c == '"') {
      auto str = string();
      if (!str) return std::nullopt;
      Value v;
      v.type = Value::Type::Str;
      v.str = std::move(*str);
      return v;
    }
    if (c == '-' || c == '+' || c == '.' || std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i_;
      while (j < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[j])) || s_[j] == '.' || s_[j] == '-' ||
                               s_[j] == '+' || s_[j] == 'e' || s_[j] == 'E')) {
        ++j;
      }
      std::string tok(s_.substr(i_, j - i_));
      try {
        std::size_t used = 0;
        double d = std::stod(tok, &used);
        if (used != tok.size()) return std::nullopt;
        i_ = j;
        Value v;
        v.type = Value::Type::Num;
        v.num = d;
        v.str = tok;
        return v;
      } catch (const std::logic_error&) {
        return std::nullopt;
      }
    }
    for (std::string_view word : {"None", "null", "True", "true", "False", "false"}) {
      if (s_.substr(i_, word.size()) == word) {
        i_ += word.size();
        Value v;
        v.str = std::string(word);
        return v;
      }
    }
    return std::nullopt;
  }

  std::string_view s_;
  std::size_t i_;
};

// Every syntactically complete dict with an 'Action' key, in textual order.
std::vector<Value> find_action_values(std::string_view text) {
  std::vector<Value> out;
  std::size_t pos = 0;
  while ((pos = text.find('{', pos)) != std::string_view::npos) {
    LiteralParser p(text, pos);
    auto d = p.dict();
    if (d) {
      if (const Value* a = d->get("Action")) {
        out.push_back(*a);
        pos = p.pos();
        continue;
      }
    }
    ++pos;
  }
  return out;
}

std::string scalar_text(const Value& v) {
  if (v.type == Value::Type::Num) return format_number(v.num);
  return std::string(detail::trim(v.str));
}

ToolCommand command_from_dict(const Value& d) {
  const Value* name = d.get("tool_name");
  if (!name || scalar_text(*name).empty()) throw Error(ErrorKind::MissingParameter, "action has no 'tool_name'");
  auto kind = tool_from_name(scalar_text(*name));
  if (!kind) throw Error(ErrorKind::UnknownTool, "unknown tool '" + scalar_text(*name) + "'");

  ToolCommand cmd;
  cmd.kind = *kind;
  const Value* range = d.get("frame_range");
  if (!range || scalar_text(*range).empty()) {
    throw Error(ErrorKind::MissingParameter, std::string(tool_name(*kind)) + " needs 'frame_range'");
  }
  try {
    cmd.frame_range = parse_frame_range(scalar_text(*range));
  } catch (const Error& e) {
    throw Error(ErrorKind::InvalidParameter, e.what());
  }

  if (is_zoom(*kind)) {
    const Value* box = d.get("bbox");
    if (!box) throw Error(ErrorKind::MissingParameter, std::string(tool_name(*kind)) + " needs 'bbox'");
    std::string box_text;
    if (box->type == Value::Type::List) {
      for (const auto& item : box->list) {
        if (item.type != Value::Type::Num && item.type != Value::Type::Str) {
          throw Error(ErrorKind::InvalidParameter, "bbox entries must be numbers");
        }
        if (!box_text.empty()) box_text += ',';
        box_text += scalar_text(item);
      }
    } else {
      box_text = scalar_text(*box);
    }
    try {
      cmd.bbox = parse_bbox(box_text);
    } catch (const Error& e) {
      throw Error(ErrorKind::InvalidParameter, e.what());
    }
  }

  if (*kind == ToolKind::Track) {
    const Value* obj = d.get("object_name");
    if (!obj || scalar_text(*obj).empty()) {
      throw Error(ErrorKind::MissingParameter, "Object Tracking Tool needs 'object_name'");
    }
    cmd.object_name = scalar_text(*obj);
  }
  return cmd;
}

ToolCommand command_from_action(const Value& action) {
  if (action.type == Value::Type::Dict) return command_from_dict(action);
  if (action.type == Value::Type::Str) {
    auto inner = find_action_values(action.str);
    if (!inner.empty()) return command_from_action(inner.back());
    auto start = action.str.find('{');
    if (start != std::string::npos) {
      LiteralParser p(action.str, start);
      if (auto d = p.dict()) return command_from_dict(*d);
    }
  }
  throw Error(ErrorKind::NoAction, "the Action value is not a tool call command");
}

}  // namespace

ToolCommand parse_action(std::string_view text) {
  auto actions = find_action_values(text);
  if (actions.empty()) throw Error(ErrorKind::NoAction, "no {'Action': ...} object in the reply");
  return command_from_action(actions.back());
}

std::vector<ToolCommand> parse_all_actions(std::string_view text) {
  std::vector<ToolCommand> out;
  for (const auto& a : find_action_values(text)) {
    try {
      out.push_back(command_from_action(a));
    } catch (const Error&) {
    }
  }
  return out;
}

}  // namespace longvid
