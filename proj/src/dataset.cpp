#include <map>

#include "longvid/bench.hpp"
#include "longvid/error.hpp"
#include "text_util.hpp"

namespace longvid {
namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& source, int line, const std::string& what) {
  throw Error(ErrorKind::Schema, source + ":" + std::to_string(line) + ": " + what);
}

char label_at(std::size_t i) { return static_cast<char>('A' + i); }

std::string as_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  return v.dump();
}

// Gold answers come as a label ("B"), an index (1 or "1"), or the option text.
std::optional<char> gold_from(const json& v, const std::vector<MCQOption>& options) {
  if (v.is_null()) return std::nullopt;
  if (v.is_number_integer()) {
    auto i = v.get<long long>();
    if (i < 0 || static_cast<std::size_t>(i) >= options.size()) return '?';
    return label_at(static_cast<std::size_t>(i));
  }
  auto s = std::string(detail::trim(as_text(v)));
  if (s.empty()) return std::nullopt;
  if (s.size() == 1 && std::isalpha(static_cast<unsigned char>(s[0]))) {
    return static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  }
  if (std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    return gold_from(json(std::stoll(s)), options);
  }
  for (const auto& o : options) {
    if (detail::iequals(detail::trim(o.text), s)) return o.label;
  }
  return '?';
}

QuestionType nextqa_type(std::string_view code) {
  auto c = detail::to_lower(detail::trim(code));
  if (c.empty()) return QuestionType::Unknown;
  if (auto full = question_type_from_string(c); full != QuestionType::Unknown) return full;
  switch (c.front()) {
    case 'c': return QuestionType::Causal;
    case 't': return QuestionType::Temporal;
    case 'd': return QuestionType::Descriptive;
    default: return QuestionType::Unknown;
  }
}

void finish(MCQItem& item, const std::string& source, int line) {
  try {
    validate(item);
  } catch (const Error& e) {
    fail(source, line, e.what());
  }
}

MCQItem from_generic(const json& j, const std::string& source, int line) {
  MCQItem item;
  try {
    item.item_id = as_text(j.at("item_id"));
    item.video_id = as_text(j.at("video_id"));
    item.question = j.at("question").get<std::string>();
    const auto& opts = j.at("options");
    if (opts.is_array()) {
      for (std::size_t i = 0; i < opts.size(); ++i) item.options.push_back({label_at(i), as_text(opts[i])});
    } else if (opts.is_object()) {
      for (const auto& [k, v] : opts.items()) {
        if (k.size() != 1) fail(source, line, "option key '" + k + "' is not a single letter");
        item.options.push_back({static_cast<char>(std::toupper(static_cast<unsigned char>(k[0]))), as_text(v)});
      }
    } else {
      fail(source, line, "'options' must be a list or an object");
    }
    if (j.contains("answer")) item.gold_label = gold_from(j["answer"], item.options);
    if (j.contains("type")) item.question_type = nextqa_type(as_text(j["type"]));
  } catch (const json::exception& e) {
    fail(source, line, e.what());
  }
  finish(item, source, line);
  return item;
}

MCQItem from_egoschema(const json& j, const std::string& source, int line) {
  MCQItem item;
  try {
    item.item_id = as_text(j.at("q_uid"));
    item.video_id = j.contains("video_id") ? as_text(j["video_id"]) : item.item_id;
    item.question = j.at("question").get<std::string>();
    for (std::size_t i = 0; i < 5; ++i) {
      auto key = "option " + std::to_string(i);
      if (!j.contains(key)) break;
      item.options.push_back({label_at(i), as_text(j[key])});
    }
    if (j.contains("answer")) item.gold_label = gold_from(j["answer"], item.options);
  } catch (const json::exception& e) {
    fail(source, line, e.what());
  }
  finish(item, source, line);
  return item;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text, const std::string& source) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, any = false;
  int line = 1;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      row.clear();
      field.clear();
      any = false;
      ++line;
    } else {
      field += c;
      any = true;
    }
  }
  if (quoted) fail(source, line, "unterminated quoted field");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<MCQItem> from_nextqa_csv(const std::string& text, const std::string& source) {
  auto rows = parse_csv(text, source);
  if (rows.empty()) return {};
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < rows[0].size(); ++i) col[detail::to_lower(detail::trim(rows[0][i]))] = i;
  for (const char* need : {"video", "question", "qid", "a0", "a1"}) {
    if (!col.count(need)) fail(source, 1, std::string("missing column '") + need + "'");
  }
  std::vector<MCQItem> items;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const int line = static_cast<int>(r + 1);
    const auto& row = rows[r];
    if (row.size() != rows[0].size()) {
      fail(source, line, "expected " + std::to_string(rows[0].size()) + " fields, got " + std::to_string(row.size()));
    }
    auto get = [&](const std::string& name) -> std::string {
      auto it = col.find(name);
      return it == col.end() ? std::string{} : std::string(detail::trim(row[it->second]));
    };
    MCQItem item;
    item.video_id = get("video");
    item.item_id = item.video_id + "_" + get("qid");
    item.question = get("question");
    for (std::size_t i = 0; i < 5; ++i) {
      auto key = "a" + std::to_string(i);
      if (!col.count(key)) break;
      item.options.push_back({label_at(i), get(key)});
    }
    if (auto ans = get("answer"); !ans.empty()) item.gold_label = gold_from(json(ans), item.options);
    item.question_type = nextqa_type(get("type"));
    finish(item, source, line);
    items.push_back(std::move(item));
  }
  return items;
}

}  // namespace

DatasetFormat dataset_format_from_string(std::string_view name) {
  auto n = detail::to_lower(detail::trim(name));
  if (n == "generic" || n == "jsonl") return DatasetFormat::Generic;
  if (n == "egoschema") return DatasetFormat::EgoSchema;
  if (n == "nextqa" || n == "next-qa") return DatasetFormat::NextQA;
  if (n == "intentqa") return DatasetFormat::IntentQA;
  throw Error(ErrorKind::Config, "unknown dataset format '" + std::string(name) + "'");
}

std::vector<MCQItem> parse_dataset(const std::string& text, DatasetFormat format, const std::string& source_name) {
  if (format == DatasetFormat::NextQA || format == DatasetFormat::IntentQA) {
    return from_nextqa_csv(text, source_name);
  }
  auto convert = [&](const json& j, int line) {
    return format == DatasetFormat::EgoSchema ? from_egoschema(j, source_name, line)
                                              : from_generic(j, source_name, line);
  };
  std::vector<MCQItem> items;
  auto body = detail::trim(text);
  if (format == DatasetFormat::EgoSchema && !body.empty() && body.front() == '[') {
    json arr;
    try {
      arr = json::parse(body);
    } catch (const json::exception& e) {
      fail(source_name, 1, e.what());
    }
    for (std::size_t i = 0; i < arr.size(); ++i) items.push_back(convert(arr[i], static_cast<int>(i + 1)));
    return items;
  }
  int line = 0;
  for (const auto& raw : detail::split_lines(text)) {
    ++line;
    auto t = detail::trim(raw);
    if (t.empty() || t.front() == '#') continue;
    json j;
    try {
      j = json::parse(t);
    } catch (const json::exception& e) {
      fail(source_name, line, e.what());
    }
    items.push_back(convert(j, line));
  }
  return items;
}

std::vector<MCQItem> load_dataset(const std::filesystem::path& path, DatasetFormat format) {
  return parse_dataset(detail::read_file(path), format, path.string());
}

}  // namespace longvid
