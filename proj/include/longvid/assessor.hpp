#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "longvid/llm_gateway.hpp"
#include "longvid/memory_bank.hpp"
#include "longvid/question.hpp"

namespace longvid {

struct AnswerCandidate {
  std::optional<char> option_label;
  std::string free_text;
  int confidence = 0;  // 0..5, 0 means "not enough information"

  bool operator==(const AnswerCandidate&) const = default;
};

enum class Decision { Accept, Retrieve };

std::string_view to_string(Decision decision);

struct ParsedAnswer {
  AnswerCandidate candidate;
  std::vector<std::string> warnings;
};

/// Reads the last "(confidence score = N)" and, for "Yes, the answer is X"
/// replies, the option label. Labels match case-insensitively; an answer
/// given as option text is mapped back to its label. Out-of-range scores are
/// clamped with a warning. Returns nullopt when no score is present.
std::optional<ParsedAnswer> parse_answer_reply(std::string_view text,
                                               std::span<const char> valid_labels,
                                               std::span<const MCQOption> options = {});

/// Canonical "Yes" reply; the inverse of parse_answer_reply.
std::string format_answer_reply(char label, int confidence);

Decision decide(const AnswerCandidate& candidate, int cf_thr);

struct AssessOptions {
  RenderOptions render;
  /// Keep the "Please think step by step." sentence in the prompt.
  bool step_by_step = true;
};

struct Assessment {
  AnswerCandidate candidate;
  bool parsed = false;
  bool reprompted = false;
  std::vector<std::string> warnings;
  std::string prompt;
};

/// One answer-plus-confidence round on `conv`. An unreadable reply is
/// reprompted once; a second failure yields confidence 0 and no label.
Assessment assess(const MemoryBank& bank, const MCQItem& question, Conversation& conv,
                  LlmGateway& llm, const AssessOptions& options = {});

}  // namespace longvid
