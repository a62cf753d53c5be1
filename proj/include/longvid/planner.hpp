#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "longvid/llm_gateway.hpp"
#include "longvid/tool_protocol.hpp"

namespace longvid {

struct Plan {
  std::string rationale_text;
  ToolCommand next_action;
  int created_at_t = 1;
  int revision = 0;
};

/// Extracts the last well-formed {'Action': ...} object from `text` and turns
/// it into a typed command. Single- and double-quoted notation are both
/// accepted, as is an Action whose value is the command serialized as a
/// string. Throws Error with NoAction, UnknownTool, MissingParameter or
/// InvalidParameter. Frame ranges are checked for syntax only.
ToolCommand parse_action(std::string_view text);

/// Every valid Action object in textual order; malformed ones are skipped.
std::vector<ToolCommand> parse_all_actions(std::string_view text);

struct PlanOutcome {
  Plan plan;
  bool reprompted = false;
  std::vector<std::string> warnings;
};

/// Initial plan on the session conversation (which already holds the answer
/// round). One reprompt on a bad action, then throws Planner.
PlanOutcome create_plan(Conversation& conv, LlmGateway& llm, int t);

/// Adjusted plan; revision = prev.revision + 1. Repeating the previous action
/// is allowed but reported as a warning.
PlanOutcome adjust_plan(Conversation& conv, LlmGateway& llm, const Plan& prev, int t);

/// No-CoT variant: asks for a tool command directly, without plan prose or
/// step-by-step instructions.
PlanOutcome direct_action(Conversation& conv, LlmGateway& llm, int t);

}  // namespace longvid
