#include "longvid/planner.hpp"

#include "longvid/error.hpp"
#include "longvid/prompts.hpp"

namespace longvid {
namespace {

PlanOutcome run_planning(Conversation& conv, LlmGateway& llm, std::string prompt, int t, int revision) {
  PlanOutcome out;
  out.plan.created_at_t = t;
  out.plan.revision = revision;
  auto reply = llm.complete(conv, std::move(prompt));
  try {
    out.plan.next_action = parse_action(reply);
    out.plan.rationale_text = reply;
    return out;
  } catch (const Error& e) {
    out.warnings.push_back(std::string("unusable action (") + std::string(to_string(e.kind())) + "): " + e.what());
  }
  out.reprompted = true;
  reply = llm.complete(conv, std::string(prompts::action_reprompt()));
  try {
    out.plan.next_action = parse_action(reply);
    out.plan.rationale_text = reply;
    return out;
  } catch (const Error& e) {
    throw Error(ErrorKind::Planner, std::string("no usable action after reprompt: ") + e.what());
  }
}

}  // namespace

PlanOutcome create_plan(Conversation& conv, LlmGateway& llm, int t) {
  return run_planning(conv, llm, std::string(prompts::create_plan()), t, 0);
}

PlanOutcome adjust_plan(Conversation& conv, LlmGateway& llm, const Plan& prev, int t) {
  auto out = run_planning(conv, llm, std::string(prompts::adjust_plan()), t, prev.revision + 1);
  if (out.plan.next_action == prev.next_action) {
    out.warnings.push_back("adjusted plan repeats the previous action " + format_command(prev.next_action));
  }
  return out;
}

PlanOutcome direct_action(Conversation& conv, LlmGateway& llm, int t) {
  return run_planning(conv, llm, prompts::render_direct_action(), t, 0);
}

}  // namespace longvid
