#include "longvid/orchestrator.hpp"

#include <deque>

#include "longvid/error.hpp"
#include "longvid/trace.hpp"

namespace longvid {
namespace {

using json = nlohmann::json;

void check_setting(int setting) {
  if (setting < 0 || setting > 4) {
    throw Error(ErrorKind::InvalidArgument, "ablation setting must be in 0..4, got " + std::to_string(setting));
  }
}

json flags_json(const AblationFlags& f) {
  json j;
  j["no_tool_confidence"] = f.no_tool_confidence;
  j["no_plan_adjust"] = f.no_plan_adjust;
  j["no_cot"] = f.no_cot;
  j["no_tools"] = f.no_tools;
  return j;
}

json answer_json(const AnswerCandidate& c) {
  json j;
  j["label"] = c.option_label ? json(std::string(1, *c.option_label)) : json(nullptr);
  j["confidence"] = c.confidence;
  return j;
}

class Session {
 public:
  Session(const VideoManifest& manifest, const MCQItem& question, const SessionConfig& cfg, SessionDeps deps)
      : manifest_(manifest),
        question_(question),
        cfg_(cfg),
        deps_(deps),
        conv_(question.item_id),
        start_(std::chrono::steady_clock::now()) {}

  SessionResult run();

 private:
  void emit(json event) { result_.trace.emplace_back(std::move(event)); }

  void warn(std::string message) {
    json j;
    j["event"] = "warning";
    j["message"] = message;
    emit(std::move(j));
    result_.warnings.push_back(std::move(message));
  }

  // One "llm" event per exchange appended to the conversation since the last call.
  void log_turns(std::string_view phase, int t) {
    const auto& turns = conv_.turns();
    for (; logged_ + 1 < turns.size(); logged_ += 2) {
      json j;
      j["event"] = "llm";
      j["phase"] = phase;
      j["t"] = t;
      j["prompt_fp"] = fingerprint(turns[logged_].text);
      j["reply"] = turns[logged_ + 1].text;
      emit(std::move(j));
    }
  }

  void check_deadline(std::string_view where) const {
    if (cfg_.timeout.count() <= 0) return;
    if (std::chrono::steady_clock::now() - start_ > cfg_.timeout) {
      throw Error(ErrorKind::Timeout, "session '" + question_.item_id + "' exceeded its time budget " +
                                          std::string(where));
    }
  }

  MemoryBank build_context();
  std::optional<PlanOutcome> next_plan(int t);
  ToolRecord execute(const ToolCommand& command, int t);

  const VideoManifest& manifest_;
  const MCQItem& question_;
  const SessionConfig& cfg_;
  SessionDeps deps_;
  Conversation conv_;
  std::chrono::steady_clock::time_point start_;
  SessionResult result_;
  SegmentPlan segments_;
  std::size_t logged_ = 0;
  bool dispatched_ = false;
  std::optional<Plan> plan_;
  std::optional<ToolCommand> first_executed_;
  std::deque<ToolCommand> leftover_;
};

MemoryBank Session::build_context() {
  segments_ = plan_segments(manifest_.length_s, cfg_.fps_d, cfg_.n);
  auto caps = caption_all(segments_, deps_.captioner, cfg_.caption_concurrency);
  for (auto& w : caps.warnings) warn(std::move(w));
  bool any = false;
  for (const auto& c : caps.captions) any = any || c.text != kCaptionUnavailable;
  if (!any) throw Error(ErrorKind::Context, "no segment of '" + manifest_.video_id + "' could be captioned");
  check_deadline("while captioning");

  std::string prompt;
  auto summary = summarize(caps.captions, deps_.llm, cfg_.n, deps_.captioner.egocentric_markers(), &prompt);
  json j;
  j["event"] = "llm";
  j["phase"] = "summary";
  j["t"] = 0;
  j["prompt_fp"] = fingerprint(prompt);
  j["reply"] = summary.text;
  emit(std::move(j));
  json ctx;
  ctx["event"] = "context";
  ctx["segments"] = segments_.segments.size();
  ctx["total_frames"] = segments_.total_frames;
  emit(std::move(ctx));
  return MemoryBank(std::move(caps.captions), std::move(summary));
}

std::optional<PlanOutcome> Session::next_plan(int t) {
  const auto& ab = cfg_.ablation;
  if (t > 1 && ab.no_plan_adjust) {
    PlanOutcome out;
    out.plan = *plan_;
    out.plan.created_at_t = t;
    if (!leftover_.empty()) {
      out.plan.next_action = leftover_.front();
      leftover_.pop_front();
    } else {
      out.plan.next_action = *first_executed_;
      out.warnings.push_back("original plan has no further actions; repeating its first action");
    }
    return out;
  }
  PlanOutcome out;
  if (ab.no_cot) {
    out = direct_action(conv_, deps_.llm, t);
  } else if (t == 1) {
    out = create_plan(conv_, deps_.llm, t);
  } else {
    out = adjust_plan(conv_, deps_.llm, *plan_, t);
  }
  if (t == 1 && ab.no_plan_adjust) {
    // Remaining steps of the original plan, in the order they were written.
    bool skipped = false;
    for (auto& cmd : parse_all_actions(out.plan.rationale_text)) {
      if (!skipped && cmd == out.plan.next_action) {
        skipped = true;
        continue;
      }
      leftover_.push_back(std::move(cmd));
    }
  }
  return out;
}

ToolRecord Session::execute(const ToolCommand& command, int t) {
  try {
    validate_command(command, segments_.total_frames, manifest_.width, manifest_.height);
  } catch (const Error& e) {
    ToolRecord rec;
    rec.step_t = t;
    rec.command = command;
    rec.returns.kind = command.kind;
    rec.returns.error = "invalid command (" + std::string(to_string(e.kind())) + "): " + e.what();
    dispatched_ = false;
    return rec;
  }
  dispatched_ = true;
  return dispatch(command, deps_.registry, t);
}

SessionResult Session::run() {
  result_.item_id = question_.item_id;
  {
    json j;
    j["event"] = "session";
    j["item_id"] = question_.item_id;
    j["video_id"] = question_.video_id;
    j["question_type"] = to_string(question_.question_type);
    j["fps_d"] = cfg_.fps_d;
    j["n"] = cfg_.n;
    j["cf_thr"] = cfg_.cf_thr;
    j["max_assessments"] = cfg_.max_assessments;
    j["alpha"] = cfg_.fusion.alpha;
    j["init_conf_thr"] = cfg_.fusion.init_conf_thr;
    j["ablation"] = flags_json(cfg_.ablation);
    emit(std::move(j));
  }

  MemoryBank bank = build_context();
  const int T = cfg_.max_assessments;
  const AssessOptions assess_opts{RenderOptions{cfg_.ablation.no_tool_confidence}, !cfg_.ablation.no_cot};
  result_.terminated_by = Termination::BudgetExhausted;

  for (int t = 1; t <= T; ++t) {
    check_deadline("before assessment " + std::to_string(t));
    auto a = assess(bank, question_, conv_, deps_.llm, assess_opts);
    log_turns("answer", t);
    for (auto& w : a.warnings) warn(std::move(w));
    const auto decision = decide(a.candidate, cfg_.cf_thr);
    {
      json j;
      j["event"] = "assessment";
      j["t"] = t;
      j["answer"] = answer_json(a.candidate);
      j["decision"] = to_string(decision);
      j["reprompted"] = a.reprompted;
      emit(std::move(j));
    }
    result_.assessments.push_back({t, a.candidate, decision});
    result_.final_answer = a.candidate;

    if (decision == Decision::Accept) {
      result_.terminated_by = Termination::ConfidenceMet;
      break;
    }
    // No retrieval after the last assessment, and none at all without tools.
    if (t == T || cfg_.ablation.no_tools) break;

    std::optional<PlanOutcome> outcome;
    try {
      outcome = next_plan(t);
    } catch (const Error& e) {
      log_turns("plan", t);
      if (e.kind() != ErrorKind::Planner) throw;
      warn(e.what());
      result_.terminated_by = Termination::PlannerFallback;
      break;
    }
    log_turns("plan", t);
    for (auto& w : outcome->warnings) warn(std::move(w));
    plan_ = outcome->plan;
    const auto& cmd = plan_->next_action;
    {
      json j;
      j["event"] = "plan";
      j["t"] = t;
      j["revision"] = plan_->revision;
      j["action"] = format_command(cmd);
      j["reprompted"] = outcome->reprompted;
      emit(std::move(j));
    }

    check_deadline("before tool call " + std::to_string(t));
    auto rec = execute(cmd, t);
    if (!first_executed_) first_executed_ = cmd;
    {
      json j;
      j["event"] = "tool";
      j["t"] = t;
      j["tool"] = tool_name(cmd.kind);
      j["request"] = json::parse(encode_request(cmd));
      j["response"] = json::parse(encode_response(rec.returns));
      j["dispatched"] = dispatched_;
      if (rec.returns.sanitized) j["sanitized"] = true;
      emit(std::move(j));
    }
    result_.tool_records.push_back(rec);
    bank = merge(std::move(bank), std::move(rec));
  }

  {
    json j;
    j["event"] = "final";
    j["answer"] = answer_json(result_.final_answer);
    j["assessments"] = result_.assessments.size();
    j["tool_calls"] = result_.tool_records.size();
    j["terminated_by"] = to_string(result_.terminated_by);
    emit(std::move(j));
  }
  result_.transcript = conv_.turns();
  result_.bank = std::move(bank);
  return std::move(result_);
}

}  // namespace

AblationFlags AblationFlags::stacked(int setting) {
  check_setting(setting);
  AblationFlags f;
  f.no_tool_confidence = setting >= 1;
  f.no_plan_adjust = setting >= 2;
  f.no_cot = setting >= 3;
  f.no_tools = setting >= 4;
  return f;
}

AblationFlags AblationFlags::isolated(int setting) {
  check_setting(setting);
  AblationFlags f;
  f.no_tool_confidence = setting == 1;
  f.no_plan_adjust = setting == 2;
  f.no_cot = setting == 3;
  f.no_tools = setting == 4;
  return f;
}

void validate(const SessionConfig& cfg) {
  auto bad = [](const std::string& what) { throw Error(ErrorKind::InvalidArgument, what); };
  if (!(cfg.fps_d > 0)) bad("fps_d must be positive");
  if (!(cfg.n > 0)) bad("n must be positive");
  if (cfg.n * cfg.fps_d < 1.0 - 1e-9) bad("a segment must hold at least one frame (n * fps_d >= 1)");
  if (cfg.cf_thr < 0 || cfg.cf_thr > 5) bad("cf_thr must lie in 0..5");
  if (cfg.max_assessments < 1) bad("max_assessments must be >= 1");
  if (cfg.fusion.alpha < 0) bad("alpha must be >= 0");
  if (!(cfg.fusion.init_conf_thr >= 0 && cfg.fusion.init_conf_thr <= 1)) bad("init_conf_thr must lie in [0, 1]");
  if (cfg.caption_concurrency < 1) bad("caption_concurrency must be >= 1");
  if (cfg.timeout.count() < 0) bad("timeout must be >= 0");
}

std::string_view to_string(Termination termination) {
  switch (termination) {
    case Termination::ConfidenceMet: return "confidence_met";
    case Termination::BudgetExhausted: return "budget_exhausted";
    case Termination::PlannerFallback: return "planner_fallback";
  }
  return "budget_exhausted";
}

SessionResult run_session(const VideoManifest& manifest, const MCQItem& question, const SessionConfig& cfg,
                          SessionDeps deps) {
  validate(cfg);
  validate(question);
  if (!cfg.ablation.no_tools && !deps.registry.has_all()) {
    throw Error(ErrorKind::Config, "tool registry must provide all five tools");
  }
  return Session(manifest, question, cfg, deps).run();
}

}  // namespace longvid
