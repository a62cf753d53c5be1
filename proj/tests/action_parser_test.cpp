#include <gtest/gtest.h>

#include "longvid/error.hpp"
#include "longvid/planner.hpp"
#include "support.hpp"

using namespace longvid;

namespace {

ErrorKind kind_of(std::string_view text) {
  try {
    parse_action(text);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "parsed: " << text;
  return ErrorKind::Io;
}

}  // namespace

TEST(ParseAction, FixtureCommands) {
  for (const std::string name : {"caption", "detect", "zoom_caption", "zoom_detect", "track"}) {
    auto text = testing_support::slurp(testing_support::fixture("commands/" + name + ".txt"));
    auto expected = testing_support::slurp(testing_support::fixture("commands/" + name + ".expected"));
    EXPECT_EQ(format_command(parse_action(text)), expected) << name;
  }
}

TEST(ParseAction, Notations) {
  const ToolCommand track{ToolKind::Track, {10, 30}, std::nullopt, "phone"};
  EXPECT_EQ(parse_action(R"({"Action": {"tool_name": "Object Tracking Tool", "object_name": "phone", "frame_range": "10-30"}})"),
            track);
  EXPECT_EQ(parse_action(R"({'action': "{'tool_name': 'Object Tracking Tool', 'object_name': 'phone', 'frame_range': '10-30'}"})"),
            track);
  EXPECT_EQ(parse_action("{'Action': {'tool_name': 'Object Tracking Tool', 'object_name': 'phone', "
                         "'frame_range': '10-30' # or 'start frame-end frame'\n}}"),
            track);
  auto zoom = parse_action("{'Action': {'tool_name': 'Image Zoom in and Caption Tool', 'frame_range': 7, "
                           "'bbox': [1, 2, 30, 40]}}");
  EXPECT_EQ(zoom.kind, ToolKind::ZoomCaption);
  EXPECT_EQ(zoom.frame_range, (FrameRange{7, 7}));
  EXPECT_EQ(zoom.bbox, (BBox{1, 2, 30, 40}));
}

TEST(ParseAction, LastActionWins) {
  auto text = "First {'Action': {'tool_name': 'Image Caption Tool', 'frame_range': '1-2'}} then "
              "{'Action': {'tool_name': 'Object Detection Tool', 'frame_range': '3'}}";
  EXPECT_EQ(parse_action(text).kind, ToolKind::Detect);
  auto all = parse_all_actions(std::string(text) + " {'Action': {'tool_name': 'Hammer'}}");
  ASSERT_EQ(all.size(), 2u);
  EXPECT_EQ(all[0].kind, ToolKind::Caption);
  EXPECT_EQ(all[1].frame_range, (FrameRange{3, 3}));
}

TEST(ParseAction, Errors) {
  EXPECT_EQ(kind_of("I would like to see frame 3."), ErrorKind::NoAction);
  EXPECT_EQ(kind_of("{'Action': {'tool_name': 'Hammer', 'frame_range': '3'}}"), ErrorKind::UnknownTool);
  EXPECT_EQ(kind_of("{'Action': {'tool_name': 'Object Tracking Tool', 'frame_range': '3'}}"),
            ErrorKind::MissingParameter);
  EXPECT_EQ(kind_of("{'Action': {'tool_name': 'Image Caption Tool'}}"), ErrorKind::MissingParameter);
  EXPECT_EQ(kind_of("{'Action': {'tool_name': 'Image Caption Tool', 'frame_range': '9-3'}}"),
            ErrorKind::InvalidParameter);
  EXPECT_EQ(kind_of("{'Action': {'tool_name': 'Image Zoom in and Caption Tool', 'frame_range': '3', "
                    "'bbox': '[5, 5, 1, 1]'}}"),
            ErrorKind::InvalidParameter);
  EXPECT_EQ(kind_of("{'Action': {'tool_name': 'Image Caption Tool', 'frame_range': '1'"), ErrorKind::NoAction);
}

TEST(ParseAction, FormatRoundTripProperty) {
  testing_support::Gen g(11);
  for (int i = 0; i < 500; ++i) {
    ToolCommand c;
    c.kind = g.pick(std::vector<ToolKind>(kAllTools.begin(), kAllTools.end()));
    const auto a = g.range(0, 500);
    c.frame_range = {a, is_zoom(c.kind) ? a : a + g.range(0, 40)};
    if (is_zoom(c.kind)) {
      const double x = g.range(0, 300), y = g.range(0, 300);
      c.bbox = BBox{x, y, x + g.range(1, 200), y + g.range(1, 200)};
    }
    if (c.kind == ToolKind::Track) c.object_name = g.pick(std::vector<std::string>{"phone", "red cup", "it's"});
    auto text = "Plan...\n{'Action': " + format_command(c) + "}";
    ASSERT_EQ(parse_action(text), c) << text;
  }
}

namespace {

const char* kDetect = "{'Action': {'tool_name': 'Object Detection Tool', 'frame_range': '19-20'}}";

}  // namespace

TEST(Planner, CreateAndAdjust) {
  auto backend = std::make_shared<ScriptedBackend>(std::vector<std::string>{
      std::string("plan prose ") + kDetect, "no action here", kDetect});
  LlmGateway llm(backend, {});
  Conversation conv;
  auto p = create_plan(conv, llm, 1);
  EXPECT_EQ(p.plan.revision, 0);
  EXPECT_EQ(p.plan.created_at_t, 1);
  EXPECT_EQ(p.plan.next_action.kind, ToolKind::Detect);
  EXPECT_NE(p.plan.rationale_text.find("plan prose"), std::string::npos);
  EXPECT_FALSE(p.reprompted);

  auto adj = adjust_plan(conv, llm, p.plan, 2);
  EXPECT_TRUE(adj.reprompted);
  EXPECT_EQ(adj.plan.revision, 1);
  EXPECT_EQ(adj.plan.created_at_t, 2);
  ASSERT_EQ(adj.warnings.size(), 2u);
  EXPECT_NE(adj.warnings[1].find("repeats the previous action"), std::string::npos);
  EXPECT_EQ(conv.turns().size(), 6u);
}

TEST(Planner, GivesUpAfterOneReprompt) {
  auto backend = std::make_shared<ScriptedBackend>(std::vector<std::string>{"nothing", "still nothing"});
  LlmGateway llm(backend, {});
  Conversation conv;
  try {
    create_plan(conv, llm, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Planner);
  }
  EXPECT_EQ(backend->calls(), 2u);
}

TEST(Planner, DirectActionPromptHasNoPlanning) {
  auto backend = std::make_shared<ScriptedBackend>(std::vector<std::string>{kDetect});
  LlmGateway llm(backend, {});
  Conversation conv;
  auto d = direct_action(conv, llm, 1);
  EXPECT_EQ(d.plan.next_action.kind, ToolKind::Detect);
  EXPECT_EQ(conv.turns()[0].text.find("step by step"), std::string::npos);
}
