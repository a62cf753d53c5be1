#include <gtest/gtest.h>

#include "longvid/error.hpp"
#include "longvid/planner.hpp"
#include "longvid/tool_protocol.hpp"
#include "support.hpp"

using namespace longvid;
using testing_support::fixture;
using testing_support::slurp;

namespace {
const std::vector<std::string> kTools = {"caption", "detect", "zoom_caption", "zoom_detect", "track"};
}

TEST(Golden, CommandsParseAndReserialize) {
  for (const auto& name : kTools) {
    SCOPED_TRACE(name);
    auto cmd = parse_action(slurp(fixture("commands/" + name + ".txt")));
    EXPECT_EQ(format_command(cmd), slurp(fixture("commands/" + name + ".expected")));
    EXPECT_EQ(parse_action("{'Action': " + format_command(cmd) + "}"), cmd);
  }
}

TEST(Golden, RequestsEncodeToPinnedBytes) {
  for (const auto& name : kTools) {
    SCOPED_TRACE(name);
    auto cmd = parse_action(slurp(fixture("commands/" + name + ".txt")));
    const auto pinned = slurp(fixture("commands/" + name + ".request.json"));
    EXPECT_EQ(encode_request(cmd), pinned);
    EXPECT_EQ(decode_request(pinned), cmd);
  }
}

TEST(Golden, ResponsesRoundTrip) {
  for (const auto& name : kTools) {
    SCOPED_TRACE(name);
    auto cmd = parse_action(slurp(fixture("commands/" + name + ".txt")));
    const auto pinned = slurp(fixture("commands/" + name + ".response.json"));
    EXPECT_EQ(encode_response(decode_response(pinned, cmd)), pinned);
  }
  ToolCommand det{ToolKind::Detect, {1, 1}, std::nullopt, ""};
  const auto err = slurp(fixture("commands/error.response.json"));
  auto ret = decode_response(err, det);
  ASSERT_TRUE(ret.error);
  EXPECT_EQ(encode_response(ret), err);
}

TEST(Wire, DecoderAcceptsNumbersAndArrays) {
  auto cmd = decode_request(R"({"tool_name":"Image Zoom in and Caption Tool","frame_range":19,"bbox":[1,2,30,40]})");
  EXPECT_EQ(cmd.frame_range, (FrameRange{19, 19}));
  EXPECT_EQ(cmd.bbox, (BBox{1, 2, 30, 40}));

  ToolCommand det{ToolKind::Detect, {3, 3}, std::nullopt, ""};
  auto ret = decode_response(
      R"({"results":[{"frame_id":3,"det_info":{"id":"0","name":"cup","bbox":[4,4,4,4],"confidence":0.5}}]})", det);
  ASSERT_EQ(ret.detections.size(), 1u);
  EXPECT_EQ(ret.detections[0].detections[0].bbox, (BBox{4, 4, 4, 4}));
}

TEST(Wire, RejectsMalformed) {
  EXPECT_THROW(decode_request("not json"), Error);
  EXPECT_THROW(decode_request(R"({"tool_name":"Foo Tool","frame_range":"1"})"), Error);
  EXPECT_THROW(decode_request(R"({"tool_name":"Object Tracking Tool","frame_range":"1-3"})"), Error);
  EXPECT_THROW(decode_response(R"({"notes":[]})", ToolCommand{}), Error);
}

TEST(Wire, RandomCommandRoundTrip) {
  testing_support::Gen g(3);
  for (int i = 0; i < 1000; ++i) {
    ToolCommand c;
    c.kind = kAllTools[static_cast<std::size_t>(g.range(0, 4))];
    const FrameIndex a = g.range(0, 500);
    c.frame_range = is_zoom(c.kind) ? FrameRange{a, a} : FrameRange{a, a + g.range(0, 40)};
    if (is_zoom(c.kind)) {
      const double x = g.range(0, 300), y = g.range(0, 300);
      c.bbox = BBox{x, y, x + g.range(1, 200), y + g.range(1, 150)};
    }
    if (c.kind == ToolKind::Track) c.object_name = g.pick(std::vector<std::string>{"cup", "red ball", "person"});
    ASSERT_EQ(decode_request(encode_request(c)), c);
    ASSERT_EQ(parse_action("{'Action': " + format_command(c) + "}"), c);
  }
}
