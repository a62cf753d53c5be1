#include <gtest/gtest.h>

#include "fusion_oracle.hpp"
#include "longvid/error.hpp"
#include "longvid/sim_tools.hpp"

using namespace longvid;

TEST(BBoxFromMask, Examples) {
  auto m = Mask::empty(10, 10);
  m.set(3, 4);
  EXPECT_EQ(bbox_from_mask(m), (BBox{3, 4, 3, 4}));
  auto full = Mask::empty(10, 10);
  for (int y = 0; y < 10; ++y) {
    for (int x = 0; x < 10; ++x) full.set(x, y);
  }
  EXPECT_EQ(bbox_from_mask(full), (BBox{0, 0, 9, 9}));
  auto two = Mask::empty(10, 10);
  two.set(1, 1);
  two.set(7, 3);
  EXPECT_EQ(bbox_from_mask(two), (BBox{1, 1, 7, 3}));
  EXPECT_THROW(bbox_from_mask(Mask::empty(4, 4)), Error);
}

TEST(DetectMultiround, PhoneSeededAtPeakAndTrackedToTarget) {
  TableDetector det;
  det.add({5, "phone", {10, 10, 20, 20}, 0.2});
  det.add({6, "phone", {11, 10, 21, 20}, 0.6});
  det.add({7, "phone", {12, 10, 22, 20}, 0.9});
  det.add({8, "phone", {13, 10, 23, 20}, 0.7});
  TableTracker trk;
  trk.add({7, {12, 10, 22, 20}, 10, false, {15, 11, 25, 21}, 0.88});
  auto out = detect_multiround(10, {5, 0.5}, det, trk, 40);
  ASSERT_EQ(out.detections.size(), 1u);
  EXPECT_EQ(out.detections[0].name, "phone");
  EXPECT_EQ(out.detections[0].bbox, (BBox{15, 11, 25, 21}));
  EXPECT_EQ(out.detections[0].confidence, 0.88);
  EXPECT_TRUE(out.notes.empty());
}

TEST(DetectMultiround, AbsentClassAndFixedPoint) {
  TableDetector det;
  det.add({12, "cup", {1, 1, 9, 9}, 0.4});
  det.add({10, "laptop", {50, 50, 90, 80}, 0.95});
  det.add({11, "laptop", {51, 50, 91, 80}, 0.80});
  TableTracker trk;
  auto out = detect_multiround(10, {5, 0.5}, det, trk, 40);
  ASSERT_EQ(out.detections.size(), 1u);  // cup never clears the threshold
  EXPECT_EQ(out.detections[0].name, "laptop");
  EXPECT_EQ(out.detections[0].bbox, (BBox{50, 50, 90, 80}));
}

TEST(DetectMultiround, LostTrackLeavesNote) {
  TableDetector det;
  det.add({3, "cup", {1, 1, 9, 9}, 0.9});
  TableTracker trk;
  trk.add({3, {1, 1, 9, 9}, 5, true, {}, 0});
  auto out = detect_multiround(5, {5, 0.5}, det, trk, 10);
  EXPECT_TRUE(out.detections.empty());
  ASSERT_EQ(out.notes.size(), 1u);
  EXPECT_EQ(out.notes[0], "lost track of 'cup' at frame 5 (seeded at frame 3)");
}

TEST(DetectMultiround, WindowIsClippedAndTiesGoEarly) {
  TableDetector det;
  det.add({0, "cup", {1, 1, 9, 9}, 0.9});
  det.add({2, "cup", {2, 2, 9, 9}, 0.9});
  TableTracker trk;
  trk.add({0, {1, 1, 9, 9}, 1, false, {3, 3, 8, 8}, 0.7});
  trk.add({2, {2, 2, 9, 9}, 1, false, {4, 4, 8, 8}, 0.6});
  auto out = detect_multiround(1, {5, 0.5}, det, trk, 3);
  ASSERT_EQ(out.detections.size(), 1u);
  EXPECT_EQ(out.detections[0].bbox, (BBox{3, 3, 8, 8}));
  EXPECT_THROW(detect_multiround(3, {5, 0.5}, det, trk, 3), Error);
  EXPECT_THROW(detect_multiround(1, {-1, 0.5}, det, trk, 3), Error);
}

TEST(TrackByName, ElevenPointsOverRange) {
  TableDetector det;
  det.add({11, "phone", {1, 1, 9, 9}, 0.3});
  det.add({12, "phone", {5, 5, 15, 15}, 0.8});
  TableTracker trk;
  for (FrameIndex f = 10; f <= 20; ++f) {
    if (f != 12) trk.add({12, {5, 5, 15, 15}, f, false, {double(f), 5, double(f) + 10, 15}, 0.9});
  }
  auto traj = track_by_name("phone", {10, 20}, det, trk, {});
  ASSERT_EQ(traj.points.size(), 11u);
  EXPECT_EQ(traj.points.front().frame_id, 10);
  EXPECT_EQ(traj.points.back().frame_id, 20);
  EXPECT_EQ(traj.points[2].bbox, (BBox{5, 5, 15, 15}));
  EXPECT_TRUE(traj.notes.empty());
}

TEST(TrackByName, NotFoundAndSingleFrame) {
  TableDetector det;
  det.add({4, "Red ball", {2, 2, 6, 6}, 0.7});
  det.add({6, "cup", {2, 2, 6, 6}, 0.5});
  TableTracker trk;
  auto none = track_by_name("cup", {0, 9}, det, trk, {});
  EXPECT_TRUE(none.points.empty());
  ASSERT_EQ(none.notes.size(), 1u);
  EXPECT_EQ(none.notes[0], "'cup' was not detected above confidence 0.50 in frames 0-9");

  auto single = track_by_name("red_ball", {4, 4}, det, trk, {});
  ASSERT_EQ(single.points.size(), 1u);
  EXPECT_EQ(single.points[0].bbox, (BBox{2, 2, 6, 6}));
}

TEST(FusionOracle, RandomTablesMatch) {
  testing_support::Gen g(2024);
  for (int i = 0; i < 300; ++i) {
    auto c = oracle::random_case(g);
    for (FrameIndex m = 0; m < c.total; ++m) {
      ASSERT_TRUE(oracle::same(detect_multiround(m, c.params, c.detector, *c.tracker, c.total),
                               oracle::detect(m, c.params, c.detector, *c.tracker, c.total)))
          << "case " << i << " frame " << m;
    }
    const FrameIndex a = g.range(0, static_cast<int>(c.total) - 1);
    const FrameRange r{a, g.range(static_cast<int>(a), static_cast<int>(c.total) - 1)};
    for (const std::string name : {"phone", "red ball", "RED_BALL", "cup", "dog"}) {
      ASSERT_TRUE(oracle::same(track_by_name(name, r, c.detector, *c.tracker, c.params),
                               oracle::track(name, r, c.detector, *c.tracker, c.params)))
          << "case " << i << " name " << name;
    }
  }
}
