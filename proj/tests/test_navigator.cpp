#include "rownav/navigator.hpp"
#include "rownav/rng.hpp"

#include <gtest/gtest.h>

#include <string>
#include <vector>

using namespace rownav;

namespace {

struct Flags {
  bool front = false;
  bool back = false;
  bool of(Mount m) const { return m == Mount::front ? front : back; }
};

// Crops spread over the whole image width so that every window position sees some.
CropSource scripted(const Flags& f) {
  return [f](Mount cam, const SlidingWindow&) {
    std::vector<CropDetection> d;
    if (!f.of(cam)) return d;
    for (double u = 10; u < 320; u += 25) d.push_back({{u, 200.0}, 20});
    for (double u = 10; u < 320; u += 25) d.push_back({{u + 2.0, 100.0}, 20});
    return d;
  };
}

// Reference automaton of the row navigation scheme, written independently of nav_step.
struct Reference {
  Mount cam = Mount::front;
  NavPhase phase = NavPhase::following;
  Side side = Side::right;
  int rows = 0;
  int empty = 0;
  int entering = 0;
  std::vector<std::string> log;

  void step(const Flags& f, int debounce, int timeout) {
    bool seen = f.of(cam);
    if (!seen) {
      ++empty;
      if (phase == NavPhase::entering) {
        ++entering;
        if (entering >= timeout && !f.of(other(cam))) {
          phase = NavPhase::done;
          ++rows;
          log.push_back("navigation_done");
        }
        return;
      }
      if (empty < debounce) return;
      log.push_back("row_end_reached");
      empty = 0;
      if (!f.of(other(cam))) {
        phase = NavPhase::entering;
        entering = 0;
        log.push_back("window_shifted");
      } else {
        cam = other(cam);
        phase = NavPhase::exiting;
        log.push_back("camera_switched");
        seen = f.of(cam);
      }
    }
    if (!seen) return;
    if (phase == NavPhase::entering) {
      phase = NavPhase::following;
      ++rows;
      side = opposite(side);
      log.push_back("row_entered");
    }
    empty = 0;
  }
};

// Detection script shaped like a field traversal, with random dropouts and run lengths.
std::vector<Flags> make_script(Rng& rng, int rows) {
  std::vector<Flags> s;
  const auto push = [&](int n, bool front, bool back, double dropout) {
    for (int i = 0; i < n; ++i)
      s.push_back({front && rng.uniform01() >= dropout, back && rng.uniform01() >= dropout});
  };
  const auto len = [&](int lo, int hi) { return lo + static_cast<int>(rng.uniform(0, hi - lo + 1)); };
  bool front_leads = true;
  for (int r = 0; r < rows; ++r) {
    push(len(5, 40), true, true, 0.15);           // in the row: both cameras see it
    push(len(3, 12), !front_leads, front_leads, 0.1);  // leading camera past the row end
    push(len(4, 12), false, false, 0.0);          // headland
    if (r + 1 < rows) push(len(1, 15), false, false, 0.0);
    front_leads = !front_leads;
  }
  push(40, false, false, 0.0);
  return s;
}

}  // namespace

TEST(Navigator, StartState) {
  const CameraRig rig;
  const NavState a = start_navigation(rig, rig.intrinsics, Side::right);
  EXPECT_EQ(a.primary_cam, Mount::front);
  EXPECT_EQ(a.phase, NavPhase::following);
  EXPECT_DOUBLE_EQ(a.window.center_x, 160.0);
  EXPECT_EQ(a.next_row_side, Side::right);
  EXPECT_EQ(a, start_navigation(rig, rig.intrinsics, Side::right));
}

TEST(Navigator, TurnBookkeepingAlternatesSides) {
  const CameraRig rig;
  NavState s = start_navigation(rig, rig.intrinsics, Side::right);
  s = turn_bookkeeping(s);
  EXPECT_EQ(s.next_row_side, Side::left);
  EXPECT_EQ(s.rows_completed, 1);
  s = turn_bookkeeping(s);
  EXPECT_EQ(s.next_row_side, Side::right);
  EXPECT_EQ(s.rows_completed, 2);
}

TEST(Navigator, FollowingRecentersWindowAndSteers) {
  const CameraRig front;
  const CameraRig back = mirrored_rig(front);
  const NavigatorParams p;
  NavState s = start_navigation(front, front.intrinsics, Side::right);
  const CropSource src = [](Mount, const SlidingWindow&) {
    return std::vector<CropDetection>{{{180, 220}, 20}, {{176, 150}, 20}, {{172, 80}, 20}};
  };
  const NavStepResult r = nav_step(s, src, front, back, Pose2{}, p, 0.0);
  EXPECT_EQ(r.state.phase, NavPhase::following);
  EXPECT_NEAR(r.state.window.center_x, 176.0, 1e-12);
  ASSERT_TRUE(r.feature.has_value());
  EXPECT_NE(r.control.omega, 0.0);
  EXPECT_TRUE(r.events.empty());
}

TEST(Navigator, PrimaryEmptySecondarySeesSwitchesCameras) {
  const CameraRig front;
  const CameraRig back = mirrored_rig(front);
  NavigatorParams p;
  p.debounce_frames = 1;
  NavState s = start_navigation(front, front.intrinsics, Side::right);
  s.window.center_x = 40.0;
  const NavStepResult r = nav_step(s, scripted({false, true}), front, back, Pose2{}, p, 1.0);
  EXPECT_EQ(r.state.primary_cam, Mount::back);
  EXPECT_EQ(r.state.phase, NavPhase::exiting);
  ASSERT_EQ(r.events.size(), 2u);
  EXPECT_EQ(r.events[1].kind, NavEventKind::camera_switched);
  EXPECT_GT(drive_sign(r.state), 0.0);  // drives away from the back camera's view
}

TEST(Navigator, BothEmptyShiftsWindowTowardNextRow) {
  const CameraRig front;
  const CameraRig back = mirrored_rig(front);
  NavigatorParams p;
  p.debounce_frames = 1;
  NavState s = start_navigation(front, front.intrinsics, Side::right);
  s.primary_cam = Mount::back;
  s.phase = NavPhase::exiting;
  const NavStepResult r = nav_step(s, scripted({false, false}), front, back, Pose2{}, p, 1.0);
  EXPECT_EQ(r.state.phase, NavPhase::entering);
  ASSERT_EQ(r.events.size(), 2u);
  EXPECT_EQ(r.events[1].kind, NavEventKind::window_shifted);
  EXPECT_NE(r.state.window.center_x, s.window.center_x);
  EXPECT_LT(drive_sign(r.state), 0.0);  // back camera primary: drive toward its view
}

TEST(Navigator, MatchesReferenceAutomatonOnScripts) {
  const CameraRig front;
  const CameraRig back = mirrored_rig(front);
  Rng rng(2025);
  for (int trial = 0; trial < 20; ++trial) {
    NavigatorParams p;
    p.debounce_frames = 1 + trial % 4;
    p.entry_timeout_frames = 5 + trial % 7;
    p.initial_side = trial % 2 ? Side::left : Side::right;
    const std::vector<Flags> script = make_script(rng, 1 + trial % 6);

    NavState s = start_navigation(front, front.intrinsics, p.initial_side);
    Reference ref;
    ref.side = p.initial_side;
    std::vector<std::string> log;
    Mount last_switch_to = Mount::front;
    for (std::size_t i = 0; i < script.size() && s.phase != NavPhase::done; ++i) {
      const NavStepResult r = nav_step(s, scripted(script[i]), front, back, Pose2{}, p, 0.1 * i);
      ref.step(script[i], p.debounce_frames, p.entry_timeout_frames);
      for (const auto& e : r.events) {
        log.push_back(to_string(e.kind));
        if (e.kind == NavEventKind::camera_switched) {
          EXPECT_NE(r.state.primary_cam, last_switch_to) << "cameras must alternate";
          last_switch_to = r.state.primary_cam;
        }
      }
      s = r.state;
      ASSERT_EQ(s.phase, ref.phase) << "trial " << trial << " frame " << i;
      ASSERT_EQ(s.primary_cam, ref.cam) << "trial " << trial << " frame " << i;
      ASSERT_EQ(s.rows_completed, ref.rows) << "trial " << trial << " frame " << i;
      ASSERT_EQ(s.next_row_side, ref.side) << "trial " << trial << " frame " << i;
      EXPECT_EQ(std::abs(r.control.v), p.controller.v_star * (s.phase == NavPhase::done ? 0.0 : 1.0));
    }
    EXPECT_EQ(log, ref.log) << "trial " << trial;
    EXPECT_EQ(s.phase, NavPhase::done) << "trial " << trial;
  }
}

TEST(Navigator, NoSwitchWhileWindowKeepsSeeingCrops) {
  const CameraRig front;
  const CameraRig back = mirrored_rig(front);
  NavigatorParams p;
  NavState s = start_navigation(front, front.intrinsics, Side::right);
  Rng rng(6);
  for (int i = 0; i < 300; ++i) {
    // Isolated single-frame dropouts only.
    const bool drop = i % 2 == 1 && rng.uniform01() < 0.5;
    const NavStepResult r = nav_step(s, scripted({!drop, true}), front, back, Pose2{}, p, 0.1 * i);
    EXPECT_EQ(r.state.primary_cam, Mount::front);
    EXPECT_TRUE(r.events.empty());
    s = r.state;
  }
}

TEST(Navigator, DoneStateRejectsFurtherSteps) {
  const CameraRig front;
  NavState s = start_navigation(front, front.intrinsics, Side::right);
  s.phase = NavPhase::done;
  EXPECT_THROW(nav_step(s, scripted({true, true}), front, mirrored_rig(front), Pose2{}, NavigatorParams{}, 0.0),
               std::logic_error);
  EXPECT_EQ(drive_sign(s), 0.0);
}
