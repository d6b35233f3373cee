#include <gtest/gtest.h>

#include <random>

#include "evseq/timestats.hpp"
#include "oracles.hpp"

namespace evseq {
namespace {

Timestamp ts(const char* s) { return parse_timestamp(s).value(); }

std::vector<double> one_to_ten_and_hundred() {
  std::vector<double> v;
  for (int i = 1; i <= 10; ++i) v.push_back(i);
  v.push_back(100);
  return v;
}

TEST(QuartileTest, Examples) {
  EXPECT_EQ(quartiles({0, 0, 0, 0}), (Quartiles{0, 0, 0, 0, 0}));
  EXPECT_EQ(quartiles({1, 2, 3, 4, 5}), (Quartiles{1, 2, 3, 4, 5}));
  auto q = quartiles(one_to_ten_and_hundred());
  EXPECT_EQ(q, (Quartiles{1, 3.5, 6, 8.5, 100}));
  EXPECT_EQ(q, oracle::quartiles(one_to_ten_and_hundred()));
  EXPECT_THROW(quartiles({}), StatsError);
}

TEST(QuartileTest, MatchesOracleOnRandomData) {
  std::mt19937_64 rng(29);
  std::lognormal_distribution<double> heavy(5.0, 1.5);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> v(1 + rng() % 200);
    for (auto& x : v) x = trial % 3 == 0 ? static_cast<double>(rng() % 5) : heavy(rng);
    auto q = quartiles(v);
    EXPECT_EQ(q, oracle::quartiles(v));
    for (int i = 1; i < 5; ++i) EXPECT_LE(q[i - 1], q[i]);
  }
}

TEST(FenceTest, Examples) {
  auto v = one_to_ten_and_hundred();
  auto q = quartiles(v);
  Fence f = tukey_fence(q, 1.5);
  EXPECT_EQ(f.lower, -4.0);
  EXPECT_EQ(f.upper, 16.0);
  auto p = classify_outliers(v, q, 1.5);
  EXPECT_EQ(p.outliers, std::vector<std::size_t>{10});
  EXPECT_EQ(p.quartile_points.size(), 10u);

  std::vector<double> same(7, 42.0);
  EXPECT_TRUE(classify_outliers(same, quartiles(same), 1.5).outliers.empty());
  EXPECT_TRUE(classify_outliers(v, q, 1000).outliers.empty());
  EXPECT_EQ(StatsConfig{}.k, 1.5);
}

TEST(FenceTest, PartitionProperty) {
  std::mt19937_64 rng(31);
  std::lognormal_distribution<double> heavy(3.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(1 + rng() % 300);
    for (auto& x : v) x = heavy(rng);
    double k = 0.5 + static_cast<double>(rng() % 30) / 10.0;
    auto p = classify_outliers(v, quartiles(v), k);
    EXPECT_EQ(p.outliers.size() + p.quartile_points.size(), v.size());
    auto expected = oracle::outliers(v, k);
    EXPECT_EQ(std::set<std::size_t>(p.outliers.begin(), p.outliers.end()), expected);
  }
}

TEST(ScaleTest, Projection) {
  auto hour = TimeScaleSpec::full(TimeScaleKind::HourOfDay);
  EXPECT_EQ(project_occurrence(ts("2019-03-04T00:00:00Z"), hour), 0.0);
  EXPECT_EQ(project_occurrence(ts("2019-03-04T12:00:00Z"), hour), 0.5);
  auto week = TimeScaleSpec::full(TimeScaleKind::DayOfWeek);
  EXPECT_EQ(project_occurrence(ts("2019-03-04T00:00:00Z"), week), 0.0);
  EXPECT_NEAR(project_occurrence(ts("2019-03-10T23:59:59Z"), week), 1.0 - 1.0 / 604800.0, 1e-12);
  auto month = TimeScaleSpec::full(TimeScaleKind::MonthOfYear);
  EXPECT_EQ(project_occurrence(ts("2019-01-01T00:00:00Z"), month), 0.0);
  EXPECT_NEAR(project_occurrence(ts("2019-07-01T00:00:00Z"), month), 0.5, 1e-12);
  auto dom = TimeScaleSpec::full(TimeScaleKind::DayOfMonth);
  EXPECT_EQ(project_occurrence(ts("2019-03-01T00:00:00Z"), dom), 0.0);
}

TEST(ScaleTest, WindowsClampOrThrow) {
  TimeScaleSpec office{TimeScaleKind::HourOfDay, 8.0, 18.0};
  EXPECT_EQ(project_occurrence(ts("2019-03-04T07:00:00Z"), office), 0.0);
  EXPECT_EQ(project_occurrence(ts("2019-03-04T13:00:00Z"), office), 0.5);
  EXPECT_EQ(project_occurrence(ts("2019-03-04T20:00:00Z"), office), 1.0);

  auto abs = TimeScaleSpec::absolute(ts("2019-03-04T00:00:00Z"), ts("2019-03-05T00:00:00Z"));
  EXPECT_EQ(project_occurrence(ts("2019-03-04T06:00:00Z"), abs), 0.25);
  try {
    project_occurrence(ts("2019-03-06T00:00:00Z"), abs);
    FAIL();
  } catch (const StatsError& e) {
    EXPECT_EQ(e.kind(), StatsErrorKind::OutOfRange);
  }
  EXPECT_THROW((TimeScaleSpec{TimeScaleKind::HourOfDay, 5, 5}.validate()), StatsError);
}

TEST(ScaleTest, ProjectionBoundsProperty) {
  std::mt19937_64 rng(37);
  const TimeScaleKind kinds[] = {TimeScaleKind::HourOfDay, TimeScaleKind::DayOfWeek, TimeScaleKind::DayOfMonth,
                                 TimeScaleKind::MonthOfYear};
  for (int i = 0; i < 5000; ++i) {
    Timestamp t{std::chrono::milliseconds{static_cast<long long>(rng() % 4'000'000'000'000ull)}};
    for (auto k : kinds) {
      double p = project_occurrence(t, TimeScaleSpec::full(k));
      EXPECT_GE(p, 0.0);
      EXPECT_LE(p, 1.0);
    }
  }
}

TEST(ColorKeyTest, Examples) {
  auto week = TimeScaleSpec::full(TimeScaleKind::DayOfWeek);
  EXPECT_EQ(color_key_of(ts("2019-03-04T10:00:00Z"), week), 0);
  EXPECT_EQ(color_key_of(ts("2019-03-08T10:00:00Z"), week), 4);
  EXPECT_EQ(color_key_of(ts("2019-05-17T10:00:00Z"), TimeScaleSpec::full(TimeScaleKind::MonthOfYear)), 4);
  EXPECT_EQ(color_key_of(ts("2019-05-17T23:10:00Z"), TimeScaleSpec::full(TimeScaleKind::HourOfDay)), 23);
  EXPECT_EQ(color_key_of(ts("2019-05-31T10:00:00Z"), TimeScaleSpec::full(TimeScaleKind::DayOfMonth)), 30);
  EXPECT_EQ(color_label(TimeScaleKind::DayOfWeek, 3), "Thu");
}

TEST(EventBoxTest, Examples) {
  auto hour = TimeScaleSpec::full(TimeScaleKind::HourOfDay);
  auto week = TimeScaleSpec::full(TimeScaleKind::DayOfWeek);
  Timestamp t = ts("2019-03-04T12:00:00Z");

  auto single = build_event_box("A", {{42.0, t, "p1"}}, hour, week, {});
  EXPECT_EQ(single.q, (Quartiles{42, 42, 42, 42, 42}));
  EXPECT_EQ(single.outlier_count(), 0u);
  ASSERT_EQ(single.points.size(), 1u);
  EXPECT_EQ(single.points[0].axis_pos, 0.5);
  EXPECT_EQ(single.points[0].color_key, 0);

  std::vector<Occurrence> occ;
  for (double d : one_to_ten_and_hundred()) occ.push_back({d, t, "m" + std::to_string(static_cast<int>(d))});
  auto box = build_event_box("A", occ, hour, std::nullopt, {});
  EXPECT_EQ(box.q, (Quartiles{1, 3.5, 6, 8.5, 100}));
  EXPECT_EQ(box.fence.lower, -4.0);
  EXPECT_EQ(box.fence.upper, 16.0);
  EXPECT_EQ(box.outlier_count(), 1u);
  for (const auto& p : box.points) EXPECT_EQ(p.is_outlier, p.member_ref == "m100");
  EXPECT_FALSE(box.points[0].color_key);

  auto points = build_event_box("P", {{0, t, "a"}, {0, t, "b"}}, hour, week, {});
  EXPECT_EQ(points.q, (Quartiles{0, 0, 0, 0, 0}));
  EXPECT_THROW(build_event_box("A", {}, hour, week, {}), StatsError);
}

TEST(DetailLevelTest, PresetsAreDistinct) {
  const DetailPreset all[] = {DetailPreset::Point,           DetailPreset::IntervalNoOutliers,
                              DetailPreset::IntervalWithOutliers, DetailPreset::DetailedQuartiles,
                              DetailPreset::PlainQuartiles,  DetailPreset::Uncolored};
  std::set<std::tuple<bool, bool, bool, ColorMode>> flags;
  for (auto p : all) {
    DetailLevel l{p};
    flags.insert({l.collapsed(), l.show_outlier_points(), l.show_quartile_points(), l.color_mode()});
    EXPECT_EQ(parse_detail_preset(to_string(p)), p);
  }
  EXPECT_EQ(flags.size(), 6u);
  EXPECT_TRUE(DetailLevel{DetailPreset::Point}.collapsed());
  EXPECT_FALSE(DetailLevel{DetailPreset::IntervalNoOutliers}.show_outlier_points());
  EXPECT_EQ(DetailLevel{DetailPreset::Uncolored}.color_mode(), ColorMode::UniformAlpha);
  EXPECT_EQ(DetailLevel{}.preset, DetailPreset::IntervalWithOutliers);
}

EventSequence seq_on(const std::string& id, const char* when) {
  EventSequence s;
  s.identifier = id;
  s.events.push_back({id, "A", ts(when), std::nullopt});
  s.start_date = date_of(ts(when));
  return s;
}

TEST(FilterTest, Examples) {
  std::vector<EventSequence> seqs = {seq_on("mon", "2019-03-04T09:00:00Z"), seq_on("thu", "2019-03-07T09:00:00Z"),
                                     seq_on("thu2", "2019-03-14T09:00:00Z")};
  EXPECT_EQ(apply_filter(seqs, {}).size(), 3u);

  FilterSpec thu;
  thu.days_of_week = std::set<int>{3};
  auto out = apply_filter(seqs, thu);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].identifier, "thu");

  FilterSpec later;
  later.date_from = parse_date("2020-01-01");
  EXPECT_TRUE(apply_filter(seqs, later).empty());

  FilterSpec range;
  range.date_from = parse_date("2019-03-05");
  range.date_to = parse_date("2019-03-07");
  EXPECT_EQ(apply_filter(seqs, range).size(), 1u);

  FilterSpec inverted;
  inverted.date_from = parse_date("2019-03-08");
  inverted.date_to = parse_date("2019-03-07");
  EXPECT_THROW(inverted.validate(), StatsError);
}

TEST(BreakdownTest, Examples) {
  std::vector<EventSequence> seqs = {seq_on("a", "2019-03-08T09:00:00Z"), seq_on("b", "2019-03-04T09:00:00Z"),
                                     seq_on("c", "2019-03-11T09:00:00Z"), seq_on("d", "2019-03-15T09:00:00Z"),
                                     seq_on("e", "2019-03-18T09:00:00Z")};
  UniqueSequence row{{"A"}, {}};
  for (const auto& s : seqs) row.members.push_back(&s);
  auto subs = breakdown_row(row);
  ASSERT_EQ(subs.size(), 2u);
  EXPECT_EQ(subs[0].weekday, 0);
  EXPECT_EQ(subs[0].row.frequency(), 3u);
  EXPECT_EQ(subs[1].weekday, 4);
  EXPECT_EQ(subs[1].row.frequency(), 2u);

  UniqueSequence tue{{"A"}, {}};
  EventSequence t1 = seq_on("t1", "2019-03-05T09:00:00Z"), t2 = seq_on("t2", "2019-03-12T09:00:00Z");
  tue.members = {&t1, &t2};
  auto one = breakdown_row(tue);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].row.members, tue.members);

  UniqueSequence single{{"A"}, {&t1}};
  EXPECT_EQ(breakdown_row(single).size(), 1u);
}

}  // namespace
}  // namespace evseq
