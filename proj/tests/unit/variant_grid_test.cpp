#include <set>

#include "pose_eval/grid.hpp"
#include "pose_eval/variant.hpp"
#include "test_support.hpp"

namespace pose_eval {
namespace {

using testing::error_code_of;

TEST(Variant, CanonicalNamesRoundTrip) {
  for (const char* name :
       {"DTW", "NDTW", "APE+PadZero", "MSE+PadFirst", "DTW+Trim+Norm+MaskFill10.0+Hands-Only",
        "APE+Trim+Norm+MaskFill0.5+PadFirst+DropWorld+Hide0.3+Fps25.0+YT-ASL",
        "APE+PadZero+PairZeroFill+MaskDefault2.0+L1", "DTW+Fps12.5+Upper-Body"}) {
    EXPECT_EQ(canonical_name(named_config(name)), name);
  }
}

TEST(Variant, ParserAcceptsAnyModifierOrderAndNormDot) {
  EXPECT_EQ(named_config("DTW+MaskFill1.0+Norm.+Hands-Only"), named_config("nDTWp"));
  EXPECT_EQ(named_config("DTW+HANDS_ONLY+Trim+MaskFill10"), named_config("DTWp"));
  EXPECT_EQ(canonical_name(named_config("DTW+HANDS_ONLY+Trim+MaskFill10")),
            "DTW+Trim+MaskFill10.0+Hands-Only");
}

TEST(Variant, AliasesExpand) {
  const auto nape = named_config("nAPE");
  EXPECT_EQ(nape.base, MetricBase::APE);
  EXPECT_EQ(nape.padding, Padding::Zero);
  EXPECT_TRUE(nape.pairwise_zero_fill);
  EXPECT_TRUE(nape.preprocess.drop_world);
  EXPECT_TRUE(nape.preprocess.normalize);
  EXPECT_EQ(nape.preprocess.hide_below_confidence, 0.5);
  EXPECT_EQ(nape.preprocess.selection, "REDUCED");
  EXPECT_EQ(named_config("nDTW").base, MetricBase::NDTW);
  for (const auto& a : metric_aliases()) {
    EXPECT_EQ(canonical_name(named_config(a.alias)), a.expansion);
  }
}

TEST(Variant, Errors) {
  EXPECT_EQ(error_code_of([] { named_config("APE+PadBanana"); }), ErrorCode::ParseError);
  EXPECT_EQ(error_code_of([] { named_config("FOO"); }), ErrorCode::ParseError);
  EXPECT_EQ(error_code_of([] { named_config("DTW++Trim"); }), ErrorCode::ParseError);
  EXPECT_EQ(error_code_of([] { named_config("APE"); }), ErrorCode::InvalidConfig);
  EXPECT_EQ(error_code_of([] { named_config("DTW+PadZero"); }), ErrorCode::InvalidConfig);
  try {
    named_config("APE+PadBanana");
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("position"), std::string::npos) << e.what();
  }
}

GridSpec single() {
  GridSpec g;
  g.bases = {MetricBase::DTW};
  g.fills = {std::nullopt};
  g.trims = {false};
  g.norms = {false};
  g.paddings = {Padding::Zero};
  g.selections = {std::nullopt};
  g.pointwise = {kernels::PointDistance::L2};
  return g;
}

TEST(Grid, SingleValuedAxesGiveOneConfig) {
  const auto out = expand(single());
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].name, "DTW");
}

TEST(Grid, DtwCollapsesAcrossPaddings) {
  auto g = single();
  g.bases = {MetricBase::APE, MetricBase::DTW};
  g.paddings = {Padding::Zero, Padding::FirstFrame};
  EXPECT_EQ(cross_product_size(g), 4u);
  const auto out = expand(g);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0].name, "APE+PadZero");
  EXPECT_EQ(out[1].name, "APE+PadFirst");
  EXPECT_EQ(out[2].name, "DTW");
}

TEST(Grid, RetrievalStudyGridHas48Variants) {
  const auto g = retrieval_study_grid();
  EXPECT_EQ(cross_product_size(g), 64u);
  const auto out = expand(g);
  ASSERT_EQ(out.size(), 48u);
  std::set<std::string> names;
  std::size_t ape = 0;
  for (const auto& n : out) {
    names.insert(n.name);
    if (n.config.base == MetricBase::APE) ++ape;
    EXPECT_EQ(canonical_name(n.config), n.name);
  }
  EXPECT_EQ(names.size(), 48u);
  EXPECT_EQ(ape, 32u);
  EXPECT_TRUE(names.count("DTW+Trim+MaskFill10.0+Hands-Only"));
}

TEST(Grid, InvalidCombinationsAreSkipped) {
  auto g = single();
  g.bases = {MetricBase::MSE};
  g.pointwise = {kernels::PointDistance::L2, kernels::PointDistance::L1};
  const auto out = expand(g);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].name, "MSE+PadZero");
}

TEST(Grid, EmptyAxis) {
  auto g = single();
  g.norms.clear();
  EXPECT_EQ(error_code_of([&] { expand(g); }), ErrorCode::EmptyAxis);
}

}  // namespace
}  // namespace pose_eval
