#include <doctest.h>

#include <random>

#include "lexcnn/error.hpp"
#include "lexcnn/eval.hpp"
#include "lexcnn/stats.hpp"

using namespace lexcnn;

TEST_CASE("confusion matrix") {
  const auto perfect = confusion({0, 1, 2, 2}, {0, 1, 2, 2}, LabelScheme::ThreeClass);
  CHECK(perfect.counts.isDiagonal());
  CHECK(perfect.total() == 4);
  CHECK(confusion({}, {}, LabelScheme::ThreeClass).counts.isZero());
  // gold pos,pos,neg; predicted pos,neg,neg
  const auto cm = confusion({0, 2, 2}, {0, 0, 2}, LabelScheme::ThreeClass);
  CHECK(cm.counts(0, 0) == 1);
  CHECK(cm.counts(0, 2) == 1);
  CHECK(cm.counts(2, 2) == 1);
  CHECK(cm.total() == 3);
  CHECK_THROWS(confusion({0}, {0, 1}, LabelScheme::ThreeClass));
  CHECK_THROWS(confusion({3}, {0}, LabelScheme::ThreeClass));
}

TEST_CASE("avg pos/neg F1") {
  SUBCASE("perfect") {
    CHECK(avg_f1_pos_neg(confusion({0, 1, 2}, {0, 1, 2}, LabelScheme::ThreeClass)) == 1.0);
  }
  SUBCASE("hand example") {
    // pos: TP 2, FP 1, FN 1; neg: TP 1, FP 0, FN 1
    ConfusionMatrix cm;
    cm.counts << 2, 1, 0,
                 0, 0, 0,
                 1, 0, 1;
    CHECK(f1_score(cm, 0) == doctest::Approx(2.0 / 3.0));
    CHECK(f1_score(cm, 2) == doctest::Approx(2.0 / 3.0));
    CHECK(avg_f1_pos_neg(cm) == doctest::Approx(0.6667).epsilon(1e-4));
  }
  SUBCASE("only neutral predicted") {
    CHECK(avg_f1_pos_neg(confusion({1, 1, 1}, {0, 1, 2}, LabelScheme::ThreeClass)) == 0.0);
  }
  SUBCASE("five-class matrices are rejected") {
    CHECK_THROWS_AS(avg_f1_pos_neg(ConfusionMatrix(LabelScheme::FiveClass)), UsageError);
  }
}

TEST_CASE("accuracy") {
  CHECK(accuracy(confusion({0, 1, 2, 3, 4}, {0, 1, 2, 3, 4}, LabelScheme::FiveClass)) == 1.0);
  CHECK(accuracy(confusion({0, 1, 2, 0}, {0, 1, 2, 2}, LabelScheme::ThreeClass)) == 0.75);
  CHECK_THROWS(accuracy(ConfusionMatrix()));
}

TEST_CASE("metrics stay in [0,1]") {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 200; ++trial) {
    ConfusionMatrix cm;
    for (Index i = 0; i < 9; ++i) cm.counts.data()[i] = static_cast<long long>(gen() % 6);
    if (cm.total() == 0) continue;
    const double f = avg_f1_pos_neg(cm);
    const double a = accuracy(cm);
    CHECK((f >= 0.0 && f <= 1.0));
    CHECK((a >= 0.0 && a <= 1.0));
  }
}

TEST_CASE("argmax ties go to the lowest class") {
  CHECK(argmax_class(Eigen::Vector3d(0.4, 0.4, 0.2)) == 0);
  CHECK(argmax_class(Eigen::Vector3d(0.1, 0.2, 0.7)) == 2);
}

TEST_CASE("box statistics") {
  const auto a = box_stats({1, 2, 3, 4, 100});
  CHECK(a.median == 3);
  CHECK(a.q25 == 2);
  CHECK(a.q75 == 4);
  CHECK(a.outliers == std::vector<double>{100});
  CHECK(box_stats({62.1, 63.4, 63.8}).median == 63.4);
  const auto same = box_stats({7, 7, 7, 7});
  CHECK(same.q25 == 7);
  CHECK(same.median == 7);
  CHECK(same.q75 == 7);
  CHECK(same.outliers.empty());
  CHECK(box_stats({4, 1, 3, 2}).median == 2.5);
}

TEST_CASE("spread") {
  CHECK(population_stddev({60, 62}) == 1.0);
  CHECK(population_stddev({5, 5, 5}) == 0.0);
  CHECK(mean({60, 62}) == 61.0);
}
