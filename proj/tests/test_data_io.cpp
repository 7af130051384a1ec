#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include <Eigen/SVD>

#include "amlnewton/data_io.hpp"
#include "amlnewton/error.hpp"

using namespace amln;

namespace {

Errc error_of(auto&& fn, std::int64_t* location = nullptr) {
  try {
    fn();
  } catch (const Error& e) {
    if (location) *location = e.location();
    return e.code();
  }
  ADD_FAILURE() << "no exception";
  return Errc::InvalidArgument;
}

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / ("amln_io_" + name);
  std::ofstream(path) << content;
  return path;
}

}  // namespace

TEST(Libsvm, SingleLine) {
  const auto ds = parse_libsvm_text("+1 1:0.5 3:2.0\n", Loss::Logistic, 3);
  ASSERT_EQ(ds.samples(), 1);
  ASSERT_EQ(ds.dims(), 3);
  EXPECT_EQ(ds.features(0, 0), 0.5);
  EXPECT_EQ(ds.features(0, 1), 0.0);
  EXPECT_EQ(ds.features(0, 2), 2.0);
  EXPECT_EQ(ds.labels[0], 1.0);
}

TEST(Libsvm, EmptyFileIsParseError) {
  EXPECT_EQ(error_of([] { parse_libsvm_text("", Loss::Logistic); }), Errc::ParseError);
  EXPECT_EQ(error_of([] { parse_libsvm_text("# only a comment\n\n", Loss::Logistic); }), Errc::ParseError);
}

TEST(Libsvm, HandDecodedFixture) {
  const auto path = temp_file("fixture.svm",
                              "# three samples\n"
                              "1 2:1.5 4:-3\n"
                              "\n"
                              "0 1:2e-1 3:7\n"
                              "-1 4:0.25\n");
  const auto ds = parse_libsvm(path, Loss::Logistic);
  Matrix expected(3, 4);
  expected << 0, 1.5, 0, -3,  //
      0.2, 0, 7, 0,           //
      0, 0, 0, 0.25;
  EXPECT_EQ(ds.features, expected);
  EXPECT_EQ(ds.labels, (Vector(3) << 1, -1, -1).finished());
  std::filesystem::remove(path);
}

TEST(Libsvm, FeatureCountOverride) {
  const auto ds = parse_libsvm_text("1 2:1\n", Loss::Logistic, 5);
  EXPECT_EQ(ds.dims(), 5);
  EXPECT_EQ(error_of([] { parse_libsvm_text("1 7:1\n", Loss::Logistic, 5); }), Errc::ParseError);
}

TEST(Libsvm, MalformedInputsCarryLineNumbers) {
  std::int64_t line = 0;
  EXPECT_EQ(error_of([] { parse_libsvm_text("1 1:1\n1 3:1 2:1\n", Loss::Logistic); }, &line), Errc::ParseError);
  EXPECT_EQ(line, 2);
  EXPECT_EQ(error_of([] { parse_libsvm_text("1 1:1\n1 2:1\n1 2-1\n", Loss::Logistic); }, &line), Errc::ParseError);
  EXPECT_EQ(line, 3);
  EXPECT_EQ(error_of([] { parse_libsvm_text("1 1:abc\n", Loss::Logistic); }, &line), Errc::ParseError);
  EXPECT_EQ(line, 1);
  EXPECT_EQ(error_of([] { parse_libsvm_text("1 0:1\n", Loss::Logistic); }, &line), Errc::ParseError);
  EXPECT_EQ(error_of([] { parse_libsvm_text("x 1:1\n", Loss::Logistic); }, &line), Errc::ParseError);
  EXPECT_EQ(error_of([] { parse_libsvm_text("1 1:1 1:2\n", Loss::Logistic); }), Errc::ParseError);
}

TEST(Libsvm, LabelDomains) {
  EXPECT_EQ(error_of([] { parse_libsvm_text("0 1:1\n2 1:1\n", Loss::Logistic); }), Errc::LabelDomainError);
  EXPECT_EQ(error_of([] { parse_libsvm_text("-1 1:1\n", Loss::Poisson); }), Errc::LabelDomainError);
  EXPECT_EQ(error_of([] { parse_libsvm_text("1.5 1:1\n", Loss::Poisson); }), Errc::LabelDomainError);
  const auto ds = parse_libsvm_text("3 1:1\n0 1:2\n", Loss::Poisson);
  EXPECT_EQ(ds.labels, (Vector(2) << 3, 0).finished());
}

TEST(Libsvm, MissingFileIsIoError) {
  EXPECT_EQ(error_of([] { parse_libsvm("/nonexistent/dir/file.svm", Loss::Logistic); }), Errc::IoError);
}

TEST(Libsvm, RoundTrip) {
  for (auto loss : {Loss::Logistic, Loss::Poisson}) {
    auto ds = generate_lowrank(25, 12, 4, 5, loss);
    ds.features(3, 4) = 0.0;
    ds.features(7, 11) = 0.0;
    const auto back = parse_libsvm_text(format_libsvm(ds), loss, ds.dims());
    EXPECT_EQ(back.features, ds.features);
    EXPECT_EQ(back.labels, ds.labels);
  }
}

TEST(Libsvm, WriteAndReadFile) {
  const auto ds = generate_lowrank(10, 8, 2, 3, Loss::Logistic);
  const auto path = std::filesystem::temp_directory_path() / "amln_io_roundtrip.svm";
  write_libsvm(ds, path);
  const auto back = parse_libsvm(path, Loss::Logistic, 8);
  EXPECT_EQ(back.features, ds.features);
  std::filesystem::remove(path);
}

TEST(Csv, HeaderAndLabelColumn) {
  const auto ds = parse_csv_text("y,x1\n1,2.0\n", 0, true, Loss::Logistic);
  ASSERT_EQ(ds.samples(), 1);
  ASSERT_EQ(ds.dims(), 1);
  EXPECT_EQ(ds.features(0, 0), 2.0);
  EXPECT_EQ(ds.labels[0], 1.0);
}

TEST(Csv, RaggedRowReportsLine) {
  std::int64_t line = 0;
  EXPECT_EQ(error_of([] { parse_csv_text("1,2,3\n4,5\n", 0, false, Loss::Poisson); }, &line), Errc::ParseError);
  EXPECT_EQ(line, 2);
  EXPECT_EQ(error_of([] { parse_csv_text("a,b\n1,x\n", 0, true, Loss::Poisson); }, &line), Errc::ParseError);
  EXPECT_EQ(line, 2);
}

TEST(Csv, HandDecodedFixture) {
  const auto path = temp_file("fixture.csv",
                              "f1,count,f2,f3\n"
                              "0.5,3,1,-1\n"
                              "1.5,0,2,-2\n"
                              "-2,1,3,0\n"
                              "4e-1,7,4,1e1\n"
                              "0,2,5,2.5\n");
  const auto ds = parse_csv(path, 1, true, Loss::Poisson);
  Matrix expected(5, 3);
  expected << 0.5, 1, -1,  //
      1.5, 2, -2,          //
      -2, 3, 0,            //
      0.4, 4, 10,          //
      0, 5, 2.5;
  EXPECT_EQ(ds.features, expected);
  EXPECT_EQ(ds.labels, (Vector(5) << 3, 0, 1, 7, 2).finished());
  std::filesystem::remove(path);
}

TEST(Generate, FullRankWhenRankIsMin) {
  const auto ds = generate_lowrank(8, 6, 6, 1, Loss::Logistic);
  const Eigen::JacobiSVD<Matrix> svd(ds.features);
  const auto sv = svd.singularValues();
  EXPECT_GT(sv[5], 1e-8 * sv[0]);
}

TEST(Generate, Deterministic) {
  for (auto loss : {Loss::Logistic, Loss::Poisson}) {
    const auto a = generate_lowrank(30, 20, 5, 9, loss);
    const auto b = generate_lowrank(30, 20, 5, 9, loss);
    const auto c = generate_lowrank(30, 20, 5, 10, loss);
    EXPECT_EQ(a.features, b.features);
    EXPECT_EQ(a.labels, b.labels);
    EXPECT_NE(a.features, c.features);
  }
}

TEST(Generate, NumericalRank) {
  const auto ds = generate_lowrank(50, 40, 10, 2, Loss::Poisson);
  const Eigen::JacobiSVD<Matrix> svd(ds.features);
  const auto sv = svd.singularValues();
  EXPECT_GT(sv[9], 1e-6 * sv[0]);
  for (Index i = 10; i < sv.size(); ++i) EXPECT_LE(sv[i], 1e-10 * sv[0]);
}

TEST(Generate, LabelsInDomain) {
  const auto lg = generate_lowrank(200, 30, 10, 4, Loss::Logistic);
  EXPECT_NO_THROW(validate_dataset(lg, Loss::Logistic));
  EXPECT_GT((lg.labels.array() > 0).count(), 20);
  EXPECT_GT((lg.labels.array() < 0).count(), 20);
  const auto ps = generate_lowrank(200, 30, 10, 4, Loss::Poisson);
  EXPECT_NO_THROW(validate_dataset(ps, Loss::Poisson));
  EXPECT_LE(ps.labels.maxCoeff(), 200.0);
}

TEST(Generate, RejectsBadRank) {
  EXPECT_THROW(generate_lowrank(5, 4, 5, 0, Loss::Logistic), Error);
  EXPECT_THROW(generate_lowrank(5, 4, 0, 0, Loss::Logistic), Error);
}

TEST(Standardize, AlreadyStandardColumnUnchanged) {
  Dataset ds;
  ds.features = Matrix(4, 1);
  ds.features << -1, 1, -1, 1;
  ds.labels = Vector::Ones(4);
  const auto s = standardize(ds);
  EXPECT_LE((s.data.features - ds.features).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Standardize, ConstantColumnOnlyShifted) {
  Dataset ds;
  ds.features = Matrix(3, 2);
  ds.features << 5, 1, 5, 2, 5, 3;
  ds.labels = Vector::Ones(3);
  const auto s = standardize(ds);
  EXPECT_EQ(s.data.features.col(0), Vector::Zero(3));
  EXPECT_EQ(s.scale[0], 1.0);
  EXPECT_EQ(s.mean[0], 5.0);
}

TEST(Standardize, MomentsOfRandomMatrix) {
  const auto ds = generate_lowrank(10, 3, 3, 6, Loss::Logistic);
  const auto s = standardize(ds);
  for (Index j = 0; j < 3; ++j) {
    const auto col = s.data.features.col(j);
    const double mean = col.mean();
    const double sd = std::sqrt((col.array() - mean).square().mean());
    EXPECT_LE(std::abs(mean), 1e-12);
    EXPECT_NEAR(sd, 1.0, 1e-12);
  }
  EXPECT_EQ(s.data.labels, ds.labels);
}
