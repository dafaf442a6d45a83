#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "crq/io.hpp"
#include "oracles.hpp"

using namespace crq;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("crqflow_io_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()));
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST(FormatNumber, RoundTripsExactly) {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0}) {
    EXPECT_EQ(std::stod(format_number(x)), x);
  }
  EXPECT_EQ(format_number(std::nan("")), "nan");
  EXPECT_EQ(format_number(-HUGE_VAL), "-inf");
}

TEST(SpectralCsv, RoundTrip) {
  const ModeSet modes(3);
  SpectralField f = SpectralField::zero(3);
  f.coeffs = Eigen::VectorXd::LinSpaced(f.coeffs.size(), -1.0, 1.0 / 3.0);
  const auto text = format_spectral_csv(f, modes);
  EXPECT_EQ(text.rfind("# crqflow spectral N=3 convention=1\np,q,m,value\n", 0), 0u);
  const auto g = parse_spectral_csv(text, modes);
  EXPECT_EQ(g.coeffs, f.coeffs);
  EXPECT_EQ(format_spectral_csv(g, modes), text);
}

TEST(SpectralCsv, EmbedsLowerTruncation) {
  SpectralField f = SpectralField::zero(2);
  f.coeffs[4] = 0.25;
  const auto g = parse_spectral_csv(format_spectral_csv(f, ModeSet(2)), ModeSet(4));
  EXPECT_EQ(g.truncation, 4);
  EXPECT_EQ(g.coeffs[4], 0.25);
  EXPECT_EQ(g.coeffs.cwiseAbs().sum(), 0.25);
}

TEST(SpectralCsv, RejectsMalformed) {
  const ModeSet modes(2);
  EXPECT_THROW(parse_spectral_csv("", modes), FormatError);
  EXPECT_THROW(parse_spectral_csv("p,q,m,value\n0,0,0,1\n", modes), FormatError);
  EXPECT_THROW(parse_spectral_csv("# crqflow spectral N=3 convention=1\np,q,m,value\n", modes), FormatError);
  EXPECT_THROW(parse_spectral_csv("# crqflow spectral N=2 convention=1\np,q,m,value\n3,0,0,1\n", modes), FormatError);
  EXPECT_THROW(parse_spectral_csv("# crqflow spectral N=2 convention=1\np,q,m,value\n1,1,x,1\n", modes), FormatError);
  EXPECT_THROW(parse_spectral_csv("# crqflow spectral N=2 convention=1\np,q,m,value\n1,1,1,nan\n", modes), FormatError);
}

TEST(TrajectoryCsv, RoundTripAndHeader) {
  std::vector<TrajectoryRecord> recs(3);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    recs[i] = {0.1 * i, 1.0 / (i + 1), 2.0, oracle::kVolume, -1e-17, 3.0, 4.0, 5.0};
  }
  const auto text = format_trajectory_csv(recs);
  EXPECT_EQ(text.substr(0, text.find('\n')), "t,E,grad_norm_sq,volume,r,q_l2,fs42,monotone_qty");
  const auto back = parse_trajectory_csv(text);
  ASSERT_EQ(back.size(), recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    EXPECT_EQ(back[i].t, recs[i].t);
    EXPECT_EQ(back[i].energy, recs[i].energy);
    EXPECT_EQ(back[i].r, recs[i].r);
  }
  EXPECT_THROW(parse_trajectory_csv(std::string(kTrajectoryHeader) + "\n"), FormatError);
  EXPECT_THROW(parse_trajectory_csv(""), FormatError);
  EXPECT_THROW(parse_trajectory_csv(std::string(kTrajectoryHeader) + "\n1,2,3\n"), FormatError);
}

TEST(WriteAtomic, ReplacesContentWithoutLeftovers) {
  const auto path = scratch("atomic.txt");
  write_atomic(path, "first");
  write_atomic(path, "second");
  EXPECT_EQ(read_text(path), "second");
  for (const auto& entry : fs::directory_iterator(path.parent_path())) {
    EXPECT_EQ(entry.path().filename().string().find(".tmp."), std::string::npos);
  }
  EXPECT_THROW(write_atomic(path.parent_path() / "missing" / "x.txt", "y"), std::runtime_error);
  fs::remove_all(path.parent_path());
}

TEST(OperatorCsv, ListsEveryEntry) {
  OperatorMatrix op{Eigen::MatrixXd::Identity(2, 2), true};
  EXPECT_EQ(format_operator_csv(op), "row,col,value\n0,0,1\n0,1,0\n1,0,0\n1,1,1\n");
  HermitianOperator h{Eigen::MatrixXcd::Identity(1, 1) * std::complex<double>(0.0, 2.0)};
  EXPECT_EQ(format_operator_csv(h), "row,col,re,im\n0,0,0,2\n");
}

TEST(ConstantsCsv, OneRowPerTrendPoint) {
  ConstantEstimate e{"upsilon", 16.0, {{2, 16.0}, {4, 16.0}}, true};
  EXPECT_EQ(format_constants_csv({e}), "name,N,value\nupsilon,2,16\nupsilon,4,16\n");
}
