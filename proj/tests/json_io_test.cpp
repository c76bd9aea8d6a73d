// Copyright 2026 The qmarkov Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace qmarkov {
namespace {

using io::Json;

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const PreconditionError& e) {
    return e.what();
  }
  return {};
}

TEST(MatrixJson, EncodingIsRowsOfPairs) {
  Operator m(2, 2);
  m << Complex(1, 2), Complex(3, 4), Complex(5, 6), Complex(7, 8);
  const Json j = io::matrix_to_json(m);
  EXPECT_EQ(j.dump(), "[[[1.0,2.0],[3.0,4.0]],[[5.0,6.0],[7.0,8.0]]]");
  EXPECT_EQ(io::matrix_from_json(j, "m"), m);
}

TEST(MatrixJson, RoundTripIsExact) {
  testing::Rng rng(80);
  const Operator x = testing::random_operator(3, rng);
  EXPECT_EQ(io::matrix_from_json(Json::parse(io::matrix_to_json(x).dump()), "x"), x);
}

TEST(MatrixJson, ErrorsNameTheField) {
  EXPECT_NE(message_of([] { io::matrix_from_json(Json::parse("[[[1,0],[0,0]],[[0,0]]]"), "rho"); }).find("rho[1]"),
            std::string::npos);
  EXPECT_NE(message_of([] { io::matrix_from_json(Json::parse("[[[1,0],[0]]]"), "rho"); }).find("rho[0][1]"),
            std::string::npos);
  EXPECT_NE(message_of([] { io::matrix_from_json(Json::parse("{}"), "u"); }).find("u:"), std::string::npos);
  EXPECT_NE(message_of([] { io::matrix_from_json(Json::parse("[[[1,\"a\"]]]"), "u"); }).find("u[0][0]"),
            std::string::npos);
}

TEST(ChannelJson, RoundTrip) {
  const KrausMap map = random_cptp(3, 2, 81);
  const KrausMap back = io::channel_from_json(Json::parse(io::channel_to_json(map).dump()));
  ASSERT_EQ(back.size(), map.size());
  for (std::size_t k = 0; k < map.size(); ++k) EXPECT_EQ(back.kraus()[k], map.kraus()[k]);
  EXPECT_EQ(io::channel_to_json(map)["dim"], 3);
}

TEST(ChannelJson, ErrorsNameTheField) {
  EXPECT_NE(message_of([] { io::channel_from_json(Json::parse(R"({"kraus": []})")); }).find("channel.dim"),
            std::string::npos);
  EXPECT_NE(message_of([] { io::channel_from_json(Json::parse(R"({"dim": 2, "kraus": []})")); }).find("channel.kraus"),
            std::string::npos);
  const std::string mismatch = message_of([] {
    io::channel_from_json(Json::parse(R"({"dim": 2, "kraus": [[[[1,0],[0,0]],[[0,0],[1,0]]], [[[1,0]]]]})"));
  });
  EXPECT_NE(mismatch.find("channel.kraus[1]"), std::string::npos) << mismatch;
  EXPECT_NE(mismatch.find("2x2"), std::string::npos) << mismatch;
}

TEST(StateJson, AcceptsBareMatrixOrReport) {
  const Json bare = io::matrix_to_json(identity(2) / 2.0);
  EXPECT_EQ(io::state_from_json(bare, 2, "state"), identity(2) / 2.0);
  const Json report = io::invariant_state_report(find_invariant_state(testing::bit_flip(0.3)));
  EXPECT_LT(hs_norm(io::state_from_json(report, 2, "state") - identity(2) / 2.0), 1e-12);
  EXPECT_NE(message_of([&] { io::state_from_json(bare, 3, "state"); }).find("3x3"), std::string::npos);
}

TEST(Files, UnreadableAndMalformedInputs) {
  EXPECT_NE(message_of([] { io::read_json_file("/nonexistent/x.json"); }).find("cannot read"), std::string::npos);
  const std::string path = (std::filesystem::temp_directory_path() / "qmarkov_malformed.json").string();
  io::write_text_file(path, "{\"dim\": 2,");
  EXPECT_NE(message_of([&] { io::read_json_file(path); }).find("malformed JSON"), std::string::npos);
  std::filesystem::remove(path);
}

TEST(Reports, SpectrumLayout) {
  const Json j = io::spectrum_report(full_spectrum(testing::bit_flip(0.3)));
  ASSERT_EQ(j["eigenvalues"].size(), 4u);
  ASSERT_EQ(j["peripheral"].size(), 1u);
  EXPECT_EQ(j["peripheral"][0]["multiplicity"], 2);
  EXPECT_EQ(j["peripheral"][0]["lambda"], Json::parse("[1.0, 0.0]"));
}

TEST(Reports, AttractorLayout) {
  const Json j = io::attractor_report(attractor_basis(amplitude_damping(0.5)), Json{{"eigen_residual", 0.0}});
  ASSERT_EQ(j["entries"].size(), 1u);
  EXPECT_TRUE(j["entries"][0].contains("X"));
  EXPECT_TRUE(j["entries"][0].contains("X_dual"));
  EXPECT_EQ(j["route"], "spectral_left_eigenvectors");
  EXPECT_EQ(j["residuals"]["eigen_residual"], 0.0);
}

TEST(Reports, InvariantStateLayout) {
  const Json j = io::invariant_state_report(find_invariant_state(amplitude_damping(0.5)));
  EXPECT_EQ(j["support_dim"], 1);
  EXPECT_EQ(j["strictly_positive"], false);
  EXPECT_TRUE(j["residual"].is_number());
  EXPECT_EQ(j["state"].size(), 2u);
}

TEST(Reports, ConvergenceCsv) {
  const std::vector<ConvergencePoint> points{{0, 0.0}, {5, 0.25}};
  EXPECT_EQ(io::convergence_csv(points), "n,distance\n0,0\n5,0.25\n");
}

}  // namespace
}  // namespace qmarkov
