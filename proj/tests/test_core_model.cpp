/*
 * Copyright 2026 The picker-bench Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <random>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "pbench/atomic_file.hpp"
#include "pbench/dataset.hpp"
#include "pbench/design.hpp"
#include "pbench/error.hpp"
#include "pbench/trace_io.hpp"

namespace fs = std::filesystem;
using namespace pbench;

namespace {

constexpr const char* kHeader = R"({"schema":"picker-bench/1"})";

std::string source_line(const std::string& id, double lat = 42.0, double lon = 13.0) {
  std::ostringstream s;
  s << R"({"type":"source","source_id":")" << id << R"(","latitude":)" << lat
    << R"(,"longitude":)" << lon << "}";
  return s.str();
}

std::string quake_line(const std::string& id, const std::string& src, int p = 100, int n = 1000) {
  std::ostringstream s;
  s << R"({"type":"waveform","waveform_id":")" << id << R"(","kind":"earthquake","source_id":")"
    << src << R"(","station_latitude":42.1,"station_longitude":13.1,"p_arrival_index":)" << p
    << R"(,"n_samples":)" << n << "}";
  return s.str();
}

Dataset parse(const std::string& text) {
  std::istringstream in(text);
  return parse_metadata(in);
}

fs::path temp_dir(const std::string& name) {
  auto p = fs::temp_directory_path() / ("pbench_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST(Metadata, EmptyFileIsEmptyDataset) {
  const auto d = parse("");
  EXPECT_TRUE(d.sources().empty());
  EXPECT_TRUE(d.waveforms().empty());
}

TEST(Metadata, MinimalValidDataset) {
  const auto d = parse(std::string(kHeader) + "\n" + source_line("s1") + "\n" +
                       quake_line("w1", "s1") + "\n");
  EXPECT_EQ(d.sources().size(), 1u);
  EXPECT_EQ(d.waveforms().size(), 1u);
  EXPECT_EQ(d.earthquake_count(), 1u);
  EXPECT_EQ(d.waveforms_of_source("s1").size(), 1u);
}

TEST(Metadata, DanglingSourceNamesTheId) {
  try {
    parse(std::string(kHeader) + "\n" + quake_line("w1", "X") + "\n");
    FAIL() << "expected an integrity error";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("'X'"), std::string::npos) << e.what();
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(Metadata, MalformedLineReportsLineNumber) {
  try {
    parse(std::string(kHeader) + "\n" + source_line("s1") + "\n{not json\n");
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(Metadata, RejectsInvalidRecords) {
  const std::string h = std::string(kHeader) + "\n";
  EXPECT_THROW(parse(h + source_line("a") + "\n" + source_line("a") + "\n"), FormatError);
  EXPECT_THROW(parse(h + source_line("a", 91.0) + "\n"), FormatError);
  EXPECT_THROW(parse(h + source_line("a", 0.0, -180.5) + "\n"), FormatError);
  EXPECT_THROW(parse(h + source_line("a") + "\n" + quake_line("w", "a", 1000, 1000) + "\n"),
               FormatError);
  EXPECT_THROW(parse(h + source_line("a") + "\n" + quake_line("w", "a") + "\n" +
                     quake_line("w", "a") + "\n"),
               FormatError);
  // noise with arrival labels
  EXPECT_THROW(parse(h + R"({"type":"waveform","waveform_id":"n","kind":"noise","station_latitude":1,"station_longitude":1,"p_arrival_index":3,"n_samples":10})" "\n"),
               FormatError);
  // S before P
  EXPECT_THROW(parse(h + source_line("a") + "\n" + R"({"type":"waveform","waveform_id":"w","kind":"earthquake","source_id":"a","station_latitude":1,"station_longitude":1,"p_arrival_index":30,"s_arrival_index":30,"n_samples":100})" "\n"),
               FormatError);
  EXPECT_THROW(parse(R"({"schema":"picker-bench/9"})" "\n"), FormatError);
  EXPECT_THROW(parse(source_line("a") + "\n"), FormatError);
}

TEST(Metadata, RoundTripIsFieldExact) {
  SourceRecord s{"s1", 42.5, 13.25, 10.5, 3.1, "2020-01-01T00:00:00Z"};
  WaveformRecord q;
  q.waveform_id = "w1";
  q.source_id = "s1";
  q.station_latitude = 42.0;
  q.station_longitude = 13.0;
  q.p_arrival_index = 500;
  q.s_arrival_index = 900;
  q.n_samples = 6000;
  q.trace_ref = "traces/w1.pbt";
  WaveformRecord n;
  n.waveform_id = "n1";
  n.kind = WaveformKind::noise;
  n.station_latitude = 0.1 + 0.2;
  n.station_longitude = -1.0 / 3.0;
  n.n_samples = 6000;
  const Dataset d({s}, {q, n});
  std::ostringstream out;
  write_metadata(out, d);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), kHeader);
  const auto back = parse(out.str());
  EXPECT_EQ(back, d);
  std::ostringstream again;
  write_metadata(again, back);
  EXPECT_EQ(again.str(), out.str());
}

TEST(TraceIo, RoundTripKnownFloats) {
  Trace3C t(4);
  const float vals[3][4] = {{0.0f, -0.0f, 1.5f, 3.4028235e38f},
                            {1e-45f, -2.25f, 7.0f, 0.1f},
                            {-1.0f, 2.0f, -3.0f, 4.0f}};
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < 4; ++i) t.components[c][i] = vals[c][i];
  const auto bytes = encode_trace(t);
  ASSERT_EQ(bytes.size(), 8u + 3 * 4 * 4);
  EXPECT_EQ(std::memcmp(bytes.data(), "PBT1", 4), 0);
  EXPECT_EQ(static_cast<unsigned>(bytes[4]), 4u);
  const auto back = decode_trace(bytes);
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < 4; ++i)
      EXPECT_EQ(std::bit_cast<std::uint32_t>(back.components[c][i]),
                std::bit_cast<std::uint32_t>(vals[c][i]));
  // Little-endian payload: 1.5f = 0x3FC00000 at component 0 sample 2.
  const std::size_t off = 8 + 2 * 4;
  EXPECT_EQ(static_cast<unsigned>(bytes[off + 3]), 0x3Fu);
  EXPECT_EQ(static_cast<unsigned>(bytes[off + 2]), 0xC0u);
}

TEST(TraceIo, LengthMismatchAndBadMagic) {
  Trace3C t(4);
  auto bytes = encode_trace(t);
  bytes[4] = std::byte{5};
  EXPECT_THROW(decode_trace(bytes), FormatError);
  bytes = encode_trace(t);
  bytes[0] = std::byte{'X'};
  EXPECT_THROW(decode_trace(bytes), FormatError);
  EXPECT_THROW(decode_trace(std::span<const std::byte>(bytes.data(), 3)), FormatError);
}

TEST(TraceIo, FileRoundTripIsByteIdentical) {
  const auto dir = temp_dir("trace");
  Trace3C t(257);
  std::mt19937 rng(7);
  std::normal_distribution<float> nd;
  for (auto& c : t.components)
    for (auto& v : c) v = nd(rng);
  save_trace(dir / "a.pbt", t);
  const auto first = read_file(dir / "a.pbt");
  save_trace(dir / "b.pbt", load_trace(dir / "a.pbt"));
  EXPECT_EQ(read_file(dir / "b.pbt"), first);
  EXPECT_EQ(load_trace(dir / "a.pbt", 257), t);
  EXPECT_THROW(load_trace(dir / "a.pbt", 256), FormatError);
  EXPECT_THROW(load_trace(dir / "missing.pbt"), IoError);
}

TEST(Design, DefaultHas720Instances) {
  const DesignSpec d;
  const auto keys = enumerate_instances(d);
  EXPECT_EQ(keys.size(), 720u);
  EXPECT_EQ(d.instance_count(), 720u);
}

TEST(Design, TinyEnumerationOrder) {
  DesignSpec d{1, {1}, 2, 2};
  const auto keys = enumerate_instances(d);
  const std::vector<ModelInstanceKey> want{{0, 0, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}, {0, 0, 1, 1}};
  EXPECT_EQ(keys, want);
  EXPECT_THROW(d.validate(), ValidationError);
}

TEST(Design, EnumerationIsSortedBijection) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    DesignSpec d;
    d.models = 1 + static_cast<int>(rng() % 4);
    d.quantity_levels.clear();
    const int A = 1 + static_cast<int>(rng() % 4);
    for (int a = 0; a < A; ++a) d.quantity_levels.push_back(a * 2 + 1);
    d.cluster_sets = 1 + static_cast<int>(rng() % 5);
    d.initializations = 1 + static_cast<int>(rng() % 5);
    const auto keys = enumerate_instances(d);
    ASSERT_EQ(keys.size(), static_cast<std::size_t>(d.models * A * d.cluster_sets * d.initializations));
    EXPECT_TRUE(std::is_sorted(keys.begin(), keys.end()));
    EXPECT_EQ(std::set<ModelInstanceKey>(keys.begin(), keys.end()).size(), keys.size());
    MetricTable t("x", d);
    for (std::size_t k = 0; k < keys.size(); ++k) {
      EXPECT_EQ(t.flat_index(keys[k]), k);
      EXPECT_EQ(t.key_at(k), keys[k]);
    }
  }
}

TEST(Design, ValidationRules) {
  DesignSpec d;
  EXPECT_NO_THROW(d.validate());
  EXPECT_NO_THROW(d.validate(12));
  EXPECT_THROW(d.validate(11), ValidationError);
  d.quantity_levels = {1, 3, 3};
  EXPECT_THROW(d.validate_shape(), ValidationError);
  d = DesignSpec{};
  d.initializations = 1;
  EXPECT_THROW(d.validate(), ValidationError);
}

TEST(MetricTable, MaskIsExplicit) {
  DesignSpec d{2, {1, 3}, 2, 2};
  MetricTable t("recall", d);
  EXPECT_FALSE(t.complete());
  for (const auto& k : enumerate_instances(d)) t.set(k, 0.5 + 0.01 * k.init);
  EXPECT_TRUE(t.complete());
  t.set_missing({1, 1, 0, 1});
  EXPECT_FALSE(t.observed({1, 1, 0, 1}));
  EXPECT_FALSE(t.get({1, 1, 0, 1}).has_value());
  EXPECT_THROW(t.at({1, 1, 0, 1}), ValidationError);
  EXPECT_TRUE(t.cell_complete(0, 0));
  EXPECT_FALSE(t.cell_complete(1, 1));
  EXPECT_THROW(t.cell_values(1, 1), ValidationError);
  EXPECT_EQ(t.cell_values(0, 1).size(), 4u);
  EXPECT_THROW(t.flat_index({2, 0, 0, 0}), ValidationError);
}

TEST(AtomicFile, ReplacesWholeFile) {
  const auto dir = temp_dir("atomic");
  write_file_atomic(dir / "sub" / "f.txt", "first version, longer");
  write_file_atomic(dir / "sub" / "f.txt", "second");
  EXPECT_EQ(read_file(dir / "sub" / "f.txt"), "second");
  int files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir / "sub")) ++files;
  EXPECT_EQ(files, 1);
}
