// tests/test_dataset.cpp

// Copyright 2026  The hsc authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "hsc/audio_io.hpp"
#include "hsc/dataset.hpp"
#include "support/oracles.hpp"

using namespace hsc;
namespace ht = hsc::testing;

namespace {

const fs::path kFixtures = HSC_TEST_FIXTURES;

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::Usage;
}

}  // namespace

TEST_CASE("transcript parsing", "[dataset]") {
  SECTION("tab separated") {
    const auto t = parse_transcripts_text("clip_001.wav\tthe time machine\n");
    REQUIRE(t.entries.size() == 1);
    CHECK(t.entries[0] == TranscriptEntry{"clip_001.wav", "the time machine"});
    CHECK(t.separator == TranscriptSeparator::Tab);
  }
  SECTION("whitespace separated with blank lines and CRLF") {
    const auto t = parse_transcripts_text("\xEF\xBB\xBF" "a.wav   hello there\r\n\r\n  b.wav bye\r\n");
    REQUIRE(t.entries.size() == 2);
    CHECK(t.separator == TranscriptSeparator::Whitespace);
    CHECK(t.entries[0] == TranscriptEntry{"a.wav", "hello there"});
    CHECK(t.entries[1] == TranscriptEntry{"b.wav", "bye"});
  }
  SECTION("tab wins when present, spaces stay in the text") {
    const auto t = parse_transcripts_text("my clip.wav\tsome words here\n");
    CHECK(t.entries[0].filename == "my clip.wav");
  }
  SECTION("errors") {
    CHECK(kind_of([] { parse_transcripts_text("a.wav hi\na.wav again\n"); }) == ErrorKind::DuplicateFilename);
    CHECK(kind_of([] { parse_transcripts_text("a.wav hi\nlonely\n"); }) == ErrorKind::UnparseableLine);
    try {
      parse_transcripts_text("a.wav\thi\n\nb.wav no tab\n");
      FAIL("expected UnparseableLine");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::UnparseableLine);
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
  }
}

TEST_CASE("transcript render/parse round trip", "[dataset][property]") {
  std::mt19937_64 rng(3);
  const std::string letters = "abcdefghij ,.'";
  for (int trial = 0; trial < 100; ++trial) {
    TranscriptTable t;
    t.separator = rng() % 2 ? TranscriptSeparator::Tab : TranscriptSeparator::Whitespace;
    const int n = 1 + static_cast<int>(rng() % 20);
    for (int i = 0; i < n; ++i) {
      std::string text;
      const int len = 1 + static_cast<int>(rng() % 30);
      for (int k = 0; k < len; ++k) text += letters[rng() % letters.size()];
      text = std::string(trim(text));
      if (text.empty()) text = "x";
      t.entries.push_back({"clip_" + std::to_string(i) + ".wav", text});
    }
    const auto back = parse_transcripts_text(render_transcripts(t));
    REQUIRE(back.entries == t.entries);
    REQUIRE(back.separator == t.separator);
  }
}

TEST_CASE("csv helpers", "[dataset]") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  const auto rows = parse_csv("a,b\n\"x,1\",\"he said \"\"no\"\"\"\r\n\"multi\nline\",\n");
  REQUIRE(rows.size() == 3);
  CHECK(rows[1] == std::vector<std::string>{"x,1", "he said \"no\""});
  CHECK(rows[2] == std::vector<std::string>{"multi\nline", ""});
  CHECK_THROWS_AS(parse_csv("\"open"), Error);

  const std::map<std::string, std::string> m{{"a.wav", "hello, world"}, {"b.wav", ""}};
  CHECK(parse_transcription_csv(render_transcription_csv(m)) == m);
  CHECK(kind_of([] { parse_transcription_csv("file,text\na,b\n"); }) == ErrorKind::UnparseableLine);
  CHECK(kind_of([] { parse_transcription_csv("filename,transcription\na,b\na,c\n"); }) == ErrorKind::DuplicateFilename);
}

TEST_CASE("directory evaluation", "[dataset]") {
  const auto dir = kFixtures / "eval";
  const auto table = parse_transcripts(dir / "text_samples.txt");
  const auto hyps = load_transcription_csv(dir / "transcriptions.csv");
  const auto report = evaluate_directory(dir / "audio", table, hyps);
  REQUIRE(report.rows.size() == 5);
  CHECK(report.rows[0].filename == "clip_001.wav");
  CHECK(report.rows[4].status == RowStatus::MissingTranscript);
  CHECK(report.rows[4].result.cer == 1.0);
  CHECK(render_evaluation_csv(report) == read_text_file(dir / "golden.csv"));
  CHECK(render_evaluation_csv(report, true) == read_text_file(dir / "golden_strict.csv"));

  std::vector<CerResult> results;
  for (const auto& r : report.rows) results.push_back(r.result);
  CHECK(report.mean_cer == mean_cer(std::span<const CerResult>(results)));

  SECTION("perfect transcripts") {
    std::map<std::string, std::string> perfect;
    for (const auto& e : table.entries) perfect[e.filename] = e.text;
    const auto r = evaluate_directory(dir / "audio", table, perfect);
    CHECK(r.mean_cer == 0.0);
    for (const auto& row : r.rows) CHECK(row.result.cer == 0.0);
  }
  SECTION("missing audio is flagged, not fatal") {
    TranscriptTable t = table;
    t.entries.push_back({"clip_404.wav", "nothing here"});
    const auto r = evaluate_directory(dir / "audio", t, hyps);
    REQUIRE(r.rows.size() == 6);
    CHECK(r.rows.back().status == RowStatus::MissingAudio);
    CHECK(missing_audio(t, dir / "audio") == std::vector<std::string>{"clip_404.wav"});
  }
}

TEST_CASE("outlier removal", "[dataset]") {
  std::vector<CerRecord> records;
  for (int i = 0; i < 100; ++i) records.push_back({"f" + std::to_string(1000 + i), i / 100.0});
  auto kept = clean_outliers(records);
  CHECK(kept.size() == 95);
  CHECK(std::find(kept.begin(), kept.end(), "f1099") == kept.end());
  CHECK(std::find(kept.begin(), kept.end(), "f1094") != kept.end());
  CHECK(clean_outliers(records, 0.0).size() == 100);

  std::vector<CerRecord> equal;
  for (int i = 0; i < 30; ++i) equal.push_back({"f" + std::to_string(10 + i), 0.5});
  kept = clean_outliers(equal);
  CHECK(kept.size() == 28);  // ceil(1.5)
  CHECK(kept.back() == "f37");

  CHECK(clean_outliers(std::vector<CerRecord>{}, 0.05).empty());
  CHECK(clean_outliers(std::vector<CerRecord>(20, {"x", 0.1}), 0.05).size() == 19);
  CHECK_THROWS_AS(clean_outliers(records, 1.0), Error);

  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = rng() % 300;
    std::vector<CerRecord> r;
    for (std::size_t i = 0; i < n; ++i) r.push_back({"f" + std::to_string(i), static_cast<double>(rng() % 7) / 7.0});
    const double fraction = static_cast<double>(rng() % 50) / 100.0;
    const auto k = clean_outliers(r, fraction);
    REQUIRE(n - k.size() == static_cast<std::size_t>(std::ceil(fraction * n - 1e-9)));
  }
}

TEST_CASE("clean clip preparation", "[dataset]") {
  const AudioClip raw24(ht::speech_like(2.0, 24000, 1), 24000);
  const auto a = prepare_clean_clip(raw24, false);
  CHECK(a.sample_rate_hz() == 16000);
  CHECK(a.size() == 48000);
  const auto b = prepare_clean_clip(raw24, true);
  CHECK(b.size() == 120000);
  for (std::size_t i = 0; i < 8000; ++i) REQUIRE(b[i] == 0.0);
  for (std::size_t i = b.size() - 80000; i < b.size(); ++i) REQUIRE(b[i] == 0.0);
  CHECK(peak_abs(b.samples()) == Catch::Approx(db_to_amplitude(-1.0)).epsilon(1e-9));

  const AudioClip raw16(ht::speech_like(1.0, 16000, 2), 16000);
  CHECK(prepare_clean_clip(raw16, false).size() == 16000 + 16000);
  CHECK_THROWS_AS(prepare_clean_clip(AudioClip(std::vector<double>(100, 0.0), 16000), false), Error);
}

TEST_CASE("dataset layout", "[dataset]") {
  const auto root = kFixtures / "dataset";
  const auto layout = discover_layout(root, LevelRegistry::builtin());
  REQUIRE(layout.levels.size() == 3);
  for (const auto& level : layout.levels) {
    INFO(level.id.str());
    CHECK(level.count(FileRole::Unknown) == 0);
    CHECK(level.text_file.has_value());
    CHECK(level.count(FileRole::Recorded) == 2);
    const auto table = parse_transcripts(*level.text_file);
    CHECK(missing_audio(table, level.recorded_dir).empty());
    CHECK(missing_audio(table, level.clean_dir).empty());
  }
  const auto* t3 = layout.find(parse_level_id("T3L1"));
  REQUIRE(t3);
  CHECK(t3->clean_dir == root / "Task_2_Level_2" / "Clean");
  CHECK(layout.find(parse_level_id("T1L1"))->count(FileRole::Measurement) == 2);
  CHECK(layout.find(parse_level_id("T1L1"))->count(FileRole::Clean) == 2);

  SECTION("strict mode requires every level") {
    LayoutOptions strict;
    strict.strict = true;
    CHECK_THROWS_AS(discover_layout(root, LevelRegistry::builtin(), strict), Error);
  }
  SECTION("unknown files are reported") {
    ht::TempDir tmp;
    fs::create_directories(tmp / "Task_1_Level_1" / "Recorded");
    std::ofstream(tmp / "Task_1_Level_1" / "notes.md") << "x";
    const auto l = discover_layout(tmp.path(), LevelRegistry::builtin());
    REQUIRE(l.levels.size() == 1);
    CHECK(l.levels[0].count(FileRole::Unknown) == 1);
  }
}

TEST_CASE("wav listing", "[dataset]") {
  const auto files = list_wav_files(kFixtures / "eval" / "audio");
  REQUIRE(files.size() == 5);
  CHECK(files.front().filename() == "clip_001.wav");
  CHECK(validate_challenge_format(files.front()).violations.empty());
}
