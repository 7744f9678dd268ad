// hsc/fetch.hpp

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

#pragma once

#include <curl/curl.h>
#include <openssl/evp.h>
#include <zlib.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cerrno>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hsc/config.hpp"
#include "hsc/dataset.hpp"
#include "hsc/error.hpp"

namespace hsc {

namespace fs = std::filesystem;

// ---------------------------------------------------------------- checksums

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new(), &EVP_MD_CTX_free) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
      fail(ErrorKind::IoFailure, "cannot initialize SHA-256");
    }
  }
  void update(const void* data, std::size_t n) { EVP_DigestUpdate(ctx_.get(), data, n); }
  std::string hex() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx_.get(), md.data(), &len);
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
      out += digits[md[i] >> 4];
      out += digits[md[i] & 15];
    }
    return out;
  }

 private:
  std::unique_ptr<EVP_MD_CTX, void (*)(EVP_MD_CTX*)> ctx_;
};

inline std::string sha256_hex(std::string_view bytes) {
  Sha256 h;
  h.update(bytes.data(), bytes.size());
  return h.hex();
}

inline std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::IoFailure, "cannot open " + path.string());
  Sha256 h;
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    h.update(buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  return h.hex();
}

// ----------------------------------------------------------------- manifest

struct ManifestEntry {
  std::string filename;
  std::string sha256;  // lowercase hex
  std::string url;     // empty: base_url + filename
};

struct Manifest {
  std::string base_url;
  std::vector<ManifestEntry> entries;

  std::string url_for(const ManifestEntry& e) const {
    if (!e.url.empty()) return e.url;
    if (base_url.empty()) fail(ErrorKind::InvalidConfig, "manifest has no base_url for " + e.filename);
    return base_url.back() == '/' ? base_url + e.filename : base_url + "/" + e.filename;
  }
};

/// Lines are "base_url URL" or "FILENAME SHA256 [URL]"; '#' starts a comment.
inline Manifest parse_manifest(std::string_view text) {
  Manifest m;
  std::size_t line_no = 0;
  for (const auto& raw : split(text, '\n')) {
    ++line_no;
    std::string line(raw);
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::vector<std::string> tok;
    for (const auto& t : split(line, ' ')) {
      const auto s = trim(t);
      if (!s.empty()) tok.emplace_back(s);
    }
    if (tok.empty()) continue;
    auto bad = [&](const std::string& why) {
      fail(ErrorKind::InvalidConfig, "manifest line " + std::to_string(line_no) + ": " + why);
    };
    if (tok[0] == "base_url") {
      if (tok.size() != 2) bad("base_url takes one value");
      m.base_url = tok[1];
      continue;
    }
    if (tok.size() < 2 || tok.size() > 3) bad("expected FILENAME SHA256 [URL]");
    ManifestEntry e{tok[0], tok[1], tok.size() == 3 ? tok[2] : std::string()};
    if (e.filename.find('/') != std::string::npos || e.filename.find('\\') != std::string::npos ||
        e.filename == "." || e.filename == "..") {
      bad("filename must not contain a path");
    }
    std::transform(e.sha256.begin(), e.sha256.end(), e.sha256.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (e.sha256.size() != 64 || e.sha256.find_first_not_of("0123456789abcdef") != std::string::npos) {
      bad("checksum is not a SHA-256 hex digest");
    }
    for (const auto& prev : m.entries) {
      if (prev.filename == e.filename) bad("duplicate archive " + e.filename);
    }
    m.entries.push_back(std::move(e));
  }
  return m;
}

inline Manifest load_manifest(const fs::path& path) { return parse_manifest(read_text_file(path)); }

inline std::string render_manifest(const Manifest& m) {
  std::string out;
  if (!m.base_url.empty()) out += "base_url " + m.base_url + "\n";
  for (const auto& e : m.entries) out += e.filename + " " + e.sha256 + (e.url.empty() ? "" : " " + e.url) + "\n";
  return out;
}

// ---------------------------------------------------------------------- zip

struct ZipEntry {
  std::string name;
  std::uint16_t method = 0;
  std::uint16_t flags = 0;
  std::uint32_t crc32 = 0;
  std::uint64_t compressed_size = 0;
  std::uint64_t uncompressed_size = 0;
  std::uint64_t local_header_offset = 0;

  bool is_directory() const { return !name.empty() && name.back() == '/'; }
};

namespace detail {

[[noreturn]] inline void bad_zip(const fs::path& p, const std::string& why) {
  fail(ErrorKind::MalformedContainer, p.filename().string() + ": " + why);
}

inline std::uint64_t le(const unsigned char* p, int n) {
  std::uint64_t v = 0;
  for (int i = n - 1; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

inline void read_at(std::ifstream& in, std::uint64_t off, void* dst, std::size_t n, const fs::path& p) {
  in.clear();
  in.seekg(static_cast<std::streamoff>(off));
  in.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) bad_zip(p, "truncated archive");
}

// Rejects absolute paths and parent references.
inline fs::path safe_member_path(const std::string& name, const fs::path& archive) {
  if (name.empty() || name.front() == '/' || name.find('\\') != std::string::npos || name.find(':') != std::string::npos) {
    bad_zip(archive, "unsafe member name " + name);
  }
  fs::path rel;
  for (const auto& part : fs::path(name)) {
    if (part == "..") bad_zip(archive, "unsafe member name " + name);
    if (part.empty() || part == ".") continue;
    rel /= part;
  }
  return rel;
}

}  // namespace detail

inline std::vector<ZipEntry> read_zip_directory(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::IoFailure, "cannot open " + path.string());
  const std::uint64_t size = fs::file_size(path);
  if (size < 22) detail::bad_zip(path, "too small for a zip archive");

  const std::uint64_t tail_len = std::min<std::uint64_t>(size, 22 + 65535);
  std::vector<unsigned char> tail(tail_len);
  detail::read_at(in, size - tail_len, tail.data(), tail.size(), path);
  std::optional<std::uint64_t> eocd;
  for (std::uint64_t i = tail_len - 22 + 1; i-- > 0;) {
    if (detail::le(&tail[i], 4) == 0x06054b50) {
      eocd = i;
      break;
    }
  }
  if (!eocd) detail::bad_zip(path, "no end of central directory record");
  const unsigned char* e = &tail[*eocd];
  std::uint64_t count = detail::le(e + 10, 2);
  std::uint64_t cd_size = detail::le(e + 12, 4);
  std::uint64_t cd_offset = detail::le(e + 16, 4);
  if (detail::le(e + 4, 2) != 0 || detail::le(e + 6, 2) != 0) detail::bad_zip(path, "multi-volume archives are not supported");

  if (count == 0xFFFF || cd_size == 0xFFFFFFFF || cd_offset == 0xFFFFFFFF) {
    const std::uint64_t eocd_abs = size - tail_len + *eocd;
    if (eocd_abs < 20) detail::bad_zip(path, "missing zip64 locator");
    unsigned char loc[20];
    detail::read_at(in, eocd_abs - 20, loc, sizeof loc, path);
    if (detail::le(loc, 4) != 0x07064b50) detail::bad_zip(path, "missing zip64 locator");
    unsigned char rec[56];
    detail::read_at(in, detail::le(loc + 8, 8), rec, sizeof rec, path);
    if (detail::le(rec, 4) != 0x06064b50) detail::bad_zip(path, "bad zip64 end record");
    count = detail::le(rec + 32, 8);
    cd_size = detail::le(rec + 40, 8);
    cd_offset = detail::le(rec + 48, 8);
  }
  if (cd_offset + cd_size > size) detail::bad_zip(path, "central directory out of range");

  std::vector<unsigned char> cd(cd_size);
  if (cd_size) detail::read_at(in, cd_offset, cd.data(), cd.size(), path);
  std::vector<ZipEntry> out;
  std::size_t pos = 0;
  for (std::uint64_t k = 0; k < count; ++k) {
    if (pos + 46 > cd.size() || detail::le(&cd[pos], 4) != 0x02014b50) detail::bad_zip(path, "bad central directory entry");
    const unsigned char* h = &cd[pos];
    ZipEntry z;
    z.flags = static_cast<std::uint16_t>(detail::le(h + 8, 2));
    z.method = static_cast<std::uint16_t>(detail::le(h + 10, 2));
    z.crc32 = static_cast<std::uint32_t>(detail::le(h + 16, 4));
    z.compressed_size = detail::le(h + 20, 4);
    z.uncompressed_size = detail::le(h + 24, 4);
    const std::size_t name_len = detail::le(h + 28, 2), extra_len = detail::le(h + 30, 2), comment_len = detail::le(h + 32, 2);
    z.local_header_offset = detail::le(h + 42, 4);
    if (pos + 46 + name_len + extra_len + comment_len > cd.size()) detail::bad_zip(path, "central directory entry overruns");
    z.name.assign(reinterpret_cast<const char*>(h + 46), name_len);

    // zip64 extended information
    const unsigned char* x = h + 46 + name_len;
    for (std::size_t off = 0; off + 4 <= extra_len;) {
      const auto id = detail::le(x + off, 2);
      const std::size_t len = detail::le(x + off + 2, 2);
      if (off + 4 + len > extra_len) break;
      if (id == 0x0001) {
        const unsigned char* f = x + off + 4;
        std::size_t used = 0;
        auto take = [&](std::uint64_t& field) {
          if (field != 0xFFFFFFFF) return;
          if (used + 8 > len) detail::bad_zip(path, "short zip64 field in " + z.name);
          field = detail::le(f + used, 8);
          used += 8;
        };
        take(z.uncompressed_size);
        take(z.compressed_size);
        take(z.local_header_offset);
      }
      off += 4 + len;
    }
    out.push_back(std::move(z));
    pos += 46 + name_len + extra_len + comment_len;
  }
  return out;
}

/// Extracts every member under `dest`, verifying CRC-32. Supports stored and
/// deflated members. Returns the extracted regular files.
inline std::vector<fs::path> extract_zip(const fs::path& archive, const fs::path& dest) {
  const auto entries = read_zip_directory(archive);
  std::ifstream in(archive, std::ios::binary);
  const std::uint64_t size = fs::file_size(archive);
  std::vector<fs::path> written;
  std::vector<unsigned char> inbuf(1 << 16), outbuf(1 << 16);

  for (const auto& z : entries) {
    const fs::path rel = detail::safe_member_path(z.name, archive);
    const fs::path target = dest / rel;
    if (z.is_directory()) {
      fs::create_directories(target);
      continue;
    }
    if (z.flags & 1) fail(ErrorKind::UnsupportedEncoding, archive.filename().string() + ": encrypted member " + z.name);
    if (z.method != 0 && z.method != 8) {
      fail(ErrorKind::UnsupportedEncoding,
           archive.filename().string() + ": member " + z.name + " uses compression method " + std::to_string(z.method));
    }
    unsigned char lh[30];
    detail::read_at(in, z.local_header_offset, lh, sizeof lh, archive);
    if (detail::le(lh, 4) != 0x04034b50) detail::bad_zip(archive, "bad local header for " + z.name);
    const std::uint64_t data = z.local_header_offset + 30 + detail::le(lh + 26, 2) + detail::le(lh + 28, 2);
    if (data + z.compressed_size > size) detail::bad_zip(archive, "member " + z.name + " overruns the archive");

    fs::create_directories(target.parent_path());
    std::ofstream out(target, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::IoFailure, "cannot create " + target.string());
    auto emit = [&](const unsigned char* p, std::size_t n) {
      out.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n));
      if (!out) fail(errno == ENOSPC ? ErrorKind::DiskFull : ErrorKind::IoFailure, "cannot write " + target.string());
    };

    uLong crc = crc32(0L, Z_NULL, 0);
    std::uint64_t produced = 0;
    in.clear();
    in.seekg(static_cast<std::streamoff>(data));
    std::uint64_t remaining = z.compressed_size;
    if (z.method == 0) {
      while (remaining > 0) {
        const auto n = static_cast<std::size_t>(std::min<std::uint64_t>(remaining, inbuf.size()));
        in.read(reinterpret_cast<char*>(inbuf.data()), static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in.gcount()) != n) detail::bad_zip(archive, "truncated member " + z.name);
        crc = crc32(crc, inbuf.data(), static_cast<uInt>(n));
        emit(inbuf.data(), n);
        produced += n;
        remaining -= n;
      }
    } else {
      z_stream s{};
      if (inflateInit2(&s, -MAX_WBITS) != Z_OK) fail(ErrorKind::IoFailure, "inflateInit2 failed");
      std::unique_ptr<z_stream, int (*)(z_stream*)> guard(&s, &inflateEnd);
      int rc = Z_OK;
      while (rc != Z_STREAM_END) {
        if (s.avail_in == 0) {
          if (remaining == 0) detail::bad_zip(archive, "truncated deflate stream in " + z.name);
          const auto n = static_cast<std::size_t>(std::min<std::uint64_t>(remaining, inbuf.size()));
          in.read(reinterpret_cast<char*>(inbuf.data()), static_cast<std::streamsize>(n));
          if (static_cast<std::size_t>(in.gcount()) != n) detail::bad_zip(archive, "truncated member " + z.name);
          remaining -= n;
          s.next_in = inbuf.data();
          s.avail_in = static_cast<uInt>(n);
        }
        s.next_out = outbuf.data();
        s.avail_out = static_cast<uInt>(outbuf.size());
        rc = inflate(&s, Z_NO_FLUSH);
        if (rc != Z_OK && rc != Z_STREAM_END) detail::bad_zip(archive, "corrupt deflate stream in " + z.name);
        const std::size_t n = outbuf.size() - s.avail_out;
        crc = crc32(crc, outbuf.data(), static_cast<uInt>(n));
        emit(outbuf.data(), n);
        produced += n;
      }
    }
    if (produced != z.uncompressed_size) detail::bad_zip(archive, "size mismatch in " + z.name);
    if (static_cast<std::uint32_t>(crc) != z.crc32) detail::bad_zip(archive, "CRC mismatch in " + z.name);
    written.push_back(target);
  }
  return written;
}

// ----------------------------------------------------------------- download

struct DownloadOptions {
  long connect_timeout_s = 30;
  long low_speed_time_s = 60;  // abort when below 1 byte/s for this long
  std::function<std::uintmax_t(const fs::path&)> available_space;
};

namespace detail {

inline void curl_global() {
  static std::once_flag once;
  std::call_once(once, [] {
    if (curl_global_init(CURL_GLOBAL_DEFAULT) != CURLE_OK) fail(ErrorKind::NetworkFailure, "curl_global_init failed");
  });
}

inline std::uintmax_t space_of(const DownloadOptions& opt, const fs::path& dir) {
  if (opt.available_space) return opt.available_space(dir);
  std::error_code ec;
  const auto info = fs::space(dir, ec);
  return ec ? static_cast<std::uintmax_t>(-1) : info.available;
}

struct Transfer {
  CURL* curl = nullptr;
  std::FILE* file = nullptr;
  const fs::path* part = nullptr;
  const DownloadOptions* opt = nullptr;
  std::uint64_t resume_from = 0;
  bool checked = false;
  bool disk_full = false;
  bool write_failed = false;
  long status = 0;
};

inline std::size_t on_data(char* ptr, std::size_t size, std::size_t nmemb, void* user) {
  auto& t = *static_cast<Transfer*>(user);
  const std::size_t n = size * nmemb;
  if (!t.checked) {
    t.checked = true;
    curl_easy_getinfo(t.curl, CURLINFO_RESPONSE_CODE, &t.status);
    if (t.status >= 400) return n;  // body discarded; status reported after perform
    if (t.status == 200 && t.resume_from > 0) {
      // Range ignored by the server: start over.
      t.file = std::freopen(t.part->string().c_str(), "wb", t.file);
      t.resume_from = 0;
      if (!t.file) {
        t.write_failed = true;
        return 0;
      }
    }
    curl_off_t length = -1;
    curl_easy_getinfo(t.curl, CURLINFO_CONTENT_LENGTH_DOWNLOAD_T, &length);
    if (length > 0 && static_cast<std::uintmax_t>(length) > space_of(*t.opt, t.part->parent_path())) {
      t.disk_full = true;
      return 0;
    }
  }
  if (t.status >= 400) return n;
  if (std::fwrite(ptr, 1, n, t.file) != n) {
    (errno == ENOSPC ? t.disk_full : t.write_failed) = true;
    return 0;
  }
  return n;
}

}  // namespace detail

/// Downloads `url` into `part`, appending to an existing partial file with an
/// HTTP range request.
inline void download_resumable(const std::string& url, const fs::path& part, const DownloadOptions& opt = {}) {
  detail::curl_global();
  std::unique_ptr<CURL, void (*)(CURL*)> curl(curl_easy_init(), &curl_easy_cleanup);
  if (!curl) fail(ErrorKind::NetworkFailure, "curl_easy_init failed");
  std::error_code ec;
  const std::uint64_t have = fs::is_regular_file(part, ec) ? fs::file_size(part) : 0;
  std::FILE* f = std::fopen(part.string().c_str(), have ? "ab" : "wb");
  if (!f) fail(ErrorKind::IoFailure, "cannot open " + part.string());

  detail::Transfer t;
  t.curl = curl.get();
  t.file = f;
  t.part = &part;
  t.opt = &opt;
  t.resume_from = have;
  char errbuf[CURL_ERROR_SIZE] = {0};
  curl_easy_setopt(curl.get(), CURLOPT_URL, url.c_str());
  curl_easy_setopt(curl.get(), CURLOPT_FOLLOWLOCATION, 1L);
  curl_easy_setopt(curl.get(), CURLOPT_NOSIGNAL, 1L);
  curl_easy_setopt(curl.get(), CURLOPT_CONNECTTIMEOUT, opt.connect_timeout_s);
  curl_easy_setopt(curl.get(), CURLOPT_LOW_SPEED_LIMIT, 1L);
  curl_easy_setopt(curl.get(), CURLOPT_LOW_SPEED_TIME, opt.low_speed_time_s);
  curl_easy_setopt(curl.get(), CURLOPT_ERRORBUFFER, errbuf);
  curl_easy_setopt(curl.get(), CURLOPT_WRITEFUNCTION, &detail::on_data);
  curl_easy_setopt(curl.get(), CURLOPT_WRITEDATA, &t);
  if (have) curl_easy_setopt(curl.get(), CURLOPT_RESUME_FROM_LARGE, static_cast<curl_off_t>(have));
  const CURLcode rc = curl_easy_perform(curl.get());
  curl_easy_getinfo(curl.get(), CURLINFO_RESPONSE_CODE, &t.status);
  const bool closed_ok = t.file && std::fclose(t.file) == 0;

  if (t.disk_full) fail(ErrorKind::DiskFull, "not enough space for " + part.filename().string());
  if (t.write_failed || !closed_ok) fail(ErrorKind::IoFailure, "cannot write " + part.string());
  if (t.status == 416 && have > 0) return;  // part already holds the whole file
  if (rc != CURLE_OK) {
    fail(ErrorKind::NetworkFailure, url + ": " + (errbuf[0] ? std::string(errbuf) : curl_easy_strerror(rc)));
  }
  if (t.status >= 400) fail(ErrorKind::NetworkFailure, url + ": HTTP " + std::to_string(t.status));
}

// -------------------------------------------------------------------- fetch

struct FetchOptions {
  std::optional<fs::path> cache_dir;  // default: $HSC_CACHE_DIR, then dest/.cache
  bool offline = false;
  int jobs = 1;
  DownloadOptions download;
  LayoutOptions layout;
  std::function<void(const std::string&)> log;
};

inline constexpr const char* kCacheEnv = "HSC_CACHE_DIR";
inline constexpr const char* kExtractMarkerDir = ".hsc-extracted";

inline fs::path default_cache_dir(const fs::path& dest) {
  if (const char* env = std::getenv(kCacheEnv); env && *env) return env;
  return dest / ".cache";
}

namespace detail {

inline bool has_level_dirs(const fs::path& dir) {
  std::error_code ec;
  for (const auto& e : fs::directory_iterator(dir, ec)) {
    const auto name = e.path().filename().string();
    if (e.is_directory() && name.rfind("Task_", 0) == 0 && name.find("_Level_") != std::string::npos) return true;
  }
  return false;
}

// Archives may wrap the level folders in a single top directory.
inline fs::path find_dataset_root(const fs::path& dest) {
  if (has_level_dirs(dest)) return dest;
  std::vector<fs::path> hits;
  for (const auto& e : fs::directory_iterator(dest)) {
    if (e.is_directory() && e.path().filename().string().front() != '.' && has_level_dirs(e.path())) hits.push_back(e.path());
  }
  return hits.size() == 1 ? hits.front() : dest;
}

// Makes `archive` in `cache` present and verified, downloading if needed.
inline fs::path ensure_archive(const Manifest& m, const ManifestEntry& e, const fs::path& cache, const FetchOptions& opt) {
  const fs::path file = cache / e.filename;
  auto say = [&](const std::string& s) {
    if (opt.log) opt.log(s);
  };
  if (fs::is_regular_file(file)) {
    const auto got = sha256_file(file);
    if (got != e.sha256) {
      fail(ErrorKind::ChecksumMismatch,
           e.filename + ": cached archive has SHA-256 " + got + ", expected " + e.sha256 + "; delete it to download again");
    }
    say(e.filename + ": cached");
    return file;
  }
  if (opt.offline) fail(ErrorKind::NetworkFailure, e.filename + ": not cached and offline mode is set");
  const fs::path part = cache / (e.filename + ".part");
  say(e.filename + ": downloading" + (fs::exists(part) ? " (resuming)" : ""));
  download_resumable(m.url_for(e), part, opt.download);
  const auto got = sha256_file(part);
  if (got != e.sha256) {
    fs::remove(part);
    fail(ErrorKind::ChecksumMismatch, e.filename + ": downloaded SHA-256 " + got + ", expected " + e.sha256);
  }
  fs::rename(part, file);
  return file;
}

}  // namespace detail

/// Downloads (resumably), verifies and unpacks every archive in the
/// manifest into `dest`, then returns the discovered layout. Verified
/// archives already in the cache cause no network traffic, and archives
/// already extracted with the same checksum are not unpacked again.
inline DatasetLayout fetch_dataset(const Manifest& manifest, const fs::path& dest, const LevelRegistry& registry,
                                   const FetchOptions& opt = {}) {
  if (manifest.entries.empty()) fail(ErrorKind::InvalidConfig, "manifest lists no archives");
  const fs::path cache = opt.cache_dir ? *opt.cache_dir : default_cache_dir(dest);
  fs::create_directories(dest);
  fs::create_directories(cache);
  fs::create_directories(dest / kExtractMarkerDir);

  std::vector<fs::path> archives(manifest.entries.size());
  const std::size_t jobs = static_cast<std::size_t>(std::max(1, opt.jobs));
  for (std::size_t start = 0; start < manifest.entries.size(); start += jobs) {
    const std::size_t stop = std::min(manifest.entries.size(), start + jobs);
    if (jobs == 1) {
      archives[start] = detail::ensure_archive(manifest, manifest.entries[start], cache, opt);
      continue;
    }
    std::vector<std::future<fs::path>> pending;
    for (std::size_t i = start; i < stop; ++i) {
      pending.push_back(std::async(std::launch::async, [&, i] {
        return detail::ensure_archive(manifest, manifest.entries[i], cache, opt);
      }));
    }
    // Wait for all before rethrowing the first failure in manifest order.
    for (auto& p : pending) p.wait();
    for (std::size_t i = start; i < stop; ++i) archives[i] = pending[i - start].get();
  }

  for (std::size_t i = 0; i < archives.size(); ++i) {
    const auto& e = manifest.entries[i];
    const fs::path marker = dest / kExtractMarkerDir / (e.filename + ".sha256");
    std::error_code ec;
    if (fs::is_regular_file(marker, ec) && trim(read_text_file(marker)) == e.sha256) continue;
    std::uint64_t need = 0;
    for (const auto& z : read_zip_directory(archives[i])) need += z.uncompressed_size;
    if (need > detail::space_of(opt.download, dest)) {
      fail(ErrorKind::DiskFull, e.filename + ": extraction needs " + std::to_string(need) + " bytes");
    }
    if (opt.log) opt.log(e.filename + ": extracting");
    extract_zip(archives[i], dest);
    std::ofstream(marker) << e.sha256 << "\n";
  }
  return discover_layout(detail::find_dataset_root(dest), registry, opt.layout);
}

}  // namespace hsc
