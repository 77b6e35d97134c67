#pragma once

// Download helper for the public benchmark networks. Payloads are GML,
// either plain or inside a zip archive; they are converted to the edge-list
// and labels formats read by the rest of the toolkit.

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <curl/curl.h>
#include <openssl/evp.h>
#include <zlib.h>

#include "btsbm/error.hpp"
#include "btsbm/gml.hpp"
#include "btsbm/graph.hpp"
#include "btsbm/io.hpp"

namespace btsbm::fetch {

struct Dataset {
  std::string name;
  std::string url;
  std::string member;             // file inside the zip archive; empty for plain payloads
  bool labels_from_value = false; // ground truth is the GML "value" attribute
  bool largest_component = false;
  std::string sha256;             // pinned payload checksum; empty when unpinned
  std::string note;
};

inline const std::vector<Dataset>& registry() {
  static const std::vector<Dataset> datasets = {
      {"karate", "http://www-personal.umich.edu/~mejn/netdata/karate.zip", "karate.gml", false, false, "",
       "faction labels are not part of the GML file"},
      {"dolphins", "http://www-personal.umich.edu/~mejn/netdata/dolphins.zip", "dolphins.gml", false, false, "",
       "split labels are not part of the GML file"},
      {"football", "http://www-personal.umich.edu/~mejn/netdata/football.zip", "football.gml", true, false, "",
       "labels: conference"},
      {"polbooks", "http://www-personal.umich.edu/~mejn/netdata/polbooks.zip", "polbooks.gml", true, false, "",
       "labels: political leaning"},
      {"polblogs", "http://www-personal.umich.edu/~mejn/netdata/polblogs.zip", "polblogs.gml", true, true, "",
       "labels: political leaning; restricted to the largest connected component"},
  };
  return datasets;
}

inline const Dataset& find(const std::string& name) {
  for (const auto& d : registry()) {
    if (d.name == name) return d;
  }
  std::string known;
  for (const auto& d : registry()) known += (known.empty() ? "" : ", ") + d.name;
  throw InvalidArgument("unknown dataset \"" + name + "\" (known: " + known + ")");
}

inline std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 computation failed");
  }
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return hex.str();
}

inline std::string download(const std::string& url) {
  CURL* curl = curl_easy_init();
  if (!curl) throw DataError("cannot initialise libcurl");
  std::string body;
  auto sink = +[](char* ptr, std::size_t size, std::size_t n, void* user) -> std::size_t {
    static_cast<std::string*>(user)->append(ptr, size * n);
    return size * n;
  };
  curl_easy_setopt(curl, CURLOPT_URL, url.c_str());
  curl_easy_setopt(curl, CURLOPT_FOLLOWLOCATION, 1L);
  curl_easy_setopt(curl, CURLOPT_FAILONERROR, 1L);
  curl_easy_setopt(curl, CURLOPT_CONNECTTIMEOUT, 20L);
  curl_easy_setopt(curl, CURLOPT_WRITEFUNCTION, sink);
  curl_easy_setopt(curl, CURLOPT_WRITEDATA, &body);
  const CURLcode rc = curl_easy_perform(curl);
  curl_easy_cleanup(curl);
  if (rc != CURLE_OK) throw DataError("download of " + url + " failed: " + curl_easy_strerror(rc));
  return body;
}

namespace detail {

inline std::uint32_t le32(const std::string& s, std::size_t at) {
  if (at + 4 > s.size()) throw DataError("truncated zip archive");
  std::uint32_t v = 0;
  for (int k = 3; k >= 0; --k) v = (v << 8) | static_cast<unsigned char>(s[at + static_cast<std::size_t>(k)]);
  return v;
}

inline std::uint16_t le16(const std::string& s, std::size_t at) {
  if (at + 2 > s.size()) throw DataError("truncated zip archive");
  return static_cast<std::uint16_t>(static_cast<unsigned char>(s[at]) |
                                    (static_cast<unsigned char>(s[at + 1]) << 8));
}

inline std::string inflate_raw(const std::string& in, std::size_t expected) {
  std::string out(expected, '\0');
  z_stream zs{};
  if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) throw DataError("zlib initialisation failed");
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(in.data()));
  zs.avail_in = static_cast<uInt>(in.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = inflate(&zs, Z_FINISH);
  inflateEnd(&zs);
  if (rc != Z_STREAM_END || zs.total_out != expected) throw DataError("corrupt deflate stream in zip archive");
  return out;
}

}  // namespace detail

inline bool is_zip(const std::string& data) { return data.size() >= 4 && data.compare(0, 4, "PK\x03\x04") == 0; }

/// Extracts one member (stored or deflated) using the central directory.
inline std::string unzip_member(const std::string& zip, const std::string& member) {
  using detail::le16;
  using detail::le32;
  if (zip.size() < 22) throw DataError("zip archive too short");
  std::size_t eocd = std::string::npos;
  for (std::size_t i = zip.size() - 22 + 1; i-- > 0;) {
    if (le32(zip, i) == 0x06054b50) {
      eocd = i;
      break;
    }
  }
  if (eocd == std::string::npos) throw DataError("zip end-of-directory record not found");
  const std::size_t count = le16(zip, eocd + 10);
  std::size_t at = le32(zip, eocd + 16);
  for (std::size_t k = 0; k < count; ++k) {
    if (le32(zip, at) != 0x02014b50) throw DataError("malformed zip central directory");
    const auto method = le16(zip, at + 10);
    const auto csize = le32(zip, at + 20), usize = le32(zip, at + 24);
    const auto name_len = le16(zip, at + 28), extra_len = le16(zip, at + 30), comment_len = le16(zip, at + 32);
    const auto local = le32(zip, at + 42);
    const std::string name = zip.substr(at + 46, name_len);
    at += 46u + name_len + extra_len + comment_len;
    if (name != member) continue;
    const std::size_t data = local + 30u + le16(zip, local + 26) + le16(zip, local + 28);
    if (data + csize > zip.size()) throw DataError("truncated zip member " + member);
    const std::string payload = zip.substr(data, csize);
    if (method == 0) return payload;
    if (method == 8) return detail::inflate_raw(payload, usize);
    throw DataError("unsupported zip compression method " + std::to_string(method));
  }
  throw DataError("zip archive has no member " + member);
}

struct Converted {
  Graph graph;
  std::vector<std::string> labels;  // empty when the payload carries none
};

inline Converted convert(const Dataset& d, const std::string& gml_text) {
  GmlNetwork net = parse_gml(gml_text);
  std::vector<std::size_t> keep(net.graph.n());
  std::iota(keep.begin(), keep.end(), std::size_t{0});
  if (d.largest_component) {
    auto comps = connected_components(net.graph);
    std::size_t best = 0;
    for (std::size_t c = 1; c < comps.size(); ++c) {
      if (comps[c].size() > comps[best].size()) best = c;
    }
    keep = comps[best];
  }
  Converted out;
  out.graph = induced_subgraph(net.graph, keep);
  if (d.labels_from_value) {
    for (auto v : keep) {
      if (!net.values[v]) throw DataError(d.name + ": node " + std::to_string(net.ids[v]) + " has no value");
      out.labels.push_back(*net.values[v]);
    }
  }
  return out;
}

/// Downloads, verifies and converts one dataset into dest/<name>.edges and,
/// when available, dest/<name>.labels. Returns the payload checksum.
inline std::string fetch_dataset(const Dataset& d, const std::filesystem::path& dest, std::ostream& log) {
  const std::string payload = download(d.url);
  const std::string digest = sha256_hex(payload);
  if (!d.sha256.empty() && digest != d.sha256) {
    throw DataError(d.name + ": checksum mismatch (expected " + d.sha256 + ", got " + digest + ")");
  }
  const std::string gml = is_zip(payload) ? unzip_member(payload, d.member) : payload;
  const Converted c = convert(d, gml);
  std::filesystem::create_directories(dest);
  {
    std::ofstream out(dest / (d.name + ".edges"), std::ios::binary);
    if (!out) throw DataError("cannot write into " + dest.string());
    write_edge_list(out, c.graph);
  }
  if (!c.labels.empty()) {
    std::ofstream out(dest / (d.name + ".labels"), std::ios::binary);
    for (std::size_t v = 0; v < c.labels.size(); ++v) out << v << ' ' << c.labels[v] << '\n';
  }
  log << d.name << ": n=" << c.graph.n() << " edges=" << c.graph.num_edges() << " sha256=" << digest
      << (d.sha256.empty() ? " (unpinned)" : " (verified)") << '\n';
  if (!d.labels_from_value) log << d.name << ": " << d.note << '\n';
  return digest;
}

}  // namespace btsbm::fetch
