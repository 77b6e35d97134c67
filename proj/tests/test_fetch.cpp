#include <gtest/gtest.h>

#include <zlib.h>

#include "fetch.hpp"

using namespace btsbm;

namespace {

void put16(std::string& s, std::uint16_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>(v >> 8));
}

void put32(std::string& s, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) s.push_back(static_cast<char>((v >> (8 * k)) & 0xff));
}

std::string deflate_raw(const std::string& in) {
  z_stream zs{};
  deflateInit2(&zs, 9, Z_DEFLATED, -MAX_WBITS, 8, Z_DEFAULT_STRATEGY);
  std::string out(deflateBound(&zs, static_cast<uLong>(in.size())), '\0');
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(in.data()));
  zs.avail_in = static_cast<uInt>(in.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  deflate(&zs, Z_FINISH);
  out.resize(zs.total_out);
  deflateEnd(&zs);
  return out;
}

struct Member {
  std::string name, data;
  bool compress;
};

/// Minimal zip writer: local headers, central directory, end record.
std::string make_zip(const std::vector<Member>& members) {
  std::string zip, central;
  for (const auto& m : members) {
    const std::string payload = m.compress ? deflate_raw(m.data) : m.data;
    const auto crc = static_cast<std::uint32_t>(crc32(0, reinterpret_cast<const Bytef*>(m.data.data()),
                                                      static_cast<uInt>(m.data.size())));
    const auto offset = static_cast<std::uint32_t>(zip.size());
    const std::uint16_t method = m.compress ? 8 : 0;
    put32(zip, 0x04034b50);
    put16(zip, 20);
    put16(zip, 0);
    put16(zip, method);
    put32(zip, 0);
    put32(zip, crc);
    put32(zip, static_cast<std::uint32_t>(payload.size()));
    put32(zip, static_cast<std::uint32_t>(m.data.size()));
    put16(zip, static_cast<std::uint16_t>(m.name.size()));
    put16(zip, 0);
    zip += m.name + payload;

    put32(central, 0x02014b50);
    put16(central, 20);
    put16(central, 20);
    put16(central, 0);
    put16(central, method);
    put32(central, 0);
    put32(central, crc);
    put32(central, static_cast<std::uint32_t>(payload.size()));
    put32(central, static_cast<std::uint32_t>(m.data.size()));
    put16(central, static_cast<std::uint16_t>(m.name.size()));
    put16(central, 0);
    put16(central, 0);
    put16(central, 0);
    put16(central, 0);
    put32(central, 0);
    put32(central, offset);
    central += m.name;
  }
  const auto cd_offset = static_cast<std::uint32_t>(zip.size());
  zip += central;
  put32(zip, 0x06054b50);
  put16(zip, 0);
  put16(zip, 0);
  put16(zip, static_cast<std::uint16_t>(members.size()));
  put16(zip, static_cast<std::uint16_t>(members.size()));
  put32(zip, static_cast<std::uint32_t>(central.size()));
  put32(zip, cd_offset);
  put16(zip, 0);
  return zip;
}

const char* kGml = R"(graph [
  node [ id 1 value "l" ]
  node [ id 2 value "l" ]
  node [ id 3 value "c" ]
  node [ id 4 value "c" ]
  node [ id 5 value "n" ]
  node [ id 6 value "n" ]
  edge [ source 1 target 2 ]
  edge [ source 2 target 3 ]
  edge [ source 3 target 4 ]
  edge [ source 5 target 6 ]
])";

}  // namespace

TEST(Fetch, Sha256KnownVectors) {
  EXPECT_EQ(fetch::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(fetch::sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(Fetch, UnzipStoredAndDeflated) {
  const std::string text(5000, 'x');
  const auto zip = make_zip({{"readme.txt", "hello", false}, {"net.gml", text + kGml, true}});
  EXPECT_TRUE(fetch::is_zip(zip));
  EXPECT_FALSE(fetch::is_zip(kGml));
  EXPECT_EQ(fetch::unzip_member(zip, "readme.txt"), "hello");
  EXPECT_EQ(fetch::unzip_member(zip, "net.gml"), text + kGml);
  EXPECT_THROW(fetch::unzip_member(zip, "missing.gml"), DataError);
  EXPECT_THROW(fetch::unzip_member(zip.substr(0, zip.size() / 2), "net.gml"), DataError);
  EXPECT_THROW(fetch::unzip_member("PK", "x"), DataError);
}

TEST(Fetch, ConvertLabelsAndLargestComponent) {
  fetch::Dataset d{"toy", "", "net.gml", true, false, "", ""};
  const auto all = fetch::convert(d, kGml);
  EXPECT_EQ(all.graph.n(), 6u);
  EXPECT_EQ(all.labels, (std::vector<std::string>{"l", "l", "c", "c", "n", "n"}));
  d.largest_component = true;
  const auto lcc = fetch::convert(d, kGml);
  EXPECT_EQ(lcc.graph.n(), 4u);
  EXPECT_EQ(lcc.graph.num_edges(), 3u);
  EXPECT_EQ(lcc.labels, (std::vector<std::string>{"l", "l", "c", "c"}));
  d.labels_from_value = false;
  EXPECT_TRUE(fetch::convert(d, kGml).labels.empty());
}

TEST(Fetch, Registry) {
  EXPECT_EQ(fetch::find("polblogs").largest_component, true);
  EXPECT_TRUE(fetch::find("football").labels_from_value);
  EXPECT_THROW(fetch::find("nosuch"), InvalidArgument);
}
