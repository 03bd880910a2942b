#include "ahem/serialize.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace ahem {

namespace {

using nlohmann::json;

std::uint64_t to_little(std::uint64_t x) {
  if constexpr (std::endian::native == std::endian::little) return x;
  return __builtin_bswap64(x);
}

std::uint32_t crc32_of(std::string_view bytes) {
  uLong c = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks
  std::size_t off = 0;
  while (off < bytes.size()) {
    const std::size_t len = std::min<std::size_t>(bytes.size() - off, 1u << 30);
    c = crc32(c, reinterpret_cast<const Bytef*>(bytes.data() + off), static_cast<uInt>(len));
    off += len;
  }
  return static_cast<std::uint32_t>(c);
}

const char* kind_name(TensorKind k) {
  switch (k) {
    case TensorKind::scalar:
      return "scalar";
    case TensorKind::covector:
      return "covector";
    case TensorKind::sym2:
      return "sym2";
  }
  return "?";
}

TensorKind kind_from(const std::string& s) {
  if (s == "scalar") return TensorKind::scalar;
  if (s == "covector") return TensorKind::covector;
  if (s == "sym2") return TensorKind::sym2;
  throw FormatError("unknown field kind '" + s + "'");
}

}  // namespace

std::string serialize_state(const GridPtr& grid, const std::vector<Field>& fields, const json& metadata) {
  std::string payload;
  json descr = json::array();
  for (const auto& f : fields) {
    if (f.grid.get() != grid.get()) throw ConfigError("all fields must share one grid");
    if (!f.all_finite()) throw NumericalError("field '" + f.name + "' has non-finite values");
    descr.push_back({{"name", f.name},
                     {"rank", f.rank()},
                     {"kind", kind_name(f.kind)},
                     {"components", component_names(f.kind, grid->chart())},
                     {"weight", f.weight}});
    for (const auto& c : f.comps) {
      for (int q = 0; q < c.size(); ++q) {
        const std::uint64_t bits = to_little(std::bit_cast<std::uint64_t>(c(q)));
        char buf[8];
        std::memcpy(buf, &bits, 8);
        payload.append(buf, 8);
      }
    }
  }
  const Chart& ch = grid->chart();
  json header = {{"schema", "ahf"},
                 {"version", kAhfVersion},
                 {"chart",
                  {{"n", ch.n},
                   {"symmetry", ch.symmetry == Symmetry::radial ? "radial" : "axisymmetric"},
                   {"rho_max", ch.rho_max}}},
                 {"n", ch.n},
                 {"N_rho", grid->n_rho()},
                 {"N_theta", grid->n_theta()},
                 {"fields", descr},
                 {"payload_bytes", payload.size()},
                 {"crc32", crc32_of(payload)},
                 {"metadata", metadata}};
  return header.dump() + "\n" + payload;
}

StateBundle deserialize_state(std::string_view bytes) {
  const auto nl = bytes.find('\n');
  if (nl == std::string_view::npos) throw ChecksumError("stream truncated inside the header");
  json header;
  try {
    header = json::parse(bytes.substr(0, nl));
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed header: ") + e.what());
  }
  if (header.value("schema", "") != "ahf") throw FormatError("not an .ahf stream");
  const int version = header.value("version", -1);
  if (version != kAhfVersion)
    throw VersionError("unsupported .ahf version " + std::to_string(version) + " (expected " +
                       std::to_string(kAhfVersion) + ")");

  const std::string_view payload = bytes.substr(nl + 1);
  const auto expected_bytes = header.at("payload_bytes").get<std::size_t>();
  if (payload.size() != expected_bytes || crc32_of(payload) != header.at("crc32").get<std::uint32_t>())
    throw ChecksumError("payload checksum mismatch");

  Chart chart;
  chart.n = header.at("chart").at("n").get<int>();
  chart.symmetry = header.at("chart").at("symmetry").get<std::string>() == "radial" ? Symmetry::radial
                                                                                    : Symmetry::axisymmetric;
  chart.rho_max = header.at("chart").at("rho_max").get<double>();
  StateBundle out;
  out.grid = Grid::build(chart, header.at("N_rho").get<int>(), header.at("N_theta").get<int>());
  out.metadata = header.value("metadata", json::object());

  std::size_t off = 0;
  const int np = out.grid->size();
  for (const auto& d : header.at("fields")) {
    Field f = Field::zeros(out.grid, kind_from(d.at("kind").get<std::string>()), d.at("name").get<std::string>(),
                           d.at("weight").get<double>());
    for (auto& c : f.comps) {
      if (off + 8ull * np > payload.size()) throw ChecksumError("payload shorter than declared fields");
      for (int q = 0; q < np; ++q) {
        std::uint64_t bits;
        std::memcpy(&bits, payload.data() + off, 8);
        c(q) = std::bit_cast<double>(to_little(bits));
        off += 8;
      }
    }
    out.fields.push_back(std::move(f));
  }
  if (off != payload.size()) throw FormatError("payload longer than declared fields");
  return out;
}

void write_state_file(const std::filesystem::path& path, const GridPtr& grid, const std::vector<Field>& fields,
                      const json& metadata) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write " + path.string());
  const std::string s = serialize_state(grid, fields, metadata);
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

StateBundle read_state_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot read " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return deserialize_state(ss.str());
}

}  // namespace ahem
