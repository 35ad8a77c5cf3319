#include "eigenprior/stats_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "eigenprior/errors.hpp"
#include "json.hpp"

namespace eigenprior {

namespace {

constexpr std::string_view kMagic = "eigenprior-stats";
constexpr std::string_view kVersion = "v1";

[[noreturn]] void bad_line(std::size_t line_no, const std::string& what) {
  throw InputError("stats line " + std::to_string(line_no) + ": " + what);
}

std::vector<std::uint64_t> parse_fields(const std::string& line, std::size_t expected,
                                        std::size_t line_no) {
  std::vector<std::uint64_t> out;
  out.reserve(expected);
  const char* p = line.data();
  const char* end = line.data() + line.size();
  while (true) {
    std::uint64_t v = 0;
    const auto [next, ec] = std::from_chars(p, end, v);
    if (ec != std::errc{} || next == p) bad_line(line_no, "expected unsigned integer");
    out.push_back(v);
    p = next;
    if (p == end) break;
    if (*p != '\t') bad_line(line_no, "expected TAB separator");
    ++p;
  }
  if (out.size() != expected) bad_line(line_no, "expected " + std::to_string(expected) + " fields");
  return out;
}

}  // namespace

void write_stats(std::ostream& out, const CooccurrenceStats& stats) {
  out << kMagic << ' ' << kVersion << ' ' << stats.vocab_size() << ' ' << stats.window() << ' '
      << stats.example_count() << '\n';
  for (const auto& e : stats.sorted_entries()) {
    out << e.row << '\t' << e.slot << '\t' << e.counts.unit << '\t' << e.counts.prior << '\n';
  }
  out << "D1\n";
  for (std::size_t i = 0; i < stats.d1().size(); ++i) {
    if (stats.d1()[i] != 0) out << i << '\t' << stats.d1()[i] << '\n';
  }
  out << "D2\n";
  for (std::size_t i = 0; i < stats.d2().size(); ++i) {
    if (stats.d2()[i] != 0) out << i << '\t' << stats.d2()[i] << '\n';
  }
}

CooccurrenceStats read_stats(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw InputError("stats file is empty");
  std::istringstream header(line);
  std::string magic, version;
  std::size_t vocab_size = 0, window = 0;
  std::uint64_t n_examples = 0;
  if (!(header >> magic >> version >> vocab_size >> window >> n_examples) || magic != kMagic) {
    bad_line(line_no, "bad header, expected 'eigenprior-stats v1 |H| k n_examples'");
  }
  if (version != kVersion) bad_line(line_no, "unsupported version '" + version + "'");
  if (window == 0) bad_line(line_no, "k must be >= 1");

  CooccurrenceStats stats(vocab_size, window);
  std::vector<std::uint64_t> d1(vocab_size, 0), d2(stats.context_dim(), 0);

  enum class Section { kEntries, kD1, kD2 } section = Section::kEntries;
  std::uint64_t prev_row = 0, prev_slot = 0, prev_index = 0;
  bool have_prev = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line == "D1" || line == "D2") {
      const auto next = line == "D1" ? Section::kD1 : Section::kD2;
      if (static_cast<int>(next) != static_cast<int>(section) + 1) {
        bad_line(line_no, "unexpected section marker " + line);
      }
      section = next;
      have_prev = false;
      continue;
    }
    if (section == Section::kEntries) {
      const auto f = parse_fields(line, 4, line_no);
      if (f[0] >= vocab_size || f[1] >= stats.context_dim()) bad_line(line_no, "index out of range");
      if (have_prev && !(f[0] > prev_row || (f[0] == prev_row && f[1] > prev_slot))) {
        bad_line(line_no, "entries not strictly sorted by (r, s)");
      }
      if (f[2] == 0 && f[3] == 0) bad_line(line_no, "zero entry");
      stats.add_entry(static_cast<WordId>(f[0]), f[1], {f[2], f[3]});
      prev_row = f[0];
      prev_slot = f[1];
    } else {
      auto& diag = section == Section::kD1 ? d1 : d2;
      const auto f = parse_fields(line, 2, line_no);
      if (f[0] >= diag.size()) bad_line(line_no, "index out of range");
      if (have_prev && f[0] <= prev_index) bad_line(line_no, "diagonal not strictly sorted");
      if (f[1] == 0) bad_line(line_no, "zero diagonal entry");
      diag[f[0]] = f[1];
      prev_index = f[0];
    }
    have_prev = true;
  }
  if (section != Section::kD2) throw InputError("stats file truncated: missing D1/D2 sections");
  stats.set_diagonals(std::move(d1), std::move(d2), n_examples);
  stats.validate();
  return stats;
}

void save_stats(const std::string& path, const CooccurrenceStats& stats) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open for writing: " + path);
  write_stats(out, stats);
  if (!out) throw InputError("write failed: " + path);
}

CooccurrenceStats load_stats(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open stats file: " + path);
  return read_stats(in);
}

std::string StatsMeta::fingerprint() const {
  Fnv1a64 h;
  for (const auto& f : corpus) {
    h.update(f.fnv1a64);
    h.update("\n");
  }
  return hex64(h.digest());
}

std::string stats_meta_path(const std::string& stats_path) { return stats_path + ".meta.json"; }

void save_stats_meta(const std::string& path, const StatsMeta& meta) {
  nlohmann::ordered_json j;
  j["format"] = "eigenprior-stats-meta v1";
  j["N"] = meta.window_n;
  j["T"] = meta.chunk_len;
  j["oov"] = meta.oov;
  j["graph_fnv1a64"] = meta.graph_fnv1a64;
  j["corpus_fingerprint"] = meta.fingerprint();
  auto files = nlohmann::ordered_json::array();
  for (const auto& f : meta.corpus) files.push_back({{"name", f.name}, {"fnv1a64", f.fnv1a64}});
  j["corpus"] = files;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open for writing: " + path);
  out << j.dump(2) << '\n';
}

StatsMeta load_stats_meta(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open stats meta: " + path);
  try {
    const auto j = nlohmann::json::parse(in);
    StatsMeta meta;
    meta.window_n = j.at("N").get<std::size_t>();
    meta.chunk_len = j.at("T").get<std::size_t>();
    meta.oov = j.at("oov").get<std::string>();
    meta.graph_fnv1a64 = j.value("graph_fnv1a64", std::string{});
    for (const auto& f : j.at("corpus")) {
      meta.corpus.push_back({f.at("name").get<std::string>(), f.at("fnv1a64").get<std::string>()});
    }
    return meta;
  } catch (const nlohmann::json::exception& e) {
    throw InputError("bad stats meta " + path + ": " + e.what());
  }
}

std::string file_fingerprint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open: " + path);
  Fnv1a64 h;
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    h.update(std::string_view(buf.data(), static_cast<std::size_t>(in.gcount())));
  }
  return hex64(h.digest());
}

}  // namespace eigenprior
