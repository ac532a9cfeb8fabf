#include "csv_io.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <fstream>

#include "common.hpp"

namespace selfonn {

namespace {

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

// parses a non-negative integer, returns the first unconsumed character
const char* parse_index(const char* s, const std::string& path, std::size_t line_no,
                        std::size_t& out) {
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s, &end, 10);
  if (end == s || errno == ERANGE)
    throw Error::data(strfmt("%s:%zu: bad sample index", path.c_str(), line_no));
  out = static_cast<std::size_t>(v);
  return end;
}

}  // namespace

Signal read_record_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error::data(strfmt("cannot open record file '%s'", path.c_str()));

  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line))
    throw Error::data(strfmt("%s: empty file", path.c_str()));
  strip_cr(line);
  if (line != "sample_index,value")
    throw Error::data(strfmt("%s:1: expected header 'sample_index,value', got '%s'",
                             path.c_str(), line.c_str()));

  Signal samples;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    std::size_t idx = 0;
    const char* rest = parse_index(line.c_str(), path, line_no, idx);
    if (*rest != ',')
      throw Error::data(strfmt("%s:%zu: expected 'index,value', got '%s'",
                               path.c_str(), line_no, line.c_str()));
    if (idx != samples.size())
      throw Error::data(strfmt("%s:%zu: sample index %zu out of order (expected %zu)",
                               path.c_str(), line_no, idx, samples.size()));
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(rest + 1, &end);
    // ERANGE with a tiny result is an underflowed subnormal, still usable
    if (end == rest + 1 || *end != '\0' ||
        (errno == ERANGE && (v == HUGE_VAL || v == -HUGE_VAL)))
      throw Error::data(strfmt("%s:%zu: bad sample value '%s'", path.c_str(),
                               line_no, rest + 1));
    samples.push_back(v);
  }
  if (samples.empty())
    throw Error::data(strfmt("%s: no samples", path.c_str()));
  return samples;
}

void write_record_csv(const std::string& path, const Signal& samples) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error::data(strfmt("cannot open '%s' for writing", path.c_str()));
  out << "sample_index,value\n";
  for (std::size_t i = 0; i < samples.size(); ++i)
    out << i << ',' << strfmt("%.17g", samples[i]) << '\n';
  if (!out) throw Error::data(strfmt("failed writing '%s'", path.c_str()));
}

std::vector<std::pair<std::size_t, char>> read_annotation_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error::data(strfmt("cannot open annotation file '%s'", path.c_str()));

  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line))
    throw Error::data(strfmt("%s: empty file", path.c_str()));
  strip_cr(line);
  if (line != "sample_index,symbol")
    throw Error::data(strfmt("%s:1: expected header 'sample_index,symbol', got '%s'",
                             path.c_str(), line.c_str()));

  std::vector<std::pair<std::size_t, char>> anns;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    std::size_t idx = 0;
    const char* rest = parse_index(line.c_str(), path, line_no, idx);
    if (rest[0] != ',' || rest[1] == '\0' || rest[2] != '\0')
      throw Error::data(strfmt("%s:%zu: expected 'index,symbol' with a one-character"
                               " symbol, got '%s'",
                               path.c_str(), line_no, line.c_str()));
    anns.emplace_back(idx, rest[1]);
  }

  if (!std::is_sorted(anns.begin(), anns.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; })) {
    log_warn(strfmt("%s: annotations out of order, sorting", path.c_str()));
    std::stable_sort(anns.begin(), anns.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
  }
  return anns;
}

void write_annotation_csv(const std::string& path,
                          const std::vector<std::pair<std::size_t, char>>& annotations) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error::data(strfmt("cannot open '%s' for writing", path.c_str()));
  out << "sample_index,symbol\n";
  for (const auto& [idx, sym] : annotations) out << idx << ',' << sym << '\n';
  if (!out) throw Error::data(strfmt("failed writing '%s'", path.c_str()));
}

EcgRecord ingest_csv(const std::string& record_path,
                     const std::string& annotation_path,
                     const std::string& patient_id, double sampling_rate) {
  if (!(sampling_rate > 0.0))
    throw Error::config(strfmt("sampling rate %g must be positive", sampling_rate));
  EcgRecord rec;
  rec.patient_id = patient_id;
  rec.sampling_rate = sampling_rate;
  rec.samples = read_record_csv(record_path);
  rec.annotations = read_annotation_csv(annotation_path);
  for (const auto& [idx, sym] : rec.annotations) {
    if (idx >= rec.samples.size())
      throw Error::data(strfmt("%s: annotation at sample %zu beyond record length %zu",
                               annotation_path.c_str(), idx, rec.samples.size()));
  }
  return rec;
}

}  // namespace selfonn
