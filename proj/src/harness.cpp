#include "twistrank/harness.hpp"

#include <atomic>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "twistrank/errors.hpp"
#include "twistrank/util.hpp"

namespace twistrank {

using ojson = nlohmann::ordered_json;

void SweepConfig::validate() const {
  if (family.places().empty()) throw InvalidArgument("sweep: family not initialised");
  if (N < 1) throw InvalidArgument("sweep: N must be at least 1");
  if (workers < 1) throw InvalidArgument("sweep: workers must be at least 1");
  if (range_lo < 1 || hi() > N || range_lo > hi()) throw InvalidArgument("sweep: invalid b range");
  if (window_filter && N < 16) throw InvalidArgument("sweep: the omega window needs N >= 16");
  if (resume && !output) throw InvalidArgument("sweep: resume requires an output path");
}

std::string SweepConfig::hash() const {
  std::ostringstream s;
  s << family.key() << ";N=" << N << ";window=" << window_filter << ";positive=" << positive_only
    << ";range=" << range_lo << "-" << hi() << ";version=" << kCodeVersion;
  return hex64(fnv1a64(s.str()));
}

// ---------------------------------------------------------------------------

DensityTable empty_table(std::uint64_t N) {
  DensityTable t;
  t.N = N;
  t.omega_hist.N = N;
  if (N >= 16) {
    const auto [lo, hi] = omega_window(N);
    t.omega_hist.window_lo = static_cast<int>(std::floor(lo));
    t.omega_hist.window_hi = static_cast<int>(std::floor(hi));
  }
  return t;
}

void DensityTable::refresh_moments() {
  for (int k = 1; k <= 3; ++k) {
    double s = 0;
    for (const auto& [d, c] : counts) s += static_cast<double>(c) * std::ldexp(1.0, k * d);
    moment_sums[static_cast<std::size_t>(k - 1)] = s;
  }
}

void DensityTable::add(const TwistRecord& r) {
  ++total;
  ++counts[r.selmer_dim];
  auto& split = parity_by_class[r.class_mod_D];
  (r.parity ? split.odd : split.even) += 1;
  ++omega_hist.histogram[r.omega];
  for (int k = 1; k <= 3; ++k) moment_sums[static_cast<std::size_t>(k - 1)] += std::ldexp(1.0, k * r.selmer_dim);
}

void DensityTable::merge(const DensityTable& other) {
  if (N != other.N) throw InvalidArgument("DensityTable::merge: tables for different N");
  total += other.total;
  for (const auto& [d, c] : other.counts) counts[d] += c;
  for (const auto& [cls, s] : other.parity_by_class) {
    parity_by_class[cls].even += s.even;
    parity_by_class[cls].odd += s.odd;
  }
  for (const auto& [w, c] : other.omega_hist.histogram) omega_hist.histogram[w] += c;
  refresh_moments();
}

double DensityTable::C(int d) const {
  if (total == 0) return 0;
  const auto it = counts.find(d);
  return it == counts.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(total);
}

double DensityTable::moment(int k) const {
  if (k < 1 || k > 3) throw InvalidArgument("DensityTable::moment: k must be 1, 2 or 3");
  return total ? moment_sums[static_cast<std::size_t>(k - 1)] / static_cast<double>(total) : 0.0;
}

double DensityTable::even_fraction() const {
  std::uint64_t even = 0;
  for (const auto& [cls, s] : parity_by_class) even += s.even;
  return total ? static_cast<double>(even) / static_cast<double>(total) : 0.0;
}

// ---------------------------------------------------------------------------

std::vector<std::int64_t> eligible_twists(const SweepConfig& config) {
  config.validate();
  const auto list = sieve_squarefree_coprime(config.hi(), config.family.D());
  std::vector<std::int64_t> out;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const auto b = list.value(i);
    if (b < config.range_lo) continue;
    if (config.window_filter && !in_omega_window(static_cast<int>(list.factors(i).size()), config.N)) continue;
    out.push_back(static_cast<std::int64_t>(b));
    if (!config.positive_only) out.push_back(-static_cast<std::int64_t>(b));
  }
  return out;
}

std::string header_line(const SweepConfig& config) {
  ojson h;
  h["type"] = "header";
  h["config_hash"] = config.hash();
  h["family"] = config.family.key();
  h["c"] = config.family.c();
  h["N"] = config.N;
  h["window"] = config.window_filter;
  h["positive_only"] = config.positive_only;
  h["range"] = {config.range_lo, config.hi()};
  h["version"] = std::string(kCodeVersion);
  return h.dump();
}

std::string record_line(const TwistRecord& r) {
  ojson j;
  j["b"] = r.b;
  j["factors"] = r.factors;
  j["omega"] = r.omega;
  j["dim"] = r.selmer_dim;
  j["class"] = r.class_mod_D;
  return j.dump();
}

TwistRecord parse_record(const std::string& line) {
  const auto j = nlohmann::json::parse(line);
  TwistRecord r;
  r.b = j.at("b").get<std::int64_t>();
  r.factors = j.at("factors").get<std::vector<std::uint64_t>>();
  r.omega = j.at("omega").get<int>();
  r.selmer_dim = j.at("dim").get<int>();
  r.parity = r.selmer_dim & 1;
  r.class_mod_D = j.at("class").get<std::uint64_t>();
  if (r.omega != static_cast<int>(r.factors.size()) || r.selmer_dim < 0) {
    throw std::invalid_argument("inconsistent record");
  }
  return r;
}

RecordFile read_record_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  RecordFile rf;
  std::size_t pos = 0;
  bool first = true;
  while (pos < content.size()) {
    const auto nl = content.find('\n', pos);
    const bool complete = nl != std::string::npos;
    const std::string line = content.substr(pos, complete ? nl - pos : std::string::npos);
    const std::size_t next = complete ? nl + 1 : content.size();
    if (first) {
      try {
        if (!complete) throw std::invalid_argument("unterminated header");
        const auto h = nlohmann::json::parse(line);
        if (h.at("type").get<std::string>() != "header") throw std::invalid_argument("missing header");
        rf.header.config_hash = h.at("config_hash").get<std::string>();
        rf.header.family = h.at("family").get<std::string>();
        rf.header.c = h.at("c").get<std::array<std::int64_t, 3>>();
        rf.header.N = h.at("N").get<std::uint64_t>();
        rf.header.window_filter = h.at("window").get<bool>();
        rf.header.positive_only = h.at("positive_only").get<bool>();
        rf.header.range_lo = h.at("range").at(0).get<std::uint64_t>();
        rf.header.range_hi = h.at("range").at(1).get<std::uint64_t>();
        rf.header.version = h.at("version").get<std::string>();
      } catch (const std::exception& e) {
        throw IoError(path.string() + ": bad header: " + e.what());
      }
      first = false;
      rf.valid_bytes = next;
      pos = next;
      continue;
    }
    try {
      if (!complete) throw std::invalid_argument("unterminated record");
      rf.records.push_back(parse_record(line));
      rf.valid_bytes = next;
    } catch (const std::exception& e) {
      if (next < content.size()) throw IoError(path.string() + ": corrupt record before end of file");
      rf.truncated_tail = true;
    }
    pos = next;
  }
  if (first) throw IoError(path.string() + ": empty record file");
  return rf;
}

DensityTable table_from_records(std::uint64_t N, const std::vector<TwistRecord>& records) {
  DensityTable t = empty_table(N);
  for (const auto& r : records) t.add(r);
  t.refresh_moments();
  return t;
}

// ---------------------------------------------------------------------------

DensityTable sweep(const SweepConfig& config) {
  config.validate();
  const auto twists = eligible_twists(config);
  DensityTable table = empty_table(config.N);
  std::size_t start = 0;
  std::ofstream out;

  if (config.output) {
    const auto& path = *config.output;
    bool fresh = true;
    std::error_code ec;
    if (config.resume && std::filesystem::exists(path, ec) && std::filesystem::file_size(path, ec) > 0) {
      RecordFile rf = read_record_file(path);
      if (rf.header.config_hash != config.hash()) {
        throw ConfigMismatch(path.string() + " was written for a different configuration (hash " +
                             rf.header.config_hash + ", expected " + config.hash() + ")");
      }
      if (rf.truncated_tail) {
        std::cerr << "warning: " << path.string() << ": dropping incomplete trailing record\n";
        std::filesystem::resize_file(path, rf.valid_bytes, ec);
        if (ec) throw IoError("cannot truncate " + path.string() + ": " + ec.message());
      }
      if (rf.records.size() > twists.size()) throw IoError(path.string() + ": more records than eligible twists");
      for (std::size_t i = 0; i < rf.records.size(); ++i) {
        if (rf.records[i].b != twists[i]) throw IoError(path.string() + ": records out of sequence");
        table.add(rf.records[i]);
      }
      start = rf.records.size();
      fresh = false;
    }
    out.open(path, fresh ? std::ios::trunc | std::ios::out : std::ios::app | std::ios::out);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    if (fresh) out << header_line(config) << '\n';
    out.flush();
    if (!out) throw IoError("write failed: " + path.string());
  }

  std::size_t end = twists.size();
  if (config.stop_after) end = std::min(end, start + static_cast<std::size_t>(config.stop_after));

  constexpr std::size_t kChunk = 512;
  const std::size_t chunks = (end - start + kChunk - 1) / kChunk;
  std::vector<std::vector<TwistRecord>> results(chunks);
  std::vector<char> ready(chunks, 0);
  std::mutex mu;
  std::condition_variable cv;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> abort{false};
  auto& cache = LocalImageCache::global();

  auto compute_chunk = [&](std::size_t k) {
    std::vector<TwistRecord> recs;
    const std::size_t lo = start + k * kChunk, hi = std::min(end, lo + kChunk);
    recs.reserve(hi - lo);
    for (std::size_t i = lo; i < hi; ++i) recs.push_back(selmer_rank(config.family, twists[i], cache));
    return recs;
  };
  auto emit = [&](std::vector<TwistRecord>& recs) {
    for (const auto& r : recs) {
      table.add(r);
      if (out.is_open()) out << record_line(r) << '\n';
    }
    if (out.is_open()) {
      out.flush();
      if (!out) throw IoError("write failed: " + config.output->string());
    }
    recs.clear();
    recs.shrink_to_fit();
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(config.workers, static_cast<unsigned>(std::max<std::size_t>(chunks, 1))));
  if (workers == 1) {
    for (std::size_t k = 0; k < chunks; ++k) {
      auto recs = compute_chunk(k);
      emit(recs);
    }
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        while (!abort) {
          const std::size_t k = next++;
          if (k >= chunks) break;
          try {
            auto recs = compute_chunk(k);
            std::lock_guard lock(mu);
            results[k] = std::move(recs);
            ready[k] = 1;
          } catch (...) {
            std::lock_guard lock(mu);
            if (!failure) failure = std::current_exception();
            abort = true;
          }
          cv.notify_all();
        }
      });
    }
    try {
      // Records leave in ascending order so the file does not depend on scheduling.
      for (std::size_t k = 0; k < chunks; ++k) {
        std::vector<TwistRecord> recs;
        {
          std::unique_lock lock(mu);
          cv.wait(lock, [&] { return ready[k] || failure; });
          if (!ready[k]) break;
          recs = std::move(results[k]);
        }
        emit(recs);
      }
    } catch (...) {
      abort = true;
      for (auto& t : pool) t.join();
      throw;
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }
  table.refresh_moments();
  return table;
}

DensityTable resume(SweepConfig config) {
  config.resume = true;
  return sweep(config);
}

// ---------------------------------------------------------------------------

ReportFormat parse_report_format(const std::string& name) {
  if (name == "text") return ReportFormat::Text;
  if (name == "csv") return ReportFormat::Csv;
  if (name == "plotdata") return ReportFormat::PlotData;
  throw InvalidArgument("unknown report format: " + name);
}

namespace {

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

int max_dim(const DensityTable& t) {
  int top = 6;
  if (!t.counts.empty()) top = std::max(top, t.counts.rbegin()->first);
  return top;
}

}  // namespace

std::string report(const DensityTable& table, const AlphaTable& alphas, ReportFormat format) {
  if (table.total == 0) throw InvalidArgument("report: empty table");
  const int top = max_dim(table);
  std::ostringstream o;
  switch (format) {
    case ReportFormat::Text: {
      o << "twists: " << table.total << "  (b <= " << table.N << ")\n\n";
      o << fmt("%4s %10s %10s %10s %10s\n", "d", "count", "C_d", "alpha_d", "diff");
      for (int d = 2; d <= top; ++d) {
        const auto it = table.counts.find(d);
        const std::uint64_t c = it == table.counts.end() ? 0 : it->second;
        const double a = static_cast<double>(alphas.at(d));
        o << fmt("%4d %10llu %10.6f %10.6f %+10.6f\n", d, static_cast<unsigned long long>(c), table.C(d), a,
                 table.C(d) - a);
      }
      o << "\nmoments E[2^(k dim)] vs F(2^k)\n";
      for (int k = 1; k <= 3; ++k) {
        const double F = static_cast<double>(F_pow2(k));
        o << fmt("  k=%d %14.4f %14.4f %+10.4f\n", k, table.moment(k), F, table.moment(k) - F);
      }
      o << "\nparity by class mod D (even, odd, even fraction)\n";
      for (const auto& [cls, s] : table.parity_by_class) {
        const double f = static_cast<double>(s.even) / static_cast<double>(s.even + s.odd);
        o << fmt("  %8llu %10llu %10llu %8.4f\n", static_cast<unsigned long long>(cls),
                 static_cast<unsigned long long>(s.even), static_cast<unsigned long long>(s.odd), f);
      }
      o << fmt("  overall even fraction %.6f (vs 0.5, diff %+.6f)\n", table.even_fraction(),
               table.even_fraction() - 0.5);
      o << "\nomega histogram";
      if (table.N >= 16) {
        const auto [lo, hi] = omega_window(table.N);
        o << fmt(" (window %.3f < omega < %.3f)", lo, hi);
      }
      o << "\n";
      for (const auto& [w, c] : table.omega_hist.histogram) {
        o << fmt("  %3d %10llu\n", w, static_cast<unsigned long long>(c));
      }
      break;
    }
    case ReportFormat::Csv: {
      o << "section,key,value,alpha_or_target,fraction,diff\n";
      o << "meta,N," << table.N << ",,,\n";
      o << "meta,total," << table.total << ",,,\n";
      o << "meta,window," << table.omega_hist.window_lo << "," << table.omega_hist.window_hi << ",,\n";
      for (int d = 0; d <= top; ++d) {
        const auto it = table.counts.find(d);
        const std::uint64_t c = it == table.counts.end() ? 0 : it->second;
        const double a = static_cast<double>(alphas.at(d));
        o << "count," << d << "," << c << fmt(",%.17g,%.17g,%.17g\n", a, table.C(d), table.C(d) - a);
      }
      for (int k = 1; k <= 3; ++k) {
        const double F = static_cast<double>(F_pow2(k));
        o << "moment," << k << fmt(",%.17g,%.17g,%.17g,%.17g\n", table.moment_sums[static_cast<std::size_t>(k - 1)], F,
                                   table.moment(k), table.moment(k) - F);
      }
      for (const auto& [cls, s] : table.parity_by_class) {
        o << "parity," << cls << "," << s.even << "," << s.odd << ",,\n";
      }
      for (const auto& [w, c] : table.omega_hist.histogram) o << "omega," << w << "," << c << ",,,\n";
      break;
    }
    case ReportFormat::PlotData: {
      o << "# series C_d\n# x y\n";
      for (int d = 2; d <= top; ++d) o << d << " " << fmt("%.10g", table.C(d)) << "\n";
      o << "\n\n# series alpha_d\n# x y\n";
      for (int d = 2; d <= top; ++d) o << d << " " << fmt("%.10g", static_cast<double>(alphas.at(d))) << "\n";
      o << "\n\n# series moment_ratio (empirical / F(2^k))\n# x y\n";
      for (int k = 1; k <= 3; ++k) {
        o << k << " " << fmt("%.10g", table.moment(k) / static_cast<double>(F_pow2(k))) << "\n";
      }
      o << "\n\n# series omega_hist\n# x y\n";
      for (const auto& [w, c] : table.omega_hist.histogram) o << w << " " << c << "\n";
      break;
    }
  }
  return o.str();
}

DensityTable parse_csv_report(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  DensityTable t;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    while (f.size() < 6) f.emplace_back();
    const auto& sec = f[0];
    try {
      if (sec == "meta" && f[1] == "N") {
        t.N = std::stoull(f[2]);
        t.omega_hist.N = t.N;
      } else if (sec == "meta" && f[1] == "total") {
        t.total = std::stoull(f[2]);
      } else if (sec == "meta" && f[1] == "window") {
        t.omega_hist.window_lo = std::stoi(f[2]);
        t.omega_hist.window_hi = std::stoi(f[3]);
      } else if (sec == "count") {
        const auto c = std::stoull(f[2]);
        if (c) t.counts[std::stoi(f[1])] = c;
      } else if (sec == "moment") {
        t.moment_sums[static_cast<std::size_t>(std::stoi(f[1]) - 1)] = std::stod(f[2]);
      } else if (sec == "parity") {
        t.parity_by_class[std::stoull(f[1])] = ParitySplit{std::stoull(f[2]), std::stoull(f[3])};
      } else if (sec == "omega") {
        t.omega_hist.histogram[std::stoi(f[1])] = std::stoull(f[2]);
      } else {
        throw std::invalid_argument("unknown section");
      }
    } catch (const std::exception& e) {
      throw InvalidArgument("parse_csv_report: bad line '" + line + "': " + e.what());
    }
  }
  return t;
}

}  // namespace twistrank
