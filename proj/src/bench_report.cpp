#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "wuuct/bench.hpp"
#include "wuuct/errors.hpp"

namespace wuuct {

namespace {

std::string fmt(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

double parse_double(const std::string& s) {
  if (s == "nan") return std::nan("");
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw SerializationError("bad number '" + s + "'");
  return v;
}

template <typename T>
T parse_unsigned(const std::string& s) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw SerializationError("bad integer '" + s + "'");
  }
  return v;
}

}  // namespace

void write_csv_header(std::ostream& out) { out << kCsvHeader << '\n'; }

void write_csv_row(std::ostream& out, const SweepCell& c) {
  out << c.planner << ',' << c.n_exp << ',' << c.n_sim << ',' << c.seed << ','
      << fmt(c.return_mean) << ',' << fmt(c.return_std) << ',' << fmt(c.steps_mean) << ','
      << fmt(c.wall_ms_per_plan) << ',' << fmt(c.speedup) << ',' << fmt(c.phase_ms.selection)
      << ',' << fmt(c.phase_ms.expansion) << ',' << fmt(c.phase_ms.simulation) << ','
      << fmt(c.phase_ms.backprop) << ',' << fmt(c.phase_ms.communication) << '\n';
}

void write_csv(std::ostream& out, const std::vector<SweepCell>& cells) {
  write_csv_header(out);
  for (const auto& c : cells) {
    if (!c.error) write_csv_row(out, c);
  }
}

std::vector<SweepCell> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw SerializationError("unexpected CSV header");
  std::vector<SweepCell> cells;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) f.push_back(item);
    if (f.size() != 14) throw SerializationError("CSV row has " + std::to_string(f.size()) + " fields");
    SweepCell c;
    c.planner = f[0];
    c.n_exp = parse_unsigned<std::uint32_t>(f[1]);
    c.n_sim = parse_unsigned<std::uint32_t>(f[2]);
    c.seed = parse_unsigned<std::uint64_t>(f[3]);
    c.return_mean = parse_double(f[4]);
    c.return_std = parse_double(f[5]);
    c.steps_mean = parse_double(f[6]);
    c.wall_ms_per_plan = parse_double(f[7]);
    c.speedup = parse_double(f[8]);
    c.phase_ms = {parse_double(f[9]), parse_double(f[10]), parse_double(f[11]),
                  parse_double(f[12]), parse_double(f[13])};
    cells.push_back(std::move(c));
  }
  return cells;
}

nlohmann::json cells_to_json(const std::vector<SweepCell>& cells) {
  auto arr = nlohmann::json::array();
  for (const auto& c : cells) {
    nlohmann::json j;
    j["planner"] = c.planner;
    j["n_exp"] = c.n_exp;
    j["n_sim"] = c.n_sim;
    j["seed"] = c.seed;
    j["return_mean"] = c.return_mean;
    j["return_std"] = c.return_std;
    j["steps_mean"] = c.steps_mean;
    j["wall_ms"] = c.wall_ms_per_plan;
    j["speedup"] = std::isnan(c.speedup) ? nlohmann::json(nullptr) : nlohmann::json(c.speedup);
    j["phase_ms"] = {{"selection", c.phase_ms.selection},
                     {"expansion", c.phase_ms.expansion},
                     {"simulation", c.phase_ms.simulation},
                     {"backprop", c.phase_ms.backprop},
                     {"communication", c.phase_ms.communication}};
    j["error"] = c.error ? nlohmann::json(*c.error) : nlohmann::json(nullptr);
    arr.push_back(std::move(j));
  }
  return nlohmann::json{{"cells", std::move(arr)}};
}

std::vector<SweepCell> cells_from_json(const nlohmann::json& root) {
  std::vector<SweepCell> cells;
  try {
    for (const auto& j : root.at("cells")) {
      SweepCell c;
      c.planner = j.at("planner").get<std::string>();
      c.n_exp = j.at("n_exp").get<std::uint32_t>();
      c.n_sim = j.at("n_sim").get<std::uint32_t>();
      c.seed = j.at("seed").get<std::uint64_t>();
      c.return_mean = j.at("return_mean").get<double>();
      c.return_std = j.at("return_std").get<double>();
      c.steps_mean = j.at("steps_mean").get<double>();
      c.wall_ms_per_plan = j.at("wall_ms").get<double>();
      c.speedup = j.at("speedup").is_null() ? std::nan("") : j.at("speedup").get<double>();
      const auto& p = j.at("phase_ms");
      c.phase_ms = {p.at("selection").get<double>(), p.at("expansion").get<double>(),
                    p.at("simulation").get<double>(), p.at("backprop").get<double>(),
                    p.at("communication").get<double>()};
      if (!j.at("error").is_null()) c.error = j.at("error").get<std::string>();
      cells.push_back(std::move(c));
    }
  } catch (const nlohmann::json::exception& e) {
    throw SerializationError(std::string("bad sweep JSON: ") + e.what());
  }
  return cells;
}

void write_md_table(std::ostream& out, const std::vector<SweepCell>& cells) {
  std::vector<std::string> planners;
  for (const auto& c : cells) {
    if (std::find(planners.begin(), planners.end(), c.planner) == planners.end()) {
      planners.push_back(c.planner);
    }
  }
  const auto old_flags = out.flags();
  const auto old_precision = out.precision();
  out << std::fixed << std::setprecision(2);
  for (const auto& planner : planners) {
    std::set<std::uint32_t> exps;
    std::set<std::uint32_t> sims;
    for (const auto& c : cells) {
      if (c.planner == planner) {
        exps.insert(c.n_exp);
        sims.insert(c.n_sim);
      }
    }
    out << "### " << planner << " speedup\n\n| N_exp \\ N_sim |";
    for (auto s : sims) out << ' ' << s << " |";
    out << "\n|---|";
    for (std::size_t i = 0; i < sims.size(); ++i) out << "---|";
    out << '\n';
    for (auto e : exps) {
      out << "| " << e << " |";
      for (auto s : sims) {
        // Average over seeds.
        double sum = 0.0;
        int n = 0;
        for (const auto& c : cells) {
          if (c.planner == planner && c.n_exp == e && c.n_sim == s && !c.error) {
            sum += c.speedup;
            ++n;
          }
        }
        if (n > 0) out << ' ' << sum / n << " |";
        else out << " - |";
      }
      out << '\n';
    }
    out << '\n';
  }
  out.flags(old_flags);
  out.precision(old_precision);
}

void write_plot_data(std::ostream& out, const std::vector<SweepCell>& cells) {
  out << "# planner seed n_exp n_sim speedup return_mean return_std\n";
  for (const auto& c : cells) {
    if (c.error) continue;
    out << c.planner << ' ' << c.seed << ' ' << c.n_exp << ' ' << c.n_sim << ' ' << fmt(c.speedup)
        << ' ' << fmt(c.return_mean) << ' ' << fmt(c.return_std) << '\n';
  }
}

std::vector<std::filesystem::path> emit_report(const std::vector<SweepCell>& cells,
                                               const std::vector<ReportFormat>& formats,
                                               const std::filesystem::path& out_dir) {
  if (cells.empty()) throw ContractViolation("no results to report");
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  const auto open = [&](const char* name) {
    written.push_back(out_dir / name);
    std::ofstream f(written.back());
    if (!f) throw Error("cannot write " + written.back().string());
    return f;
  };
  for (ReportFormat format : formats) {
    switch (format) {
      case ReportFormat::kCsv: {
        auto f = open("sweep.csv");
        write_csv(f, cells);
        break;
      }
      case ReportFormat::kJson: {
        auto f = open("sweep.json");
        f << cells_to_json(cells).dump(2) << '\n';
        break;
      }
      case ReportFormat::kMdTable: {
        auto f = open("speedup.md");
        write_md_table(f, cells);
        break;
      }
      case ReportFormat::kPlot: {
        auto f = open("speedup.dat");
        write_plot_data(f, cells);
        break;
      }
    }
  }
  const bool any_failed =
      std::any_of(cells.begin(), cells.end(), [](const SweepCell& c) { return c.error.has_value(); });
  if (any_failed) {
    auto f = open("failures.log");
    for (const auto& c : cells) {
      if (c.error) {
        f << c.planner << " n_exp=" << c.n_exp << " n_sim=" << c.n_sim << " seed=" << c.seed << ": "
          << *c.error << '\n';
      }
    }
  }
  return written;
}

}  // namespace wuuct
