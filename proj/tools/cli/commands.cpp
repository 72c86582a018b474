#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "cli/cli.hpp"
#include "json.hpp"
#include "rpwy/coherence.hpp"
#include "rpwy/errors.hpp"
#include "rpwy/model_file.hpp"
#include "rpwy/sweep_io.hpp"
#include "rpwy/transduction.hpp"

namespace rpwy::cli {
namespace {

using nlohmann::json;

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path.string());
  f << content;
  if (!f) throw IoError("write failed for " + path.string());
}

json real_json(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
}

double json_real(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw SchemaError(1, where + ": missing '" + key + "'");
  const json& v = obj.at(key);
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return parse_real(v.get<std::string>(), 1, key);
  throw SchemaError(1, where + ": '" + key + "' must be a number");
}

void kv(std::ostream& out, const char* key, double v) { out << key << " = " << format_real(v) << '\n'; }

}  // namespace

int cmd_simulate(const SimulateConfig& cfg, std::ostream& out) {
  const RadicalPairModel model = load_model_file(cfg.model_file);
  cfg.grid.validate();

  auto basis = std::make_shared<const SectorBasis>(model);
  CoherenceAccumulator acc(basis);
  PropagationOptions opts;
  opts.keep_states = false;
  if (cfg.coherence) opts.observer = acc.observer();
  const Trajectory traj = propagate(model, cfg.field_b, cfg.grid, opts);

  const double y = singlet_yield(traj);
  const double dy = yield_uncertainty(traj);
  PropagationOptions light;
  light.keep_states = false;
  const double k = model.rate_k;
  const double y0 = cfg.field_b == 0.0 ? y : singlet_yield(propagate(model, 0.0, cfg.grid, light));
  const double yk = cfg.field_b == k ? y : singlet_yield(propagate(model, k, cfg.grid, light));
  const double dydb = std::abs(yk - y0) / k;
  const double ratio = dydb == 0.0 ? std::numeric_limits<double>::infinity() : y * dy / dydb;

  std::optional<CoherenceRecord> coh;
  if (cfg.coherence) coh = acc.finish(traj);

  // Build everything before touching the filesystem so failures leave no partial output.
  std::string csv;
  if (cfg.csv_out) {
    std::ostringstream s;
    s << kSeriesHeader << '\n';
    std::size_t next = 0;
    for (std::size_t i = 0; i < traj.p_singlet.size(); ++i) {
      s << format_real(traj.time(i)) << ',' << format_real(traj.p_singlet[i]) << ',' << format_real(traj.weight(i))
        << ',';
      if (coh && next < coh->steps.size() && coh->steps[next] == i) s << format_real(coh->c_st_instant[next++]);
      s << '\n';
    }
    csv = s.str();
  }
  std::string summary;
  if (cfg.summary_out) {
    json j;
    j["model"] = json::parse(format_model(model));
    j["B"] = cfg.field_b;
    j["steps"] = cfg.grid.steps;
    j["tmax"] = cfg.grid.t_max_over_k;
    j["Y"] = real_json(y);
    j["dY"] = real_json(dy);
    j["dY_dB"] = real_json(dydb);
    j["c_st"] = coh ? real_json(coh->c_st_avg) : json(nullptr);
    j["ratio"] = real_json(ratio);
    summary = j.dump(2) + "\n";
  }
  if (cfg.csv_out) write_file(*cfg.csv_out, csv);
  if (cfg.summary_out) write_file(*cfg.summary_out, summary);

  kv(out, "Y", y);
  kv(out, "Y_T", triplet_yield(traj));
  kv(out, "dY", dy);
  kv(out, "dY_dB", dydb);
  if (coh) {
    kv(out, "C_ST", coh->c_st_avg);
  } else {
    out << "C_ST = skipped\n";
  }
  kv(out, "two_dY2", 2.0 * dy * dy);
  kv(out, "ratio", ratio);
  kv(out, "max_trace_drift", traj.max_trace_drift);
  return kOk;
}

int cmd_sweep(const SweepConfig& cfg, std::ostream& out) {
  cfg.spec.validate();
  SweepOptions opts;
  opts.workers = cfg.workers;
  const SweepResult result = sweep(cfg.spec, opts);
  write_sweep_csv(cfg.out, result.results);
  if (!cfg.quiet) {
    const BoundReport strict = verify_bound(result, 0.0);
    const BoundReport slack = verify_bound(result, 1e-3);
    out << "runs = " << result.results.size() << '\n'
        << "failures = " << result.failures.size() << '\n'
        << "strict_bound_violations = " << strict.count() << '\n'
        << "slack_1e-3_violations = " << slack.count() << '\n';
    kv(out, "max_excess", strict.max_excess);
  }
  return result.failures.empty() ? kOk : kNumerical;
}

int cmd_envelope(const EnvelopeConfig& cfg, std::ostream& out) {
  if (!(std::isfinite(cfg.exponent_m) && cfg.exponent_m >= 0.0)) throw ValidationError("--m must be >= 0");
  const auto runs = read_sweep_csv(cfg.in);
  const double c = envelope_coefficient(runs, cfg.exponent_m);
  kv(out, "m", cfg.exponent_m);
  kv(out, "envelope", c);
  return kOk;
}

int cmd_verify_bound(const VerifyBoundConfig& cfg, std::ostream& out) {
  if (!std::isfinite(cfg.slack)) throw ValidationError("--slack must be finite");
  const auto runs = read_sweep_csv(cfg.in);
  const BoundReport rep = verify_bound(runs, cfg.slack);
  kv(out, "slack", cfg.slack);
  out << "runs = " << runs.size() << '\n' << "violations = " << rep.count() << '\n';
  kv(out, "max_excess", rep.max_excess);
  out << "violators =";
  for (auto i : rep.violators) out << ' ' << i;
  out << '\n';
  return rep.count() == 0 ? kOk : kBoundViolated;
}

int cmd_transduce(const TransduceConfig& cfg, std::ostream& out) {
  SensingPoint point;
  if (cfg.from_run) {
    if (cfg.from_run->extension() == ".csv") {
      const auto runs = read_sweep_csv(*cfg.from_run);
      const RunResult* hit = nullptr;
      for (const auto& r : runs) {
        if (r.run_index == cfg.run_index) hit = &r;
      }
      if (!hit) throw ValidationError("run index " + std::to_string(cfg.run_index) + " not found in sweep");
      point = {hit->yield, hit->derivative, hit->uncertainty, hit->c_st};
    } else {
      std::ifstream f(*cfg.from_run);
      if (!f) throw IoError("cannot open " + cfg.from_run->string());
      json j;
      try {
        f >> j;
      } catch (const json::parse_error& e) {
        throw SchemaError(1, std::string("run record is not valid JSON: ") + e.what());
      }
      const std::string where = cfg.from_run->string();
      point.yield = json_real(j, "Y", where);
      point.derivative = json_real(j, "dY_dB", where);
      point.uncertainty = json_real(j, "dY", where);
      point.c_st = j.contains("c_st") && !j.at("c_st").is_null() ? json_real(j, "c_st", where) : 0.0;
    }
  } else {
    if (!cfg.yield || !cfg.derivative || !cfg.uncertainty) {
      throw ValidationError("transduce needs --Y, --dYdB and --dY (or --from-run)");
    }
    point = {*cfg.yield, *cfg.derivative, *cfg.uncertainty, cfg.c_st.value_or(0.0)};
  }

  const TransductionReport r = optimal_design(point, cfg.K, cfg.V);
  const std::pair<const char*, double> fields[] = {
      {"C", r.C},
      {"deltaC_signal", r.deltaC_signal},
      {"deltaC_classical", r.deltaC_classical},
      {"deltaL_quantum", r.deltaL_quantum},
      {"deltaC_quantum", r.deltaC_quantum},
      {"dB_sql", r.dB_sql},
      {"R_lower", r.R_lower},
      {"dB_min", r.dB_min},
      {"R_min", r.R_min},
      {"R_min_weaver", r.R_min_weaver},
      {"R_min_coherence_bound", r.R_min_coherence_bound},
      {"dB_min_coherence_bound", r.dB_min_coherence_bound},
      {"uncertainty_product_exact", r.uncertainty_product_exact},
      {"uncertainty_product_paper", r.uncertainty_product_paper},
  };
  for (const auto& [key, value] : fields) kv(out, key, value);
  out << "coherence_bounds: R_min_bound=" << format_real(r.R_min_coherence_bound)
      << " dB_min_bound=" << format_real(r.dB_min_coherence_bound)
      << " product_exact=" << format_real(r.uncertainty_product_exact)
      << " product_paper=" << format_real(r.uncertainty_product_paper) << '\n';

  if (cfg.out) {
    json j;
    j["input"] = {{"K", cfg.K}, {"V", cfg.V}, {"Y", point.yield}, {"dY_dB", point.derivative},
                  {"dY", point.uncertainty}, {"c_st", point.c_st}};
    for (const auto& [key, value] : fields) j[key] = real_json(value);
    write_file(*cfg.out, j.dump(2) + "\n");
  }
  return kOk;
}

std::vector<SeriesRow> read_series_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kSeriesHeader) throw SchemaError(1, "unexpected header");
  std::vector<SeriesRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 4) throw SchemaError(line_no, "expected 4 fields, got " + std::to_string(f.size()));
    SeriesRow r;
    r.t = parse_real(f[0], line_no, "t");
    r.p_singlet = parse_real(f[1], line_no, "p_singlet");
    r.weight = parse_real(f[2], line_no, "weight");
    if (!f[3].empty()) r.c_st_instant = parse_real(f[3], line_no, "c_st_instant");
    rows.push_back(r);
  }
  return rows;
}

}  // namespace rpwy::cli
