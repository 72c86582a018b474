#include "cli/cli.hpp"

#include <ostream>

#include "CLI11.hpp"
#include "rpwy/errors.hpp"

namespace rpwy::cli {
namespace {

void add_grid_flags(CLI::App& cmd, TimeGrid& grid) {
  cmd.add_option("--steps", grid.steps, "time steps on [0, tmax]")->capture_default_str();
  cmd.add_option("--tmax", grid.t_max_over_k, "integration horizon in units of 1/k")->capture_default_str();
  cmd.add_option("--stride", grid.coherence_stride, "coherence sampling stride (divides --steps)")
      ->capture_default_str();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Radical-pair singlet-triplet coherence, yield uncertainty and receptor transduction"};
  app.require_subcommand(1);

  SimulateConfig sim;
  std::string sim_csv, sim_summary;
  bool no_coherence = false;
  auto* simulate = app.add_subcommand("simulate", "propagate one model and write its time series");
  simulate->add_option("--model", sim.model_file, "model file (JSON)")->required();
  simulate->add_option("--B", sim.field_b, "magnetic field in units of k")->capture_default_str();
  add_grid_flags(*simulate, sim.grid);
  simulate->add_option("--out", sim_csv, "time-series CSV (t,p_singlet,weight,c_st_instant)");
  simulate->add_option("--summary", sim_summary, "summary record (JSON), readable by transduce --from-run");
  simulate->add_flag("--no-coherence", no_coherence, "skip C_ST evaluation");

  SweepConfig sw;
  std::string sweep_out;
  auto* sweep_cmd = app.add_subcommand("sweep", "randomized Monte Carlo study");
  sweep_cmd->add_option("--nuclei", sw.spec.n_nuc, "number of spin-1/2 nuclei (1-4)")->capture_default_str();
  sweep_cmd->add_option("--runs", sw.spec.runs, "number of sampled models")->capture_default_str();
  sweep_cmd->add_option("--seed", sw.spec.seed, "64-bit base seed")->capture_default_str();
  add_grid_flags(*sweep_cmd, sw.spec.grid);
  sweep_cmd->add_option("--out", sweep_out, "sweep CSV")->required();
  sweep_cmd->add_option("--a-max", sw.spec.a_range.hi, "hyperfine couplings drawn on [0, a-max]")->capture_default_str();
  sweep_cmd->add_option("--j-max", sw.spec.j_range.hi, "exchange drawn on [-j-max, j-max]")->capture_default_str();
  sweep_cmd->add_option("--kappa-max", sw.spec.kappa_range.hi, "dephasing drawn on [0, kappa-max]")
      ->capture_default_str();
  sweep_cmd->add_option("--operating-field", sw.spec.operating_field, "field at which Y, dY and C_ST are taken")
      ->capture_default_str();
  sweep_cmd->add_option("--workers", sw.workers, "worker threads (0: RPWY_WORKERS or all cores)")
      ->capture_default_str();
  sweep_cmd->add_flag("--quiet", sw.quiet, "no summary on stdout");

  EnvelopeConfig env;
  auto* envelope = app.add_subcommand("envelope", "empirical lower envelope min(ratio * c_st^m)");
  envelope->add_option("--m", env.exponent_m, "envelope exponent (1 or 0.5)")->required();
  envelope->add_option("--in", env.in, "sweep CSV")->required();

  VerifyBoundConfig vb;
  auto* verify = app.add_subcommand("verify-bound", "list runs with c_st > 2 dY^2 + slack");
  verify->add_option("--slack", vb.slack, "allowed excess")->capture_default_str();
  verify->add_option("--in", vb.in, "sweep CSV")->required();

  TransduceConfig tr;
  std::string tr_from, tr_out;
  auto* transduce = app.add_subcommand("transduce", "receptor-ligand design bounds for one sensing point");
  transduce->add_option("--K", tr.K, "equilibrium constant")->required();
  transduce->add_option("--V", tr.V, "sensing volume")->required();
  auto* y = transduce->add_option("--Y", tr.yield, "singlet yield");
  transduce->add_option("--dYdB", tr.derivative, "|dY/dB|");
  transduce->add_option("--dY", tr.uncertainty, "yield uncertainty delta Y");
  transduce->add_option("--cst", tr.c_st, "reaction-averaged C_ST");
  auto* from = transduce->add_option("--from-run", tr_from, "summary JSON from simulate, or a sweep CSV");
  transduce->add_option("--run-index", tr.run_index, "row to use when --from-run is a sweep CSV");
  transduce->add_option("--out", tr_out, "also write the report as JSON");
  from->excludes(y);

  PlotdataConfig pd;
  auto* plotdata = app.add_subcommand("plotdata", "scatter and overlay data for the bound and ratio panels");
  plotdata->add_option("--in", pd.in, "sweep CSV")->required();
  plotdata->add_option("--out-dir", pd.out_dir, "output directory")->required();
  plotdata->add_flag("--svg", pd.svg, "also render scatter.svg");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (simulate->parsed()) {
      if (!sim_csv.empty()) sim.csv_out = sim_csv;
      if (!sim_summary.empty()) sim.summary_out = sim_summary;
      sim.coherence = !no_coherence;
      return cmd_simulate(sim, out);
    }
    if (sweep_cmd->parsed()) {
      sw.out = sweep_out;
      sw.spec.j_range.lo = -sw.spec.j_range.hi;
      return cmd_sweep(sw, out);
    }
    if (envelope->parsed()) return cmd_envelope(env, out);
    if (verify->parsed()) return cmd_verify_bound(vb, out);
    if (transduce->parsed()) {
      if (!tr_from.empty()) tr.from_run = tr_from;
      if (!tr_out.empty()) tr.out = tr_out;
      return cmd_transduce(tr, out);
    }
    if (plotdata->parsed()) return cmd_plotdata(pd, out);
  } catch (const SchemaError& e) {
    err << "schema error: " << e.what() << '\n';
    return kSchema;
  } catch (const ValidationError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kValidation;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  }
  return kUsage;
}

}  // namespace rpwy::cli
