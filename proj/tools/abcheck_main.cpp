#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "abcheck/config.hpp"
#include "abcheck/harness.hpp"
#include "abcheck/output.hpp"

namespace {

struct CommonOptions {
  std::string config_path;
  std::string problem;
  std::string scheme;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<std::size_t> threads;
  std::string detector_mode;
  std::string out;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool ensemble) {
  cmd->add_option("--config", o.config_path, "JSON configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--problem", o.problem, "Problem preset id");
  cmd->add_option("--scheme", o.scheme, "Scheme pair id");
  cmd->add_option("--seed", o.seed, "Experiment seed (trial seed = seed + index)");
  cmd->add_option("--detector-mode", o.detector_mode, "both, jump or variance");
  cmd->add_option("--out", o.out, ensemble ? "Output directory" : "Output CSV file");
  if (ensemble) {
    cmd->add_option("--trials", o.trials, "Number of trials");
    cmd->add_option("--threads", o.threads, "Worker threads (0: all cores)");
  }
}

abcheck::ExperimentConfig build_config(const CommonOptions& o) {
  abcheck::ExperimentConfig c;
  if (!o.config_path.empty()) {
    c = abcheck::ExperimentConfig::load(o.config_path);
    if (!o.problem.empty() && o.problem != c.problem.id) {
      const auto keep = c;
      c = abcheck::preset(o.problem, o.scheme);
      c.detector = keep.detector;
      c.experiment = keep.experiment;
      c.norm = keep.norm;
    } else if (!o.scheme.empty() && o.scheme != c.scheme) {
      c.scheme = o.scheme;
      c.fault.sigma2 = abcheck::default_sigma2(c.problem.id, c.scheme, c.fault.mode);
      c.problem.dt.reset();
    }
  } else {
    c = abcheck::preset(o.problem.empty() ? "vdp-b2" : o.problem, o.scheme);
  }
  if (o.seed) c.experiment.seed = *o.seed;
  if (o.trials) c.experiment.trials = *o.trials;
  if (o.threads) c.experiment.threads = *o.threads;
  if (!o.detector_mode.empty()) c.detector.mode = abcheck::parse_detector_mode(o.detector_mode);
  c.validate();
  return c;
}

std::string fmt(const std::optional<double>& v) {
  return v ? abcheck::format_double(*v) : "";
}

void write_trace(std::ostream& out, const std::vector<abcheck::StepTrace>& trace, double dt) {
  out << "step,t,checked,difference,warmup,flagged,j,v,tau_j,tau_v\n";
  for (const auto& r : trace) {
    out << r.step << ',' << abcheck::format_double(static_cast<double>(r.step) * dt) << ','
        << int(r.checked) << ',';
    if (r.checked) {
      out << abcheck::format_double(r.difference) << ',' << int(r.verdict.warmup) << ','
          << int(r.verdict.flagged) << ',' << fmt(r.verdict.j_value) << ','
          << fmt(r.verdict.v_value) << ','
          << abcheck::format_double(r.verdict.thresholds_before.jump) << ','
          << abcheck::format_double(r.verdict.thresholds_before.variance) << '\n';
    } else {
      out << ",,,,,,\n";
    }
  }
}

template <typename Writer>
void to_stream_or_file(const std::string& path, Writer writer) {
  if (path.empty()) {
    writer(std::cout);
    return;
  }
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  writer(f);
}

void print_summary(const std::string& label, const abcheck::ExperimentSummary& s) {
  std::cout << label << " trials=" << s.records.size() << " aborted=" << s.aborted
            << " tpr_at_fault=" << fmt(s.tpr_at_fault)
            << " tpr_fault_or_next=" << fmt(s.tpr_fault_or_next) << " fpr=" << fmt(s.fpr)
            << " tpr_fault_or_next_L>3=" << fmt(abcheck::tpr_above(s.records, 3.0, true))
            << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Base/auxiliary time-stepping error detection experiments"};
  app.require_subcommand(1);

  CommonOptions solve_opts;
  CommonOptions trial_opts;
  CommonOptions exp_opts;
  CommonOptions abl_opts;
  auto* solve = app.add_subcommand("solve", "Fault-free run; dump the difference sequence");
  auto* trial = app.add_subcommand("trial", "One seeded faulty trial; dump verdicts and L");
  auto* experiment = app.add_subcommand("experiment", "Trial ensemble; write CSV outputs");
  auto* ablation = app.add_subcommand("ablation", "Compare both / jump-only / variance-only");
  add_common(solve, solve_opts, false);
  add_common(trial, trial_opts, false);
  add_common(experiment, exp_opts, true);
  add_common(ablation, abl_opts, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) {
      const auto c = build_config(solve_opts);
      const auto trace = abcheck::trace_clean(c);
      to_stream_or_file(solve_opts.out, [&](std::ostream& o) {
        o << "# config: " << c.to_json() << '\n';
        write_trace(o, trace, c.dt());
      });
    } else if (*trial) {
      const auto c = build_config(trial_opts);
      abcheck::TrialOptions t;
      t.norm = c.norm;
      t.detector = c.detector;
      if (c.fault_enabled) t.fault = c.fault;
      t.seed = c.experiment.seed;
      t.keep_trace = true;
      const auto rec = abcheck::run_trial(abcheck::make_stepper_factory(c), t);
      std::cerr << "status=" << abcheck::to_string(rec.status);
      if (rec.fault) {
        std::cerr << " fault_step=" << rec.fault->step << " slot=" << rec.fault->slot
                  << " component=" << rec.fault->component
                  << " factor=" << abcheck::format_double(rec.fault->factor);
      }
      if (rec.lte) std::cerr << " L=" << abcheck::format_double(rec.lte->value);
      std::cerr << " flagged=";
      for (std::size_t i = 0; i < rec.flagged_steps.size(); ++i) {
        std::cerr << (i ? ";" : "") << rec.flagged_steps[i];
      }
      std::cerr << '\n';
      to_stream_or_file(trial_opts.out, [&](std::ostream& o) {
        o << "# config: " << c.to_json() << '\n';
        write_trace(o, rec.trace, c.dt());
      });
    } else if (*experiment) {
      const auto c = build_config(exp_opts);
      const auto s = abcheck::run_experiment(c);
      print_summary(c.problem.id + "/" + c.scheme, s);
      if (!exp_opts.out.empty()) abcheck::emit_outputs(s, exp_opts.out);
    } else if (*ablation) {
      const auto c = build_config(abl_opts);
      const auto all = abcheck::run_ablation(c);
      const char* names[] = {"both", "jump-only", "variance-only"};
      for (std::size_t m = 0; m < all.size(); ++m) {
        print_summary(names[m], all[m]);
        if (!abl_opts.out.empty()) {
          abcheck::emit_outputs(all[m], abl_opts.out, std::string(names[m]) + "_");
        }
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "abcheck: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
