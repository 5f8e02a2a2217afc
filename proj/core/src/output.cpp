#include "abcheck/output.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace abcheck {

namespace {

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

void header(std::ostream& out, const std::string& config_json) {
  out << "# config: " << config_json << '\n';
}

template <typename Writer>
void write_file(const std::filesystem::path& path, Writer writer) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  writer(out);
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, r.ptr);
}

void write_trials_csv(std::ostream& out, const ExperimentSummary& s) {
  header(out, s.config_json);
  out << "trial_id,seed,status,fault_mode,fault_step,fault_slot,fault_component,fault_factor,"
         "sigma2,injections,lte,lte_numerator,lte_denominator,flagged_steps,detected_at_fault,"
         "detected_at_fault_or_next,false_positives,checked_steps,step_count\n";
  for (const auto& r : s.records) {
    out << r.trial_id << ',' << r.seed << ',' << to_string(r.status) << ',';
    if (r.fault) {
      out << to_string(r.fault->mode) << ',' << r.fault->step << ',' << r.fault->slot << ','
          << r.fault->component << ',' << format_double(r.fault->factor) << ','
          << format_double(r.fault->sigma2) << ',';
    } else {
      out << ",,,,,,";
    }
    out << r.injections << ',';
    if (r.lte) {
      out << format_double(r.lte->value) << ',' << format_double(r.lte->numerator) << ','
          << format_double(r.lte->denominator) << ',';
    } else {
      out << ",,,";
    }
    for (std::size_t i = 0; i < r.flagged_steps.size(); ++i) {
      out << (i ? ";" : "") << r.flagged_steps[i];
    }
    out << ',' << int(r.detected_at_fault) << ',' << int(r.detected_at_fault_or_next) << ','
        << r.false_positives << ',' << r.checked_steps << ',' << r.step_count << '\n';
  }
}

void write_summary_csv(std::ostream& out, const ExperimentSummary& s) {
  header(out, s.config_json);
  out << "key,value\n";
  out << "seed," << s.seed << '\n';
  out << "trials," << s.records.size() << '\n';
  out << "completed," << s.completed << '\n';
  out << "diverged," << s.diverged << '\n';
  out << "aborted," << s.aborted << '\n';
  out << "faulted," << s.faulted << '\n';
  out << "infinite_lte," << s.infinite_lte << '\n';
  out << "tpr_at_fault," << opt(s.tpr_at_fault) << '\n';
  out << "tpr_fault_or_next," << opt(s.tpr_fault_or_next) << '\n';
  out << "false_positives," << s.false_positive_total << '\n';
  out << "checked_steps," << s.checked_total << '\n';
  out << "fpr," << opt(s.fpr) << '\n';
  out << "bandwidth," << format_double(s.bandwidth) << '\n';
  const char* names[] = {"0_1", "1_3", "3_inf"};
  for (std::size_t b = 0; b < 3; ++b) {
    out << "bin_" << names[b] << "_trials," << s.binned_fault_or_next.total[b] << '\n';
    out << "bin_" << names[b] << "_tpr_at_fault," << opt(s.binned_at_fault.rate(b)) << '\n';
    out << "bin_" << names[b] << "_tpr_fault_or_next," << opt(s.binned_fault_or_next.rate(b))
        << '\n';
  }
}

void write_curve_csv(std::ostream& out, const std::vector<CurveSample>& curve,
                     const std::string& config_json) {
  header(out, config_json);
  out << "lte,tpr\n";
  for (const auto& c : curve) out << format_double(c.x) << ',' << format_double(c.y) << '\n';
}

void write_timing_csv(std::ostream& out, const ExperimentSummary& s) {
  out << "trial_id,wall_time_s\n";
  for (const auto& r : s.records) out << r.trial_id << ',' << format_double(r.wall_time) << '\n';
}

OutputPaths emit_outputs(const ExperimentSummary& summary, const std::filesystem::path& dir,
                         const std::string& prefix) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
  OutputPaths p{dir / (prefix + "trials.csv"), dir / (prefix + "summary.csv"),
                dir / (prefix + "curve_at_fault.csv"), dir / (prefix + "curve_fault_or_next.csv"),
                dir / (prefix + "timing.csv")};
  write_file(p.trials, [&](std::ostream& o) { write_trials_csv(o, summary); });
  write_file(p.summary, [&](std::ostream& o) { write_summary_csv(o, summary); });
  write_file(p.curve_at_fault,
             [&](std::ostream& o) { write_curve_csv(o, summary.curve_at_fault, summary.config_json); });
  write_file(p.curve_fault_or_next, [&](std::ostream& o) {
    write_curve_csv(o, summary.curve_fault_or_next, summary.config_json);
  });
  write_file(p.timing, [&](std::ostream& o) { write_timing_csv(o, summary); });
  return p;
}

}  // namespace abcheck
