// dl3: command-line front end for dual timelike curves and Mannheim pairs.
//
//   dl3 frenet   --spec curve.json --out frames.csv [--samples N]
//   dl3 partner  --spec pair_spec.json --out pair_dir
//   dl3 verify   pair_dir [--tol 1e-6] --report report.json
//   dl3 theorems pair_dir [--tol 1e-6] --report report.json
//
// Exit codes: 0 success, 2 validation/compute error, 3 pair verification failed.
// DL3_THREADS caps worker threads (0 = hardware concurrency).

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "dl3/dl3.hpp"
#include "dl3/io.hpp"

namespace fs = std::filesystem;
using dl3::io::Json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 2;
constexpr int kExitNotPair = 3;

std::string stage_of(dl3::Errc code) {
  switch (code) {
    case dl3::Errc::Parse: return "parse";
    case dl3::Errc::Validation: return "validate";
    case dl3::Errc::Io: return "io";
    case dl3::Errc::Input: return "input";
    default: return "compute";
  }
}

int report_error(const std::string& stage, const std::string& kind, const std::string& message) {
  Json err{{"error", Json{{"stage", stage}, {"kind", kind}, {"message", message}}}};
  std::cerr << err.dump() << '\n';
  std::cout << "error (" << stage << "): " << message << '\n';
  return kExitError;
}

void apply_thread_env() {
  if (const char* env = std::getenv("DL3_THREADS")) {
    char* end = nullptr;
    long n = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || n < 0) {
      throw dl3::Error(dl3::Errc::Validation, "DL3_THREADS must be a non-negative integer");
    }
    dl3::set_thread_count(static_cast<unsigned>(n));
  }
}

dl3::CurveSpec materialize(const dl3::io::SpecFile& f) {
  if (f.source != "invariants") return f.spec;
  if (!f.P) throw dl3::Error(dl3::Errc::Validation, "frenet on an invariants source needs 'P'");
  dl3::NaturalCurve nc = dl3::integrate_from_invariants(*f.P, *f.Q, dl3::FrameAxes{}, f.spec.range, f.spec.samples - 1);
  return nc.curve;
}

int cmd_frenet(const std::string& spec_path, const std::string& out_path, std::optional<std::size_t> samples) {
  dl3::io::SpecFile f = dl3::io::load_spec(spec_path);
  std::size_t n = samples.value_or(f.spec.samples);
  if (n < 8) throw dl3::Error(dl3::Errc::Validation, "--samples must be at least 8");
  dl3::CurveSpec curve = materialize(f);
  std::vector<double> ts = dl3::uniform_grid(f.spec.range, n);
  std::vector<dl3::DualFrame> frames = dl3::frenet_table(curve, ts);
  dl3::io::write_file_atomic(out_path, dl3::io::frenet_csv(ts, frames));
  std::cout << "frenet: wrote " << n << " rows to " << out_path << '\n';
  return kExitOk;
}

int cmd_partner(const std::string& spec_path, const std::string& out_dir) {
  dl3::io::SpecFile f = dl3::io::load_spec(spec_path);
  if (f.source != "invariants" || !f.lambda) {
    throw dl3::Error(dl3::Errc::Validation, "partner needs an invariants spec with 'Q' and 'lambda'");
  }
  std::size_t steps = f.spec.samples - 1;
  dl3::PartnerPair pair = dl3::partner_from_invariants(*f.Q, *f.lambda, f.spec.range, steps);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw dl3::Error(dl3::Errc::Io, "cannot create '" + out_dir + "': " + ec.message());
  const auto& beta = std::get<dl3::SampledTable>(pair.beta.curve.source);
  const auto& alpha = std::get<dl3::SampledTable>(pair.alpha.source);
  dl3::io::write_file_atomic(fs::path(out_dir) / "beta.csv", dl3::io::table_csv(beta));
  dl3::io::write_file_atomic(fs::path(out_dir) / "alpha.csv", dl3::io::table_csv(alpha));
  Json manifest{{"lambda", dl3::io::dual_json(pair.lambda)},
                {"range", Json::array({pair.range.t0, pair.range.t1})},
                {"steps", pair.steps},
                {"branch", dl3::kMannheimBranch},
                {"Q", f.Q->source()}};
  dl3::io::write_file_atomic(fs::path(out_dir) / "pair.json", dl3::io::to_json_text(manifest));
  std::cout << "partner: wrote beta.csv, alpha.csv and pair.json (" << steps << " steps) to " << out_dir << '\n';
  return kExitOk;
}

struct LoadedPair {
  dl3::CurveSpec alpha;
  dl3::CurveSpec beta;
  dl3::DualScalar lambda;
  dl3::Correspondence corr;
};

LoadedPair load_pair(const std::string& dir) {
  fs::path d(dir);
  Json manifest;
  try {
    manifest = Json::parse(dl3::io::read_file(d / "pair.json"));
  } catch (const Json::parse_error& e) {
    throw dl3::Error(dl3::Errc::Parse, std::string("pair.json: malformed JSON: ") + e.what());
  }
  const Json& l = manifest.contains("lambda") ? manifest["lambda"] : Json();
  if (!l.is_object() || !l.contains("re") || !l.contains("du") || !l["re"].is_number() || !l["du"].is_number()) {
    throw dl3::Error(dl3::Errc::Validation, "pair.json: field 'lambda' must be {\"re\": number, \"du\": number}");
  }
  dl3::SampledTable a = dl3::io::read_table_csv(dl3::io::read_file(d / "alpha.csv"));
  dl3::SampledTable b = dl3::io::read_table_csv(dl3::io::read_file(d / "beta.csv"));
  if (a.t() != b.t()) throw dl3::Error(dl3::Errc::Input, "alpha.csv and beta.csv do not share a parameter grid");
  LoadedPair p;
  p.lambda = dl3::DualScalar(l["re"].get<double>(), l["du"].get<double>());
  p.corr = dl3::Correspondence::shared(a.t());
  p.alpha = dl3::CurveSpec{a, a.range(), a.size()};
  p.beta = dl3::CurveSpec{b, b.range(), b.size()};
  return p;
}

int cmd_check(const std::string& dir, double tol, const std::string& report_path, bool full) {
  const std::string command = full ? "theorems" : "verify";
  LoadedPair p = load_pair(dir);
  dl3::PairFrames frames = dl3::pair_frames(p.alpha, p.beta, p.corr);
  dl3::PairCheck check = dl3::verify_pair(frames, tol);
  if (!check.is_pair) {
    dl3::io::write_file_atomic(report_path,
                               dl3::io::to_json_text(dl3::io::failed_pair_json(check, p.corr, p.lambda, command)));
    std::cout << command << ": not a Mannheim pair at tol " << tol << " (collinearity error "
              << check.collinearity_error_re << ", distance spread " << check.distance_spread_re << ")\n";
    return kExitNotPair;
  }
  dl3::MannheimReport rep = dl3::theorem_report(frames, p.corr, p.lambda, tol, full);
  std::optional<dl3::SplitReport> splits;
  if (full) splits = dl3::split_components(rep);
  dl3::io::write_file_atomic(report_path, dl3::io::to_json_text(dl3::io::report_json(rep, command, splits)));
  std::cout << command << ": pair verified at tol " << tol << ", " << rep.samples.size() << " samples, report "
            << report_path << '\n';
  for (const auto& s : rep.identities) {
    std::cout << "  " << s.name << ": max |re| " << s.max_residual_re << ", max |du| " << s.max_residual_du << '\n';
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dual Lorentzian curves: Frenet frames and Mannheim partner pairs"};
  app.require_subcommand(1);

  std::string spec, out, report, pair_dir;
  std::optional<std::size_t> samples;
  double tol = 1e-6;

  auto* frenet = app.add_subcommand("frenet", "Frenet frame, curvature and torsion along a curve");
  frenet->add_option("--spec", spec, "curve spec JSON")->required();
  frenet->add_option("--out", out, "output CSV")->required();
  frenet->add_option("--samples", samples, "number of rows (default: the spec's samples)");

  auto* partner = app.add_subcommand("partner", "Build a Mannheim pair from Q(s*) and lambda");
  partner->add_option("--spec", spec, "invariants spec JSON with Q and lambda")->required();
  partner->add_option("--out", out, "output directory")->required();

  auto* verify = app.add_subcommand("verify", "Check a pair and report identity residuals");
  verify->add_option("pair_dir", pair_dir, "directory with alpha.csv, beta.csv, pair.json")->required();
  verify->add_option("--tol", tol, "pair tolerance");
  verify->add_option("--report", report, "output report JSON")->required();

  auto* theorems = app.add_subcommand("theorems", "Full report with curvature centers and component splits");
  theorems->add_option("pair_dir", pair_dir, "directory with alpha.csv, beta.csv, pair.json")->required();
  theorems->add_option("--tol", tol, "pair tolerance");
  theorems->add_option("--report", report, "output report JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("cli", "usage", e.what());
  }

  try {
    apply_thread_env();
    if (*frenet) return cmd_frenet(spec, out, samples);
    if (*partner) return cmd_partner(spec, out);
    if (*verify) return cmd_check(pair_dir, tol, report, false);
    return cmd_check(pair_dir, tol, report, true);
  } catch (const dl3::Error& e) {
    return report_error(stage_of(e.code()), std::string(dl3::to_string(e.code())), e.what());
  } catch (const std::exception& e) {
    return report_error("compute", "internal", e.what());
  }
}
