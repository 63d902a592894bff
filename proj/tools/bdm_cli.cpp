// Command-line front end: profile, verify, gamma, enumerate, simulate, propagate.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "bdm/bdm.hpp"

namespace {

struct Options {
  std::int64_t q = 2;
  std::int64_t M = 1;
  std::int64_t n = -1;
  std::int64_t kmax = -1;
  std::int64_t T = -1;
  std::int64_t t = -1;
  std::int64_t d = 0;
  bool d_set = false;
  std::int64_t dmin = -4;
  std::int64_t dmax = 4;
  std::int64_t tau = -1;
  std::int64_t gmax = 12;
  std::uint64_t runs = 1000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::uint64_t budget = bdm::kDefaultEnumerationBudget;
  std::string out;
  std::string input;
  std::string suite;
};

constexpr int kExitUsage = 2;
constexpr int kExitResource = 3;

std::int64_t default_kmax(std::int64_t M) { return M <= 3 ? 60 : 40; }

void validate_common(const Options& o) {
  if (o.q < 2) throw bdm::ParameterError("--q must be at least 2");
  if (o.M < 1) throw bdm::ParameterError("--M must be at least 1");
  if (o.T != -1 && (o.T < 0 || o.T > o.M)) throw bdm::ParameterError("--T must lie in [0, M]");
  if (o.t != -1 && (o.t < 1 || o.t > o.M + 1)) throw bdm::ParameterError("--t must lie in [1, M+1]");
  if (o.dmin > o.dmax) throw bdm::ParameterError("--dmin exceeds --dmax");
}

// Where output goes: --out, else $BDM_OUTPUT_DIR/<name>, else stdout.
class Sink {
 public:
  Sink(const std::string& out, const std::string& default_name) {
    std::string path = out;
    if (path.empty()) {
      if (const char* dir = std::getenv("BDM_OUTPUT_DIR"); dir && *dir) {
        std::filesystem::create_directories(dir);
        path = (std::filesystem::path(dir) / default_name).string();
      }
    }
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw std::runtime_error("cannot open " + path + " for writing");
      path_ = path;
    }
  }
  std::ostream& stream() { return file_ ? static_cast<std::ostream&>(*file_) : std::cout; }
  const std::string& path() const { return path_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::string path_;
};

int cmd_profile(const Options& o) {
  std::ifstream in(o.input);
  if (!in) throw bdm::ParameterError("cannot read " + o.input);
  const bdm::Multisequence seq = bdm::parse_multisequence(in);
  const bdm::Profile p = bdm::profile(seq);
  Sink sink(o.out, "profile.csv");
  auto& os = sink.stream();
  os << "n,L,d\n";
  for (std::size_t k = 0; k <= p.n; ++k) os << k << ',' << p.column_lc[k] << ',' << p.deviation[k] << '\n';
  return 0;
}

int cmd_verify(const Options& o) {
  validate_common(o);
  const std::int64_t kmax = o.kmax >= 0 ? o.kmax : default_kmax(o.M);
  const std::int64_t drange = std::max(-o.dmin, o.dmax);
  bdm::VerificationReport r;
  const std::string& s = o.suite;
  if (s == "class-counts") r = bdm::verify_class_counts(o.M, kmax);
  else if (s == "partition-bijection") r = bdm::verify_partition_bijection(o.M, o.kmax >= 0 ? o.kmax : 20);
  else if (s == "stationarity") r = bdm::verify_stationarity(o.M, o.q, kmax);
  else if (s == "gamma") r = bdm::verify_gamma(o.M, o.q, drange, kmax);
  else if (s == "bruteforce") r = bdm::verify_bruteforce(o.q, o.M, o.n >= 0 ? o.n : 6, o.budget, o.threads);
  else if (s == "finite-n") r = bdm::verify_finite_n(o.M, o.q, o.tau >= 0 ? o.tau : 4 * (o.M + 1) * (o.M + 1), o.threads);
  else if (s == "generations") r = bdm::verify_generations(o.M, o.gmax);
  else if (s == "theta") r = bdm::verify_theta(o.M, o.q, drange, kmax);
  else if (s == "mean-deviation") r = bdm::verify_mean_deviation(o.M, o.q, kmax);
  else throw bdm::ParameterError("unknown suite " + s);

  Sink sink(o.out, "verify-" + s + ".json");
  sink.stream() << r.to_json().dump(2) << '\n';
  std::cerr << r.campaign << ": " << (r.pass ? "pass" : "fail") << " (" << r.checks << " checks, " << r.failures
            << " failures" << (r.status == bdm::Status::Conjecture ? ", conjecture" : "") << ")\n";
  if (!r.pass && r.status == bdm::Status::Theorem) return 1;
  return 0;
}

int cmd_gamma(const Options& o) {
  validate_common(o);
  const std::int64_t kmax = o.kmax >= 0 ? o.kmax : default_kmax(o.M);
  const bdm::Census census(static_cast<std::size_t>(o.M), kmax);
  Sink sink(o.out, "gamma.csv");
  auto& os = sink.stream();
  os << "d,T,t,closed_num,closed_den,enum_num,enum_den,tail_num,tail_den\n";
  const std::int64_t dlo = o.d_set ? o.d : o.dmin, dhi = o.d_set ? o.d : o.dmax;
  for (std::int64_t T = 0; T <= o.M; ++T) {
    if (o.T != -1 && T != o.T) continue;
    for (std::int64_t t = 1; t <= o.M + 1; ++t) {
      if (o.t != -1 && t != o.t) continue;
      for (std::int64_t d = dlo; d <= dhi; ++d) {
        const bdm::GammaQuery g{o.q, o.M, T, t, d};
        const bdm::Rational c = bdm::gamma_closed(g);
        const bdm::Enclosure e = bdm::gamma_enumerated(g, census.slot(T, t));
        os << d << ',' << T << ',' << t << ',' << c.get_num() << ',' << c.get_den() << ',' << e.lower.get_num()
           << ',' << e.lower.get_den() << ',' << e.tail_bound.get_num() << ',' << e.tail_bound.get_den() << '\n';
      }
    }
  }
  return 0;
}

int cmd_enumerate(const Options& o) {
  validate_common(o);
  const std::int64_t kmax = o.kmax >= 0 ? o.kmax : 10;
  const std::int64_t T = o.T != -1 ? o.T : 0, t = o.t != -1 ? o.t : o.M + 1;
  const bdm::Census census(static_cast<std::size_t>(o.M), kmax, o.budget);
  Sink sink(o.out, "census.csv");
  bdm::write_census_csv(sink.stream(), census.slot(T, t));
  return 0;
}

int cmd_simulate(const Options& o) {
  validate_common(o);
  const std::int64_t n = o.n >= 0 ? o.n : 100;
  const bdm::SimulationStats st = bdm::simulate(o.q, o.M, n, o.runs, o.seed, o.threads);
  Sink sink(o.out, "simulate.json");
  sink.stream() << bdm::to_json(st).dump(2) << '\n';
  return 0;
}

int cmd_propagate(const Options& o) {
  validate_common(o);
  const std::int64_t kmax = o.kmax >= 0 ? o.kmax : default_kmax(o.M);
  bdm::MassDistribution mu;
  if (o.tau >= 0)
    mu = bdm::run_to_tau(static_cast<std::size_t>(o.M), o.q, o.tau, kmax, o.threads);
  else
    mu = bdm::run_to_column(static_cast<std::size_t>(o.M), o.q, o.n >= 0 ? o.n : 1, kmax, o.threads);
  Sink sink(o.out, "mass.csv");
  bdm::write_distribution_csv(sink.stream(), mu);
  return 0;
}

void add_model_flags(CLI::App* c, Options& o) {
  c->add_option("--q", o.q, "field size (prime for field work)");
  c->add_option("--M", o.M, "number of streams");
  c->add_option("--kmax", o.kmax, "class cutoff");
  c->add_option("--threads", o.threads, "worker threads")->check(CLI::Range(1u, 256u));
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Linear complexity deviations of multisequences via the battery-discharge model"};
  app.require_subcommand(1);

  auto* profile = app.add_subcommand("profile", "linear complexity profile of a multisequence file");
  profile->add_option("input", o.input, "file with header `q M n` and M lines of symbols")->required();
  profile->add_option("--out", o.out, "output path");

  auto* verify = app.add_subcommand("verify", "run a verification campaign and write a JSON report");
  verify->add_option("suite", o.suite, "campaign name")
      ->required()
      ->check(CLI::IsMember({"class-counts", "partition-bijection", "stationarity", "gamma", "bruteforce", "finite-n",
                             "generations", "theta", "mean-deviation"}));
  add_model_flags(verify, o);
  verify->add_option("--n", o.n, "largest column for bruteforce");
  verify->add_option("--dmin", o.dmin, "smallest drain");
  verify->add_option("--dmax", o.dmax, "largest drain");
  verify->add_option("--tau", o.tau, "last ministep for finite-n");
  verify->add_option("--gmax", o.gmax, "largest generation");
  verify->add_option("--budget", o.budget, "cap on q^(M n) prefixes");
  verify->add_option("--out", o.out, "output path");

  auto* gamma = app.add_subcommand("gamma", "closed and enumerated gamma(d,T,t) as CSV");
  add_model_flags(gamma, o);
  gamma->add_option("--T", o.T, "time residue (default: all)");
  gamma->add_option("--t", o.t, "ministep (default: all)");
  auto* dopt = gamma->add_option("--d", o.d, "single drain value");
  gamma->add_option("--dmin", o.dmin, "smallest drain");
  gamma->add_option("--dmax", o.dmax, "largest drain");
  gamma->add_option("--out", o.out, "output path");

  auto* enumerate = app.add_subcommand("enumerate", "census of one slot as CSV");
  add_model_flags(enumerate, o);
  enumerate->add_option("--T", o.T, "time residue (default 0)");
  enumerate->add_option("--t", o.t, "ministep (default M+1)");
  enumerate->add_option("--budget", o.budget, "cap on census size");
  enumerate->add_option("--out", o.out, "output path");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo trajectories as JSON");
  add_model_flags(simulate, o);
  simulate->add_option("--n", o.n, "columns per run");
  simulate->add_option("--runs", o.runs, "number of runs");
  simulate->add_option("--seed", o.seed, "master seed");
  simulate->add_option("--out", o.out, "output path");

  auto* propagate = app.add_subcommand("propagate", "exact mass distribution as CSV");
  add_model_flags(propagate, o);
  propagate->add_option("--n", o.n, "column (default 1)");
  propagate->add_option("--tau", o.tau, "ministep, overrides --n");
  propagate->add_option("--out", o.out, "output path");

  // Budget defaults differ by command: prefixes for verify, states for enumerate.
  enumerate->preparse_callback([&](std::size_t) { o.budget = bdm::kDefaultStateBudget; });

  CLI11_PARSE(app, argc, argv);
  o.d_set = dopt->count() > 0;

  try {
    if (*profile) return cmd_profile(o);
    if (*verify) return cmd_verify(o);
    if (*gamma) return cmd_gamma(o);
    if (*enumerate) return cmd_enumerate(o);
    if (*simulate) return cmd_simulate(o);
    if (*propagate) return cmd_propagate(o);
  } catch (const bdm::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const bdm::BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitResource;
  } catch (const bdm::IncompleteCensus& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitResource;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
