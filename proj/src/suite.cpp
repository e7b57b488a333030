#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>
#include <stdexcept>

#include "mmgeo/entropy_flow.hpp"
#include "mmgeo/gromov.hpp"
#include "mmgeo/io.hpp"
#include "mmgeo/lab.hpp"
#include "mmgeo/rng.hpp"
#include "mmgeo/spectral.hpp"

namespace mmgeo::lab {

namespace {

namespace fs = std::filesystem;
using io::format_double;

FinitePmmSpace point_space() {
  FinitePmmSpace p;
  p.dist = Eigen::MatrixXd::Zero(1, 1);
  p.mass = Eigen::VectorXd::Ones(1);
  p.base = 0;
  return p;
}

struct Check {
  std::string name;
  bool pass;
  double value;
};

std::string summary_json(const std::string& family, const std::vector<Check>& checks,
                         bool pass) {
  std::ostringstream os;
  os << "{\"family\": \"" << family << "\", \"pass\": " << (pass ? "true" : "false")
     << ", \"checks\": [";
  for (std::size_t i = 0; i < checks.size(); ++i) {
    os << (i ? ", " : "") << "{\"name\": \"" << checks[i].name
       << "\", \"pass\": " << (checks[i].pass ? "true" : "false")
       << ", \"value\": " << format_double(checks[i].value) << "}";
  }
  os << "]}\n";
  return os.str();
}

bool decays_to_quarter(const std::vector<double>& v) {
  if (v.size() < 2) return true;
  for (std::size_t i = 0; i + 1 < v.size(); ++i)
    if (v[i + 1] > v[i] + 1e-12) return false;
  return v.back() <= 0.25 * v.front() + 1e-12;
}

SuiteResult run_convergence(const ExperimentConfig& cfg) {
  SuiteResult out;
  const FinitePmmSpace point = point_space();
  const WeightSpec psi = WeightSpec::gauss(16.0);
  gromov::PgwSumOptions popt;
  popt.per_k.search.seed = cfg.seed;

  std::ostringstream csv;
  csv << "family,n,pgw_upper,pgw_lower,dpsi_upper,pmgh_lower\n";
  std::vector<double> atom_pgw, atom_dpsi, split_pgw;
  std::vector<double> split_pmgh;
  for (int n : cfg.sizes) {
    const auto atom = gen_interval_with_atom(n);
    const auto b1 = gromov::pgw(atom, point, popt);
    gromov::SearchOptions sopt;
    sopt.seed = cfg.seed;
    const double du = gromov::dpsi_upper(atom, point, psi, sopt);
    atom_pgw.push_back(b1.upper);
    atom_dpsi.push_back(du);
    csv << "interval-with-atom," << n << ',' << format_double(b1.upper) << ','
        << format_double(b1.lower) << ',' << format_double(du) << ",\n";

    const auto split = gen_split_interval(n);
    const auto target = gen_unit_interval(4 * n);
    const auto b2 = gromov::pgw(split, target, popt);
    const auto pm = pmgh_compare(split, target);
    split_pgw.push_back(b2.upper);
    split_pmgh.push_back(pm.lower);
    csv << "split-interval," << n << ',' << format_double(b2.upper) << ','
        << format_double(b2.lower) << ",," << format_double(pm.lower) << '\n';
  }

  std::vector<Check> checks;
  if (!cfg.sizes.empty()) {
    checks.push_back({"interval-atom pgw decay", decays_to_quarter(atom_pgw),
                      atom_pgw.empty() ? 0.0 : atom_pgw.back()});
    checks.push_back({"interval-atom dpsi decay", decays_to_quarter(atom_dpsi),
                      atom_dpsi.empty() ? 0.0 : atom_dpsi.back()});
    checks.push_back({"split-interval pgw decay", decays_to_quarter(split_pgw),
                      split_pgw.empty() ? 0.0 : split_pgw.back()});
    const double min_pmgh =
        split_pmgh.empty() ? 1.0 : *std::min_element(split_pmgh.begin(), split_pmgh.end());
    checks.push_back({"split-interval pmgh lower >= 0.5", min_pmgh >= 0.5, min_pmgh});
  }
  bool pass = true;
  for (const auto& c : checks) pass = pass && c.pass;
  out.pass = pass;
  if (!cfg.out_dir.empty()) {
    fs::create_directories(cfg.out_dir);
    const std::string p = cfg.out_dir + "/convergence.csv";
    io::write_file(p, csv.str());
    out.artifact_paths.push_back(p);
  }
  out.summary_json = summary_json("convergence", checks, pass);
  return out;
}

SuiteResult run_flow(const ExperimentConfig& cfg) {
  SuiteResult out;
  const int n = 32;
  const auto bench = gen_circle(n);
  const auto& space = bench.space;
  const auto& graph = bench.graph;
  spectral::LaplaceOperator op(graph);
  const Eigen::VectorXd uniform = space.mass;

  std::ostringstream csv;
  csv << "check,param,time,value\n";
  std::vector<Check> checks;

  // identification against the spectral density flow
  Eigen::VectorXd f0(n);
  for (int i = 0; i < n; ++i)
    f0(i) = 1.0 + 0.2 * std::cos(2.0 * M_PI * i / n);
  Eigen::VectorXd mu0 = f0.array() * space.mass.array();
  mu0 /= mu0.sum();
  std::vector<double> gap_by_tau;
  for (double tau : {1e-2, 1e-3}) {
    const auto trace = flow::jko_flow(mu0, tau, 0.1, space, graph);
    double worst = 0.0;
    for (double t : {0.01, 0.05, 0.1}) {
      const int k = static_cast<int>(std::lround(t / tau));
      Eigen::VectorXd ft = spectral::heat_semigroup(op, f0, t, 1, spectral::HeatMode::SpectralExact);
      Eigen::VectorXd nu = (ft.array() * space.mass.array()).cwiseMax(0.0);
      nu /= nu.sum();
      const double gap = transport::w2(space, trace.states[k], nu);
      worst = std::max(worst, gap);
      csv << "identification," << format_double(tau) << ',' << format_double(t) << ','
          << format_double(gap) << '\n';
    }
    gap_by_tau.push_back(worst);
  }
  checks.push_back({"identification gap <= 5e-2", gap_by_tau[1] <= 5e-2, gap_by_tau[1]});
  checks.push_back({"identification gap monotone in tau", gap_by_tau[1] <= gap_by_tau[0] + 1e-15,
                    gap_by_tau[1] - gap_by_tau[0]});

  // EDE residual comparison from a two-atom start
  Eigen::VectorXd two = Eigen::VectorXd::Zero(n);
  two(0) = 0.5;
  two(n / 2) = 0.5;
  std::vector<double> maxres;
  for (double tau : {1e-2, 1e-3}) {
    const auto trace = flow::jko_flow(two, tau, 0.05, space, graph);
    const auto res = flow::ede_residual(trace, graph);
    maxres.push_back(*std::max_element(res.begin(), res.end()));
    csv << "ede-max-residual," << format_double(tau) << ",," << format_double(maxres.back())
        << '\n';
  }
  checks.push_back({"ede residual shrinks with tau", maxres[1] < maxres[0], maxres[1]});

  // contraction for two Dirac starts
  {
    Eigen::VectorXd da = Eigen::VectorXd::Zero(n), db = Eigen::VectorXd::Zero(n);
    da(0) = 1.0;
    db(n / 4) = 1.0;
    const double tau = 1e-3;
    const auto ta = flow::jko_flow(da, tau, 0.02, space, graph);
    const auto tb = flow::jko_flow(db, tau, 0.02, space, graph);
    const double viol = flow::contraction_check(ta, tb, space, 0.0);
    csv << "jko-contraction-violation,,," << format_double(viol) << '\n';
    checks.push_back({"jko contraction violation <= 5e-3", viol <= 5e-3, viol});
  }

  // a priori estimates on random smooth starts
  {
    Rng rng(cfg.seed);
    const double C = 1.0;
    bool all_pass = true;
    double worst_slack = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < 20; ++trial) {
      const double a1 = rng.uniform(0.35, 0.6);
      const double a2 = rng.uniform(0.0, 0.25);
      const double p1 = rng.uniform(0.0, 1.0);
      const double p2 = rng.uniform(0.0, 1.0);
      Eigen::VectorXd f(n);
      for (int i = 0; i < n; ++i) {
        const double x = static_cast<double>(i) / n;
        f(i) = 1.0 + a1 * std::cos(2.0 * M_PI * (x - p1)) + a2 * std::cos(4.0 * M_PI * (x - p2));
      }
      Eigen::VectorXd mu = f.array() * space.mass.array();
      mu /= mu.sum();
      const auto trace = flow::jko_flow(mu, 1.0 / 32.0, 1.0 / 8.0, space, graph);
      const auto rep = flow::apriori_check(trace, space, C, 0.0);
      all_pass = all_pass && rep.pass;
      worst_slack = std::min({worst_slack, rep.min_apriori_slack, rep.speed_bound_slack});
      csv << "apriori-slack," << trial << ",," << format_double(rep.min_apriori_slack) << '\n';
    }
    checks.push_back({"apriori estimates pass", all_pass, worst_slack});
  }

  bool pass = true;
  for (const auto& c : checks) pass = pass && c.pass;
  out.pass = pass;
  if (!cfg.out_dir.empty()) {
    fs::create_directories(cfg.out_dir);
    const std::string p = cfg.out_dir + "/flow.csv";
    io::write_file(p, csv.str());
    out.artifact_paths.push_back(p);
  }
  out.summary_json = summary_json("flow", checks, pass);
  return out;
}

SuiteResult run_mosco_spectral(const ExperimentConfig& cfg) {
  SuiteResult out;
  std::vector<int> sizes = cfg.sizes;
  if (sizes.empty()) sizes = {16, 32, 64, 128};

  std::ostringstream csv;
  csv << "n,lambda1,lambda2,lambda3,lambda4,lambda5,quadform,mosco_energy_gap\n";
  std::vector<Check> checks;

  std::vector<GraphDirichlet> graphs;
  std::vector<CircleBenchmark> benches;
  for (int n : sizes) {
    benches.push_back(gen_circle(n));
    graphs.push_back(benches.back().graph);
  }
  const auto table = spectral::eigen_convergence(graphs, 5);

  // closed-form limits under the circumference-1 scaling
  auto lam_inf = [](int j) {
    const int pair = (j + 1) / 2;
    return std::pow(2.0 * M_PI * pair, 2.0);
  };
  bool monotone = true, final_ok = true;
  for (int j = 1; j <= 4; ++j) {
    double prev_gap = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < sizes.size(); ++c) {
      const double gap = std::abs(table.lambda(j, c) - lam_inf(j));
      if (gap >= prev_gap) monotone = false;
      prev_gap = gap;
    }
    final_ok = final_ok &&
               prev_gap <= 0.02 * lam_inf(j);
  }
  checks.push_back({"eigenvalue gaps strictly decreasing", monotone, 0.0});
  checks.push_back({"final relative eigenvalue error <= 2%", final_ok, 0.0});

  // Mosco ladder toward the finest circle, first cosine mode
  const auto& fine = benches.back();
  Eigen::VectorXd f_inf(fine.space.n());
  for (int i = 0; i < fine.space.n(); ++i)
    f_inf(i) = std::sqrt(2.0) * std::cos(2.0 * M_PI * i / fine.space.n());
  std::vector<spectral::MoscoElement> ladder;
  for (std::size_t c = 0; c + 1 < sizes.size(); ++c) {
    spectral::MoscoElement el{benches[c].space, benches[c].graph,
                              Eigen::MatrixXd(benches[c].space.n(), fine.space.n())};
    for (int i = 0; i < benches[c].space.n(); ++i)
      for (int j = 0; j < fine.space.n(); ++j) {
        const double xi = static_cast<double>(i) / sizes[c];
        const double xj = static_cast<double>(j) / fine.space.n();
        const double gap = std::abs(xi - xj);
        el.cross_to_limit(i, j) = std::min(gap, 1.0 - gap);
      }
    ladder.push_back(std::move(el));
  }
  const auto mosco = spectral::mosco_diagnostic(ladder, fine.space, fine.graph, f_inf);
  bool gaps_decrease = true;
  for (std::size_t r = 0; r + 1 < mosco.rows.size(); ++r)
    if (mosco.rows[r + 1].energy_gap >= mosco.rows[r].energy_gap) gaps_decrease = false;
  bool no_liminf_flags = true;
  for (const auto& r : mosco.rows) no_liminf_flags = no_liminf_flags && !r.liminf_flag;
  checks.push_back({"mosco energy gaps decreasing", gaps_decrease,
                    mosco.rows.empty() ? 0.0 : mosco.rows.back().energy_gap});
  checks.push_back({"mosco liminf probe clean", no_liminf_flags, 0.0});

  double worst_qf = 0.0;
  for (std::size_t c = 0; c < sizes.size(); ++c) {
    const double qf = spectral::quadratic_form_check(graphs[c], 50, cfg.seed);
    worst_qf = std::max(worst_qf, qf);
    const double mg = c < mosco.rows.size() ? mosco.rows[c].energy_gap : 0.0;
    csv << sizes[c];
    for (int j = 0; j < 5; ++j) csv << ',' << format_double(table.lambda(j, c));
    csv << ',' << format_double(qf) << ',' << format_double(mg) << '\n';
  }
  checks.push_back({"quadratic form residual <= 1e-10", worst_qf <= 1e-10, worst_qf});

  bool pass = true;
  for (const auto& c : checks) pass = pass && c.pass;
  out.pass = pass;
  if (!cfg.out_dir.empty()) {
    fs::create_directories(cfg.out_dir);
    const std::string p = cfg.out_dir + "/mosco_spectral.csv";
    io::write_file(p, csv.str());
    out.artifact_paths.push_back(p);
  }
  out.summary_json = summary_json("mosco-spectral", checks, pass);
  return out;
}

}  // namespace

SuiteResult run_suite(const ExperimentConfig& config) {
  for (std::size_t i = 0; i + 1 < config.sizes.size(); ++i)
    if (config.sizes[i] >= config.sizes[i + 1])
      throw std::invalid_argument("run_suite: sizes must be strictly increasing");
  SuiteResult res;
  if (config.family == "convergence")
    res = run_convergence(config);
  else if (config.family == "flow")
    res = run_flow(config);
  else if (config.family == "mosco-spectral")
    res = run_mosco_spectral(config);
  else
    throw std::invalid_argument("run_suite: unknown family " + config.family);
  if (!config.out_dir.empty()) {
    const std::string p = config.out_dir + "/" + config.family + "_summary.json";
    io::write_file(p, res.summary_json);
    res.artifact_paths.push_back(p);
  }
  return res;
}

}  // namespace mmgeo::lab
