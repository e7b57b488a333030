#include <CLI11.hpp>
#include <cmath>
#include <iostream>

#include "mmgeo/entropy_flow.hpp"
#include "mmgeo/gromov.hpp"
#include "mmgeo/io.hpp"
#include "mmgeo/lab.hpp"
#include "mmgeo/parallel.hpp"
#include "mmgeo/spectral.hpp"

using namespace mmgeo;

namespace {

Eigen::VectorXd parse_start(const std::string& spec, const FinitePmmSpace& space) {
  if (spec == "uniform") {
    Eigen::VectorXd mu = space.mass;
    return mu / mu.sum();
  }
  if (spec.rfind("dirac:", 0) == 0) {
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(space.n());
    mu(std::stoi(spec.substr(6))) = 1.0;
    return mu;
  }
  if (spec.rfind("file:", 0) == 0) {
    Eigen::VectorXd mu = io::load_vector(spec.substr(5));
    return mu / mu.sum();
  }
  throw std::invalid_argument("unknown start spec: " + spec);
}

void emit(const std::string& out, const std::string& content) {
  if (out.empty())
    std::cout << content;
  else
    io::write_file(out, content);
}

std::string bracket_json(const gromov::DistanceBracket& b) {
  std::ostringstream os;
  os << "{\"lower\": " << io::format_double(b.lower)
     << ", \"upper\": " << io::format_double(b.upper) << ", \"lower_method\": \""
     << b.lower_method << "\", \"upper_method\": \"" << b.upper_method << "\"}\n";
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mmgeo: numerics for finite pointed metric measure spaces"};
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  double tol = 1e-9;
  std::string out, format = "csv";
  app.add_option("--seed", seed, "global RNG seed");
  app.add_option("--tol", tol, "tolerance override");
  app.add_option("--out", out, "output path (stdout when empty)");
  app.add_option("--format", format, "csv or json");

  // validate
  std::string space_path, a_path, b_path, mu_path, nu_path;
  auto* c_validate = app.add_subcommand("validate", "check space invariants");
  c_validate->add_option("--space", space_path)->required();

  // transport
  auto* c_w2 = app.add_subcommand("w2", "quadratic transport distance");
  c_w2->add_option("--space", space_path)->required();
  c_w2->add_option("--mu", mu_path)->required();
  c_w2->add_option("--nu", nu_path)->required();
  std::string cost_name = "min1";
  auto* c_wc = app.add_subcommand("wc", "bounded-cost transport distance");
  c_wc->add_option("--space", space_path)->required();
  c_wc->add_option("--mu", mu_path)->required();
  c_wc->add_option("--nu", nu_path)->required();
  c_wc->add_option("--cost", cost_name, "min1 | tanh");
  double sink_eps = 0.01;
  int sink_iters = 10000;
  auto* c_sink = app.add_subcommand("sinkhorn", "entropic transport value");
  c_sink->add_option("--space", space_path)->required();
  c_sink->add_option("--mu", mu_path)->required();
  c_sink->add_option("--nu", nu_path)->required();
  c_sink->add_option("--eps", sink_eps);
  c_sink->add_option("--max-iter", sink_iters);

  // gromov
  std::string psi_name = "cubic-tail";
  int seeds = 8;
  std::string mode_name = "bracket", krange;
  auto* c_dpsi = app.add_subcommand("dpsi", "weighted pointed distance bracket");
  c_dpsi->add_option("--a", a_path)->required();
  c_dpsi->add_option("--b", b_path)->required();
  c_dpsi->add_option("--psi", psi_name, "const | cubic-tail | gauss:C");
  c_dpsi->add_option("--seeds", seeds);
  auto* c_pgw = app.add_subcommand("pgw", "pointed Gromov-weak distance bracket");
  c_pgw->add_option("--a", a_path)->required();
  c_pgw->add_option("--b", b_path)->required();
  c_pgw->add_option("--mode", mode_name, "exact-tiny | bracket");
  c_pgw->add_option("--cost", cost_name, "min1 | tanh");
  c_pgw->add_option("--k-range", krange, "kmin:kmax (default automatic)");
  c_pgw->add_option("--seeds", seeds);
  int order = 2;
  auto* c_cyl = app.add_subcommand("cyl", "cylindrical discrepancy");
  c_cyl->add_option("--a", a_path)->required();
  c_cyl->add_option("--b", b_path)->required();
  c_cyl->add_option("--order", order);
  c_cyl->add_option("--cost", cost_name);
  int max_order = 3;
  auto* c_recon = app.add_subcommand("recon", "reconstruction comparison");
  c_recon->add_option("--a", a_path)->required();
  c_recon->add_option("--b", b_path)->required();
  c_recon->add_option("--max-order", max_order);

  // flow
  std::string start_spec = "uniform";
  double tau = 1e-2, T = 0.1, eps_graph_r = 0.0;
  auto* c_jko = app.add_subcommand("jko", "entropy minimizing-movement flow");
  c_jko->add_option("--space", space_path)->required();
  c_jko->add_option("--start", start_spec, "dirac:i | uniform | file:path");
  c_jko->add_option("--tau", tau);
  c_jko->add_option("--T", T);
  c_jko->add_option("--eps-graph", eps_graph_r, "neighborhood radius (default: 1.5 min gap)");

  // spectral
  int k_eigs = 6, k_steps = 16;
  double heat_t = 0.1;
  std::string f_path, heat_mode = "resolvent";
  auto* c_spec = app.add_subcommand("spectrum", "Laplacian eigenvalues");
  c_spec->add_option("--space", space_path)->required();
  c_spec->add_option("--eps-graph", eps_graph_r);
  c_spec->add_option("--k", k_eigs);
  auto* c_heat = app.add_subcommand("heat", "heat semigroup action");
  c_heat->add_option("--space", space_path)->required();
  c_heat->add_option("--eps-graph", eps_graph_r);
  c_heat->add_option("--f", f_path)->required();
  c_heat->add_option("--t", heat_t);
  c_heat->add_option("--k-steps", k_steps);
  c_heat->add_option("--mode", heat_mode, "resolvent | spectral");

  std::vector<int> sizes;
  auto* c_mosco = app.add_subcommand("mosco", "Mosco diagnostic on the circle ladder");
  c_mosco->add_option("--sizes", sizes)->delimiter(',');
  auto* c_eig = app.add_subcommand("eigconv", "eigenvalue table on the circle ladder");
  c_eig->add_option("--sizes", sizes)->delimiter(',');
  c_eig->add_option("--k", k_eigs);

  auto* c_pmgh = app.add_subcommand("pmgh", "pointed mGH bracket");
  c_pmgh->add_option("--a", a_path)->required();
  c_pmgh->add_option("--b", b_path)->required();

  std::string suite_name = "convergence";
  auto* c_suite = app.add_subcommand("suite", "experiment suites");
  c_suite->add_option("--name", suite_name, "convergence | flow | mosco-spectral");
  c_suite->add_option("--sizes", sizes)->delimiter(',');

  CLI11_PARSE(app, argc, argv);
  par::set_threads(0);  // honor MMGEO_THREADS

  try {
    if (*c_validate) {
      const auto rep = validate(io::load_space(space_path));
      for (const auto& issue : rep.issues)
        std::cout << issue.what << " (i=" << issue.i << ", j=" << issue.j << ", k=" << issue.k
                  << ", value=" << issue.value << ")\n";
      std::cout << (rep.ok() ? "valid\n" : "invalid\n");
      return rep.ok() ? 0 : 1;
    }
    if (*c_w2 || *c_wc || *c_sink) {
      const auto space = io::load_space(space_path);
      const auto mu = io::load_vector(mu_path);
      const auto nu = io::load_vector(nu_path);
      if (*c_w2) {
        emit(out, io::format_double(transport::w2(space, mu, nu)) + "\n");
      } else if (*c_wc) {
        emit(out, io::format_double(
                      transport::wc(space, mu, nu, transport::CostSpec::parse(cost_name))) +
                      "\n");
      } else {
        const auto res = transport::sinkhorn(mu, nu, space.dist.array().square(), sink_eps,
                                             sink_iters);
        std::ostringstream os;
        os << "{\"value\": " << io::format_double(res.value)
           << ", \"converged\": " << (res.report.converged ? "true" : "false")
           << ", \"iterations\": " << res.report.iterations << "}\n";
        emit(out, os.str());
      }
      return 0;
    }
    if (*c_dpsi) {
      const auto a = io::load_space(a_path);
      const auto b = io::load_space(b_path);
      const auto psi = WeightSpec::parse(psi_name);
      gromov::SearchOptions sopt;
      sopt.seeds = seeds;
      sopt.seed = seed;
      gromov::DistanceBracket br;
      br.lower = gromov::dpsi_lower(a, b, psi);
      br.upper = gromov::dpsi_upper(a, b, psi, sopt);
      br.lower_method = "base-distance law";
      br.upper_method = "coupling-glue search";
      emit(out, bracket_json(br));
      return 0;
    }
    if (*c_pgw) {
      const auto a = io::load_space(a_path);
      const auto b = io::load_space(b_path);
      gromov::PgwSumOptions popt;
      popt.per_k.mode =
          mode_name == "exact-tiny" ? gromov::PgwMode::ExactTiny : gromov::PgwMode::Bracket;
      popt.per_k.cost = transport::CostSpec::parse(cost_name);
      popt.per_k.search.seeds = seeds;
      popt.per_k.search.seed = seed;
      if (!krange.empty()) {
        const auto colon = krange.find(':');
        popt.k_min = std::stoi(krange.substr(0, colon));
        popt.k_max = std::stoi(krange.substr(colon + 1));
        popt.auto_range = false;
      }
      emit(out, bracket_json(gromov::pgw(a, b, popt)));
      return 0;
    }
    if (*c_cyl) {
      const auto a = io::load_space(a_path);
      const auto b = io::load_space(b_path);
      emit(out, io::format_double(gromov::cyl_discrepancy(
                    a, b, order, transport::CostSpec::parse(cost_name))) +
                    "\n");
      return 0;
    }
    if (*c_recon) {
      const auto res = gromov::reconstruction_test(io::load_space(a_path),
                                                   io::load_space(b_path), max_order);
      std::ostringstream os;
      os << "{\"cyl_equal\": " << (res.cyl_equal_up_to_order ? "true" : "false")
         << ", \"first_differing_order\": " << res.first_differing_order << ", \"isomorphic\": "
         << (res.iso.outcome == IsoOutcome::Isomorphic
                 ? "true"
                 : res.iso.outcome == IsoOutcome::NotIsomorphic ? "false" : "\"undecided\"")
         << "}\n";
      emit(out, os.str());
      return 0;
    }
    if (*c_jko) {
      const auto space = io::load_space(space_path);
      const double r = eps_graph_r > 0 ? eps_graph_r : 1.5 * space.min_positive_base_dist();
      const auto graph = eps_graph(space, r);
      const auto mu0 = parse_start(start_spec, space);
      const auto trace = flow::jko_flow(mu0, tau, T, space, graph);
      emit(out, io::trace_to_csv(trace, flow::ede_residual(trace, graph)));
      return 0;
    }
    if (*c_spec) {
      const auto space = io::load_space(space_path);
      const double r = eps_graph_r > 0 ? eps_graph_r : 1.5 * space.min_positive_base_dist();
      spectral::LaplaceOperator op(eps_graph(space, r));
      const auto sp = spectral::spectrum(op, std::min(k_eigs, space.n()));
      std::ostringstream os;
      for (int i = 0; i < sp.eigenvalues.size(); ++i)
        os << io::format_double(sp.eigenvalues(i)) << "\n";
      emit(out, os.str());
      return 0;
    }
    if (*c_heat) {
      const auto space = io::load_space(space_path);
      const double r = eps_graph_r > 0 ? eps_graph_r : 1.5 * space.min_positive_base_dist();
      spectral::LaplaceOperator op(eps_graph(space, r));
      const auto f = io::load_vector(f_path);
      const auto mode = heat_mode == "spectral" ? spectral::HeatMode::SpectralExact
                                                : spectral::HeatMode::IteratedResolvent;
      const auto g = spectral::heat_semigroup(op, f, heat_t, k_steps, mode);
      std::ostringstream os;
      for (int i = 0; i < g.size(); ++i) os << io::format_double(g(i)) << "\n";
      emit(out, os.str());
      return 0;
    }
    if (*c_mosco || *c_eig) {
      lab::ExperimentConfig cfg;
      cfg.family = "mosco-spectral";
      cfg.sizes = sizes;
      cfg.seed = seed;
      cfg.out_dir = out;
      const auto res = lab::run_suite(cfg);
      std::cout << res.summary_json;
      return res.pass ? 0 : 1;
    }
    if (*c_pmgh) {
      const auto rep = lab::pmgh_compare(io::load_space(a_path), io::load_space(b_path));
      std::ostringstream os;
      os << "{\"lower\": " << io::format_double(rep.lower)
         << ", \"upper\": " << io::format_double(rep.upper)
         << ", \"bracket_only\": " << (rep.bracket_only ? "true" : "false") << "}\n";
      emit(out, os.str());
      return 0;
    }
    if (*c_suite) {
      lab::ExperimentConfig cfg;
      cfg.family = suite_name;
      cfg.sizes = sizes;
      cfg.seed = seed;
      cfg.out_dir = out;
      cfg.format = format;
      const auto res = lab::run_suite(cfg);
      std::cout << res.summary_json;
      return res.pass ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
