#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "mmgeo/gromov.hpp"
#include "mmgeo/lp.hpp"
#include "mmgeo/parallel.hpp"
#include "mmgeo/rng.hpp"

namespace mmgeo::gromov {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// ---- cross-metric polytope helpers ----

// feasible interval for C(i,j) with every other entry held fixed
std::pair<double, double> coordinate_interval(const MatrixXd& d1, const MatrixXd& d2,
                                              const MatrixXd& C, int i, int j) {
  double lo = 0.0;
  double up = std::numeric_limits<double>::infinity();
  for (int i2 = 0; i2 < d1.rows(); ++i2) {
    if (i2 == i) continue;
    lo = std::max(lo, d1(i, i2) - C(i2, j));
    lo = std::max(lo, C(i2, j) - d1(i, i2));
    up = std::min(up, C(i2, j) + d1(i, i2));
  }
  for (int j2 = 0; j2 < d2.rows(); ++j2) {
    if (j2 == j) continue;
    lo = std::max(lo, d2(j, j2) - C(i, j2));
    lo = std::max(lo, C(i, j2) - d2(j, j2));
    up = std::min(up, C(i, j2) + d2(j, j2));
  }
  return {lo, up};
}

// minimize sum w_ij C_ij over the cross-metric polytope (LP step of the
// alternation); weights come from the linearized transport objective
MatrixXd lp_cross_step(const MatrixXd& d1, const MatrixXd& d2, const MatrixXd& w,
                       double box_bound) {
  const int n1 = static_cast<int>(d1.rows());
  const int n2 = static_cast<int>(d2.rows());
  const int nv = n1 * n2;
  auto var = [n2](int i, int j) { return i * n2 + j; };

  struct Entry {
    int row, col;
    double value;
  };
  std::vector<Entry> trip;
  std::vector<double> rhs;
  auto add_row = [&](int a, double ca, int b, double cb, double bound) {
    const int r = static_cast<int>(rhs.size());
    trip.push_back({r, a, ca});
    trip.push_back({r, b, cb});
    rhs.push_back(bound);
  };
  for (int j = 0; j < n2; ++j)
    for (int i = 0; i < n1; ++i)
      for (int i2 = i + 1; i2 < n1; ++i2) {
        const double d = d1(i, i2);
        add_row(var(i, j), -1.0, var(i2, j), -1.0, -d);  // sum >= d
        add_row(var(i, j), 1.0, var(i2, j), -1.0, d);    // diff <= d
        add_row(var(i, j), -1.0, var(i2, j), 1.0, d);
      }
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j)
      for (int j2 = j + 1; j2 < n2; ++j2) {
        const double d = d2(j, j2);
        add_row(var(i, j), -1.0, var(i, j2), -1.0, -d);
        add_row(var(i, j), 1.0, var(i, j2), -1.0, d);
        add_row(var(i, j), -1.0, var(i, j2), 1.0, d);
      }
  // box keeps the problem bounded where weights vanish
  for (int v = 0; v < nv; ++v) {
    const int r = static_cast<int>(rhs.size());
    trip.push_back({r, v, 1.0});
    rhs.push_back(box_bound);
  }

  lp::Problem p;
  p.c.resize(nv);
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j) p.c(var(i, j)) = w(i, j);
  p.A = MatrixXd::Zero(static_cast<int>(rhs.size()), nv);
  for (const auto& t : trip) p.A(t.row, t.col) = t.value;
  p.b = Eigen::Map<const VectorXd>(rhs.data(), static_cast<Eigen::Index>(rhs.size()));

  auto sol = lp::solve(p);
  if (!sol.optimal) return MatrixXd();  // caller falls back to gluing
  MatrixXd C(n1, n2);
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j) C(i, j) = sol.x(var(i, j));
  return C;
}

struct EmbeddingProblem {
  const FinitePmmSpace& a;  // support-restricted, probability masses
  const FinitePmmSpace& b;
  bool squared_cost = false;                     // true: W2 variant (value sqrt'ed)
  const transport::CostSpec* concave = nullptr;  // concave variant

  MatrixXd cost_of(const MatrixXd& C) const {
    if (squared_cost) return C.array().square();
    return par::map_matrix_serial(C, concave->c);
  }

  // objective cross(base) + W(cost)
  double value_of(const MatrixXd& C) const {
    const double t = transport::ot_value(a.mass, b.mass, cost_of(C));
    return C(a.base, b.base) + (squared_cost ? std::sqrt(std::max(0.0, t)) : t);
  }

  MatrixXd ot_plan(const MatrixXd& C) const {
    return transport::optimal_coupling(a.mass, b.mass, cost_of(C)).coupling.plan;
  }
};

// cross matrix from a subset of coupling links (same construction as
// glue_by_coupling, with the slack taken over the kept links only)
MatrixXd glue_links(const FinitePmmSpace& a, const FinitePmmSpace& b,
                    const std::vector<std::pair<int, int>>& link) {
  double distortion = 0.0;
  for (std::size_t p = 0; p < link.size(); ++p)
    for (std::size_t q = p; q < link.size(); ++q)
      distortion = std::max(distortion, std::abs(a.dist(link[p].first, link[q].first) -
                                                 b.dist(link[p].second, link[q].second)));
  const double eta = 0.5 * distortion;
  MatrixXd cross(a.n(), b.n());
  for (int i = 0; i < a.n(); ++i)
    for (int j = 0; j < b.n(); ++j) {
      double bestv = std::numeric_limits<double>::infinity();
      for (const auto& [ii, jj] : link)
        bestv = std::min(bestv, a.dist(i, ii) + eta + b.dist(jj, j));
      cross(i, j) = bestv;
    }
  return cross;
}

// candidate glues along the plan support: the full support plus supports
// pruned to their low-distortion cores. A global slack pays for the worst
// link pair, so dropping a few high-distortion links (and letting transport
// carry their mass instead) often wins.
std::vector<MatrixXd> glue_candidates(const FinitePmmSpace& a, const FinitePmmSpace& b,
                                      const MatrixXd& plan) {
  std::vector<std::pair<int, int>> link;
  std::vector<double> mass;
  const double thresh = 1e-15 * std::max(1e-300, plan.maxCoeff());
  for (int i = 0; i < a.n(); ++i)
    for (int j = 0; j < b.n(); ++j)
      if (plan(i, j) > thresh) {
        link.emplace_back(i, j);
        mass.push_back(plan(i, j));
      }
  // cap the link count by coupling mass
  const std::size_t cap = 4 * static_cast<std::size_t>(a.n() + b.n());
  if (link.size() > cap) {
    std::vector<std::size_t> order(link.size());
    for (std::size_t t = 0; t < order.size(); ++t) order[t] = t;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return mass[x] > mass[y]; });
    std::vector<std::pair<int, int>> kept;
    for (std::size_t t = 0; t < cap; ++t) kept.push_back(link[order[t]]);
    link.swap(kept);
  }
  std::vector<MatrixXd> out;
  if (link.empty()) return out;
  out.push_back(glue_links(a, b, link));

  const std::size_t L = link.size();
  double eta_full = 0.0;
  for (std::size_t p = 0; p < L; ++p)
    for (std::size_t q = p; q < L; ++q)
      eta_full = std::max(eta_full, std::abs(a.dist(link[p].first, link[q].first) -
                                             b.dist(link[p].second, link[q].second)));
  if (eta_full <= 1e-12) return out;  // already isometric

  // core 1..3: links whose base profiles agree within a quantile; isometric
  // embeddings preserve base distances, so incompatible links are the ones a
  // good embedding routes through transport instead
  std::vector<double> profile_gap(L);
  for (std::size_t p = 0; p < L; ++p)
    profile_gap[p] = std::abs(a.dist(link[p].first, a.base) - b.dist(link[p].second, b.base));
  std::vector<double> sorted_gap = profile_gap;
  std::sort(sorted_gap.begin(), sorted_gap.end());
  for (double q : {1e-9, sorted_gap[L / 2], sorted_gap[(9 * L) / 10]}) {
    std::vector<std::pair<int, int>> core;
    for (std::size_t p = 0; p < L; ++p)
      if (profile_gap[p] <= q) core.push_back(link[p]);
    if (core.empty() || core.size() == L) continue;
    out.push_back(glue_links(a, b, core));
  }

  // core 4: drop links that participate in disproportionately many
  // high-distortion pairs (outlier removal by incidence count)
  {
    std::vector<int> count(L, 0);
    const double high = 0.5 * eta_full;
    long pairs = 0;
    for (std::size_t p = 0; p < L; ++p)
      for (std::size_t q = p + 1; q < L; ++q) {
        const double gap = std::abs(a.dist(link[p].first, link[q].first) -
                                    b.dist(link[p].second, link[q].second));
        if (gap > high) {
          ++count[p];
          ++count[q];
          ++pairs;
        }
      }
    if (pairs > 0) {
      const double avg = 2.0 * pairs / static_cast<double>(L);
      std::vector<std::pair<int, int>> core;
      for (std::size_t p = 0; p < L; ++p)
        if (count[p] <= 2.0 * avg) core.push_back(link[p]);
      if (!core.empty() && core.size() < L) out.push_back(glue_links(a, b, core));
    }
  }
  // single best-mass link glues with zero slack
  out.push_back(glue_links(a, b, {link.front()}));
  return out;
}

// one alternation run from a starting cross matrix; returns best value found
double alternate(const EmbeddingProblem& prob, MatrixXd C, int rounds, bool use_lp,
                 MatrixXd* best_cross = nullptr) {
  double best = prob.value_of(C);
  MatrixXd bestC = C;
  const double box = prob.a.dist.maxCoeff() + prob.b.dist.maxCoeff() + 1.0;
  for (int r = 0; r < rounds; ++r) {
    const MatrixXd plan = prob.ot_plan(C);
    bool improved = false;
    // candidates: glues along the (possibly pruned) plan support
    for (const auto& cand : glue_candidates(prob.a, prob.b, plan)) {
      const double v = prob.value_of(cand);
      if (v < best - 1e-14) {
        best = v;
        bestC = cand;
        C = cand;
        improved = true;
      }
    }
    // candidate 2: LP on the linearized cost (concave variant only)
    if (use_lp && !prob.squared_cost) {
      MatrixXd w(plan.rows(), plan.cols());
      for (Eigen::Index i = 0; i < plan.rows(); ++i)
        for (Eigen::Index j = 0; j < plan.cols(); ++j) {
          // subgradient of c at the current cross value
          const double h = 1e-6;
          const double slope =
              (prob.concave->c(C(i, j) + h) - prob.concave->c(std::max(0.0, C(i, j) - h))) /
              (C(i, j) + h - std::max(0.0, C(i, j) - h));
          w(i, j) = plan(i, j) * std::max(slope, 0.0);
        }
      w(prob.a.base, prob.b.base) += 1.0;
      const MatrixXd lpC = lp_cross_step(prob.a.dist, prob.b.dist, w, box);
      if (lpC.size() > 0) {
        const double v = prob.value_of(lpC);
        if (v < best - 1e-14) {
          best = v;
          bestC = lpC;
          C = lpC;
          improved = true;
        }
      }
    }
    if (!improved) break;
  }
  if (best_cross) *best_cross = bestC;
  return best;
}

// local per-coordinate refinement of the cross matrix on the true objective
double refine_coordinates(const EmbeddingProblem& prob, MatrixXd C, double value, int sweeps) {
  const int n1 = static_cast<int>(C.rows());
  const int n2 = static_cast<int>(C.cols());
  for (int s = 0; s < sweeps; ++s) {
    bool improved = false;
    for (int i = 0; i < n1; ++i)
      for (int j = 0; j < n2; ++j) {
        const auto [lo, up] = coordinate_interval(prob.a.dist, prob.b.dist, C, i, j);
        if (!(lo <= up)) continue;
        const double saved = C(i, j);
        const double cap = lo + 2.0 * (prob.a.dist.maxCoeff() + prob.b.dist.maxCoeff() + 1.0);
        const double hi = std::min(up, cap);
        const int kSamples = 17;
        double local_best = value;
        double local_arg = saved;
        for (int t = 0; t <= kSamples; ++t) {
          const double cand = lo + (hi - lo) * t / kSamples;
          C(i, j) = cand;
          const double v = prob.value_of(C);
          if (v < local_best - 1e-14) {
            local_best = v;
            local_arg = cand;
          }
        }
        C(i, j) = local_arg;
        if (local_best < value - 1e-14) {
          value = local_best;
          improved = true;
        }
      }
    if (!improved) break;
  }
  return value;
}

// seed couplings for the multistart
std::vector<MatrixXd> seed_couplings(const FinitePmmSpace& a, const FinitePmmSpace& b,
                                     const SearchOptions& opt) {
  std::vector<MatrixXd> seeds;
  // base-distance-profile matching
  {
    MatrixXd cost(a.n(), b.n());
    for (int i = 0; i < a.n(); ++i)
      for (int j = 0; j < b.n(); ++j)
        cost(i, j) = std::abs(a.dist(i, a.base) - b.dist(j, b.base));
    seeds.push_back(transport::optimal_coupling(a.mass, b.mass, cost).coupling.plan);
  }
  // base-to-base pinch
  {
    MatrixXd pinch = MatrixXd::Zero(a.n(), b.n());
    pinch(a.base, b.base) = 1.0;
    seeds.push_back(pinch);
  }
  // isomorphism witness when cheaply available
  if (a.n() <= 8 && b.n() <= 8) {
    auto iso = is_isomorphic(a, b, {1e-9, 8});
    if (iso.outcome == IsoOutcome::Isomorphic) {
      MatrixXd w = MatrixXd::Zero(a.n(), b.n());
      for (auto [i, j] : iso.witness) w(i, j) = a.mass(i);
      seeds.push_back(w);
    }
  }
  // product coupling
  seeds.push_back(a.mass * b.mass.transpose());
  // random monotone rearrangements of shuffled indices
  Rng rng(opt.seed);
  while (static_cast<int>(seeds.size()) < opt.seeds) {
    std::vector<int> pa(a.n()), pb(b.n());
    for (int i = 0; i < a.n(); ++i) pa[i] = i;
    for (int j = 0; j < b.n(); ++j) pb[j] = j;
    for (int i = a.n() - 1; i > 0; --i) std::swap(pa[i], pa[rng.below(i + 1)]);
    for (int j = b.n() - 1; j > 0; --j) std::swap(pb[j], pb[rng.below(j + 1)]);
    MatrixXd plan = MatrixXd::Zero(a.n(), b.n());
    int i = 0, j = 0;
    double ru = a.mass(pa[0]), cv = b.mass(pb[0]);
    while (true) {
      const double t = std::min(ru, cv);
      plan(pa[i], pb[j]) += t;
      ru -= t;
      cv -= t;
      if (ru <= cv && i + 1 < a.n()) {
        ru = a.mass(pa[++i]);
      } else if (j + 1 < b.n()) {
        cv = b.mass(pb[++j]);
      } else if (i + 1 < a.n()) {
        ru = a.mass(pa[++i]);
      } else {
        break;
      }
    }
    seeds.push_back(plan);
  }
  return seeds;
}

// shared multistart driver; returns the embedding infimum estimate
double embedding_search(const EmbeddingProblem& prob, const SearchOptions& opt, bool use_lp,
                        bool refine) {
  const auto seeds = seed_couplings(prob.a, prob.b, opt);
  double best = std::numeric_limits<double>::infinity();
  MatrixXd bestC;
  for (const auto& plan : seeds) {
    GluedSpace g = glue_by_coupling(prob.a, prob.b, plan);
    MatrixXd C;
    const double v = alternate(prob, g.cross, opt.rounds, use_lp, &C);
    if (v < best) {
      best = v;
      bestC = C;
    }
  }
  // the base-anchored cross matrix is feasible on its own
  {
    MatrixXd C(prob.a.n(), prob.b.n());
    for (int i = 0; i < prob.a.n(); ++i)
      for (int j = 0; j < prob.b.n(); ++j)
        C(i, j) = prob.a.dist(i, prob.a.base) + prob.b.dist(prob.b.base, j);
    MatrixXd Cout;
    const double v = alternate(prob, C, opt.rounds, use_lp, &Cout);
    if (v < best) {
      best = v;
      bestC = Cout;
    }
  }
  if (refine && opt.refine_coordinates && bestC.size() > 0)
    best = refine_coordinates(prob, bestC, best, 3);
  return best;
}

// W2 on the real line between weighted atom lists (quantile coupling)
double line_w2(std::vector<std::pair<double, double>> x,
               std::vector<std::pair<double, double>> y) {
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  double acc = 0.0;
  std::size_t i = 0, j = 0;
  double wi = i < x.size() ? x[i].second : 0.0;
  double wj = j < y.size() ? y[j].second : 0.0;
  while (i < x.size() && j < y.size()) {
    const double t = std::min(wi, wj);
    const double d = x[i].first - y[j].first;
    acc += t * d * d;
    wi -= t;
    wj -= t;
    if (wi <= 0.0 && ++i < x.size()) wi = x[i].second;
    if (wj <= 0.0 && ++j < y.size()) wj = y[j].second;
  }
  return std::sqrt(std::max(0.0, acc));
}

std::vector<std::pair<double, double>> base_distance_law(const FinitePmmSpace& s) {
  std::vector<std::pair<double, double>> law;
  for (int i = 0; i < s.n(); ++i)
    if (s.mass(i) > 0.0) law.emplace_back(s.dist(i, s.base), s.mass(i));
  return law;
}

// canonical order for exact symmetry of the two-space searches
bool canonical_before(const FinitePmmSpace& a, const FinitePmmSpace& b) {
  if (a.n() != b.n()) return a.n() < b.n();
  for (int i = 0; i < a.n(); ++i) {
    if (a.mass(i) != b.mass(i)) return a.mass(i) < b.mass(i);
    for (int j = 0; j < a.n(); ++j)
      if (a.dist(i, j) != b.dist(i, j)) return a.dist(i, j) < b.dist(i, j);
  }
  return a.base <= b.base;
}

}  // namespace

double dpsi_upper(const FinitePmmSpace& a_in, const FinitePmmSpace& b_in, const WeightSpec& psi,
                  const SearchOptions& opt) {
  require_valid(a_in, "dpsi_upper");
  require_valid(b_in, "dpsi_upper");
  auto ra = reweight(support_restrict(a_in), psi);
  auto rb = reweight(support_restrict(b_in), psi);
  const double log_term = std::abs(std::log(ra.z) - std::log(rb.z));
  const bool swap = !canonical_before(ra.space, rb.space);
  const FinitePmmSpace& a = swap ? rb.space : ra.space;
  const FinitePmmSpace& b = swap ? ra.space : rb.space;
  EmbeddingProblem prob{a, b, true, nullptr};
  return log_term + embedding_search(prob, opt, false, opt.refine_coordinates);
}

double dpsi_lower(const FinitePmmSpace& a_in, const FinitePmmSpace& b_in, const WeightSpec& psi) {
  require_valid(a_in, "dpsi_lower");
  require_valid(b_in, "dpsi_lower");
  auto ra = reweight(support_restrict(a_in), psi);
  auto rb = reweight(support_restrict(b_in), psi);
  const double log_term = std::abs(std::log(ra.z) - std::log(rb.z));
  // isometries fix base distances, so the embedded W2 plus the base gap
  // dominates the W2 between the base-distance laws on the line
  return log_term + line_w2(base_distance_law(ra.space), base_distance_law(rb.space));
}

DistanceBracket pgw_fm(const FinitePmmSpace& a_in, const FinitePmmSpace& b_in,
                       const PgwOptions& opt) {
  const FinitePmmSpace sa = support_restrict(a_in);
  const FinitePmmSpace sb = support_restrict(b_in);
  const double Ma = sa.total_mass(), Mb = sb.total_mass();
  if (Ma <= 0.0 || Mb <= 0.0) throw std::invalid_argument("pgw_fm: zero total mass");
  if (opt.mode == PgwMode::ExactTiny &&
      (sa.n() > opt.exact_tiny_cap || sb.n() > opt.exact_tiny_cap))
    throw std::invalid_argument("pgw_fm: exact-tiny mode capped at " +
                                std::to_string(opt.exact_tiny_cap) + " support points");
  const double log_term = std::abs(std::log(Ma) - std::log(Mb));

  FinitePmmSpace na = sa, nb = sb;
  na.mass /= Ma;
  nb.mass /= Mb;
  const bool swap = !canonical_before(na, nb);
  const FinitePmmSpace& a = swap ? nb : na;
  const FinitePmmSpace& b = swap ? na : nb;

  DistanceBracket out;
  out.lower_method = "base-distance-law transport";
  // lower bound: 1-D W_c of base-distance laws (costs c with slope <= 1,
  // which holds for the built-in specs)
  {
    auto la = base_distance_law(a);
    auto lb = base_distance_law(b);
    VectorXd mu(la.size()), nu(lb.size());
    MatrixXd cost(la.size(), lb.size());
    for (std::size_t i = 0; i < la.size(); ++i) {
      mu(i) = la[i].second;
      for (std::size_t j = 0; j < lb.size(); ++j)
        cost(i, j) = opt.cost.c(std::abs(la[i].first - lb[j].first));
    }
    for (std::size_t j = 0; j < lb.size(); ++j) nu(j) = lb[j].second;
    out.lower = log_term + transport::ot_value(mu, nu, cost);
  }

  EmbeddingProblem prob{a, b, false, &opt.cost};
  const bool tiny = opt.mode == PgwMode::ExactTiny;
  SearchOptions search = opt.search;
  if (tiny) {
    search.seeds = std::max(search.seeds, 8);
    search.rounds = std::max(search.rounds, 20);
  }
  out.upper = log_term + embedding_search(prob, search, tiny, tiny || search.refine_coordinates);
  out.upper_method = tiny ? "multistart alternation + refinement" : "coupling-glue search";
  if (out.upper < out.lower) {
    // both are valid bounds; order can invert only by solver tolerance
    if (out.upper < out.lower - 1e-9) out.lower = out.upper;
    else out.lower = std::min(out.lower, out.upper);
  }
  return out;
}

namespace {

FinitePmmSpace zero_distance_core(const FinitePmmSpace& s) {
  // limit of the dyadic rescalings from below: only points at base distance 0
  FinitePmmSpace out = s;
  for (int i = 0; i < s.n(); ++i)
    if (s.dist(i, s.base) > 0.0) out.mass(i) = 0.0;
  return out;
}

}  // namespace

DistanceBracket pgw(const FinitePmmSpace& a, const FinitePmmSpace& b, const PgwSumOptions& opt) {
  require_valid(a, "pgw");
  require_valid(b, "pgw");
  int k_min = opt.k_min, k_max = opt.k_max;
  const FinitePmmSpace sa = support_restrict(a), sb = support_restrict(b);
  const double rmin = std::min(sa.min_positive_base_dist(), sb.min_positive_base_dist());
  const double dmax = std::max(sa.radius_from_base(), sb.radius_from_base());
  int stab_low, stab_high;
  if (std::isfinite(rmin)) {
    stab_low = static_cast<int>(std::floor(std::log2(rmin))) - 1;
    stab_high = dmax > 0 ? static_cast<int>(std::ceil(std::log2(dmax))) : 0;
  } else {
    stab_low = 0;
    stab_high = 0;
  }
  if (opt.auto_range) {
    k_min = std::min(0, stab_low);
    k_max = std::max(0, stab_high + 1);
  }
  if (k_min > 0 || k_max < 0) throw std::invalid_argument("pgw: need k_min <= 0 <= k_max");

  DistanceBracket out;
  out.lower_method = "dyadic sum of per-k lower bounds";
  out.upper_method = "dyadic sum of per-k upper bounds + tails";
  for (int k = k_min; k <= k_max; ++k) {
    const auto ak = cutoff_rescale(a, k);
    const auto bk = cutoff_rescale(b, k);
    const auto br = pgw_fm(ak, bk, opt.per_k);
    const double w = std::ldexp(1.0, -std::abs(k));
    out.lower += w * std::min(1.0, br.lower);
    out.upper += w * std::min(1.0, br.upper);
  }
  // below k_min the rescaled masses stabilize to the zero-base-distance core;
  // above k_max they equal the full masses. When the requested range reaches
  // the stabilization scales the geometric tails are exact, otherwise the
  // upper bound absorbs a conservative tail.
  const double below_weight = std::ldexp(1.0, k_min);        // sum_{k < k_min} 2^-|k|
  const double above_weight = std::ldexp(1.0, -k_max);       // sum_{k > k_max} 2^-k
  if (k_min <= stab_low) {
    const auto t = pgw_fm(zero_distance_core(sa), zero_distance_core(sb), opt.per_k);
    out.lower += below_weight * std::min(1.0, t.lower);
    out.upper += below_weight * std::min(1.0, t.upper);
  } else {
    out.upper += below_weight;
  }
  if (k_max >= stab_high) {
    const auto t = pgw_fm(sa, sb, opt.per_k);
    out.lower += above_weight * std::min(1.0, t.lower);
    out.upper += above_weight * std::min(1.0, t.upper);
  } else {
    out.upper += above_weight;
  }
  return out;
}

}  // namespace mmgeo::gromov
