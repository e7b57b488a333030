#include "mmgeo/transport.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <vector>

#include "mmgeo/parallel.hpp"

namespace mmgeo::transport {

double Coupling::max_marginal_error() const {
  double err = 0.0;
  for (Eigen::Index i = 0; i < plan.rows(); ++i)
    err = std::max(err, std::abs(plan.row(i).sum() - mu(i)));
  for (Eigen::Index j = 0; j < plan.cols(); ++j)
    err = std::max(err, std::abs(plan.col(j).sum() - nu(j)));
  return err;
}

CostSpec CostSpec::quadratic() {
  CostSpec s;
  s.kind = Kind::Quadratic;
  s.sup = std::numeric_limits<double>::infinity();
  return s;
}

CostSpec CostSpec::min1() {
  CostSpec s;
  s.kind = Kind::Concave;
  s.c = [](double d) { return std::min(d, 1.0); };
  s.sup = 1.0;
  return s;
}

CostSpec CostSpec::tanh_cost() {
  CostSpec s;
  s.kind = Kind::Concave;
  s.c = [](double d) { return std::tanh(d); };
  s.sup = 1.0;
  return s;
}

CostSpec CostSpec::parse(const std::string& name) {
  if (name == "min1") return min1();
  if (name == "tanh") return tanh_cost();
  throw std::invalid_argument("unknown cost spec: " + name);
}

double CostSpec::apply(double d) const {
  return kind == Kind::Quadratic ? d * d : c(d);
}

bool CostSpec::valid_on_grid(double r_max, int samples) const {
  if (kind == Kind::Quadratic) return true;
  if (!c) return false;
  if (std::abs(c(0.0)) > 1e-12) return false;
  double prev = 0.0;
  bool nonconstant = false;
  for (int i = 1; i < samples; ++i) {
    const double r = r_max * i / (samples - 1);
    const double v = c(r);
    if (v < prev - 1e-12) return false;               // monotone
    if (v > sup + 1e-9) return false;                 // bounded
    const double mid = c(0.5 * r);
    if (mid + 1e-12 < 0.5 * (c(0.0) + v)) return false;  // midpoint concavity
    if (std::abs(v - c(r_max)) > 1e-12) nonconstant = true;
    prev = v;
  }
  return nonconstant;
}

namespace {

// Transportation simplex over a dense cost matrix. Rows/cols of zero mass
// must already be stripped.
class TransportSimplex {
 public:
  TransportSimplex(const Eigen::VectorXd& mu, const Eigen::VectorXd& nu,
                   const Eigen::MatrixXd& cost)
      : mu_(mu), nu_(nu), c_(cost), m_(static_cast<int>(mu.size())),
        n_(static_cast<int>(nu.size())) {}

  void solve(Eigen::MatrixXd& plan, int& iterations) {
    plan = Eigen::MatrixXd::Zero(m_, n_);
    in_basis_.assign(static_cast<std::size_t>(m_) * n_, false);
    row_adj_.assign(m_, {});
    col_adj_.assign(n_, {});

    northwest_init(plan);

    const double rc_tol = 1e-12 * (1.0 + c_.cwiseAbs().maxCoeff());
    const long max_pivots = 2000L * (m_ + n_) * (m_ + n_) + 10000;
    long zero_streak = 0;
    bool bland = false;
    iterations = 0;

    std::vector<double> u(m_), v(n_);
    for (long pivot = 0; pivot < max_pivots; ++pivot) {
      compute_potentials(u, v);
      int ei = -1, ej = -1;
      double best = -rc_tol;
      for (int i = 0; i < m_ && (ei < 0 || !bland); ++i) {
        for (int j = 0; j < n_; ++j) {
          if (in_basis_[flat(i, j)]) continue;
          const double rc = c_(i, j) - u[i] - v[j];
          if (bland) {
            if (rc < -rc_tol) {
              ei = i;
              ej = j;
              break;
            }
          } else if (rc < best) {
            best = rc;
            ei = i;
            ej = j;
          }
        }
      }
      if (ei < 0) return;  // optimal
      ++iterations;

      const auto cycle = find_cycle(ei, ej);
      double theta = std::numeric_limits<double>::infinity();
      int leave = -1;  // index into cycle of the leaving (minus) cell
      for (std::size_t p = 1; p < cycle.size(); p += 2) {
        const double f = plan(cycle[p].first, cycle[p].second);
        if (f < theta - 1e-300 || (f <= theta && leave < 0)) {
          theta = f;
          leave = static_cast<int>(p);
        }
      }
      if (leave < 0) throw std::runtime_error("optimal_coupling: degenerate cycle");
      if (theta == 0.0) {
        if (++zero_streak > 3L * (m_ + n_)) bland = true;
      } else {
        zero_streak = 0;
      }
      for (std::size_t p = 0; p < cycle.size(); ++p) {
        auto [i, j] = cycle[p];
        if (p % 2 == 0)
          plan(i, j) += theta;
        else
          plan(i, j) = std::max(0.0, plan(i, j) - theta);
      }
      basis_remove(cycle[leave].first, cycle[leave].second);
      basis_add(ei, ej);
    }
    throw std::runtime_error("optimal_coupling: pivot limit exceeded");
  }

 private:
  std::size_t flat(int i, int j) const { return static_cast<std::size_t>(i) * n_ + j; }

  void basis_add(int i, int j) {
    in_basis_[flat(i, j)] = true;
    row_adj_[i].push_back(j);
    col_adj_[j].push_back(i);
  }
  void basis_remove(int i, int j) {
    in_basis_[flat(i, j)] = false;
    auto& r = row_adj_[i];
    r.erase(std::find(r.begin(), r.end(), j));
    auto& c = col_adj_[j];
    c.erase(std::find(c.begin(), c.end(), i));
  }

  void northwest_init(Eigen::MatrixXd& plan) {
    std::vector<double> ru(mu_.data(), mu_.data() + m_);
    std::vector<double> cv(nu_.data(), nu_.data() + n_);
    int i = 0, j = 0;
    while (i < m_ && j < n_) {
      const double t = std::min(ru[i], cv[j]);
      plan(i, j) = t;
      basis_add(i, j);
      ru[i] -= t;
      cv[j] -= t;
      if (i == m_ - 1 && j == n_ - 1) break;
      // on ties advance only one side to keep m+n-1 basis cells
      if (ru[i] <= cv[j] && i < m_ - 1)
        ++i;
      else if (j < n_ - 1)
        ++j;
      else
        ++i;
    }
  }

  // potentials from the basis tree: u_i + v_j = c_ij on basis cells
  void compute_potentials(std::vector<double>& u, std::vector<double>& v) {
    std::vector<char> useen(m_, 0), vseen(n_, 0);
    std::deque<int> queue;  // rows: [0, m), cols: m + j
    u[0] = 0.0;
    useen[0] = 1;
    queue.push_back(0);
    while (!queue.empty()) {
      const int node = queue.front();
      queue.pop_front();
      if (node < m_) {
        for (int j : row_adj_[node])
          if (!vseen[j]) {
            v[j] = c_(node, j) - u[node];
            vseen[j] = 1;
            queue.push_back(m_ + j);
          }
      } else {
        const int j = node - m_;
        for (int i : col_adj_[j])
          if (!useen[i]) {
            u[i] = c_(i, j) - v[j];
            useen[i] = 1;
            queue.push_back(i);
          }
      }
    }
    for (int i = 0; i < m_; ++i)
      if (!useen[i]) throw std::runtime_error("optimal_coupling: basis not spanning");
    for (int j = 0; j < n_; ++j)
      if (!vseen[j]) throw std::runtime_error("optimal_coupling: basis not spanning");
  }

  // unique tree path row ei -> col ej; returned as the pivot cycle cell list,
  // starting with the entering cell (plus sign), alternating signs after.
  std::vector<std::pair<int, int>> find_cycle(int ei, int ej) {
    const int nn = m_ + n_;
    std::vector<int> parent(nn, -2);
    std::deque<int> queue;
    parent[ei] = -1;
    queue.push_back(ei);
    while (!queue.empty()) {
      const int node = queue.front();
      queue.pop_front();
      if (node == m_ + ej) break;
      if (node < m_) {
        for (int j : row_adj_[node])
          if (parent[m_ + j] == -2) {
            parent[m_ + j] = node;
            queue.push_back(m_ + j);
          }
      } else {
        const int j = node - m_;
        for (int i : col_adj_[j])
          if (parent[i] == -2) {
            parent[i] = node;
            queue.push_back(i);
          }
      }
    }
    if (parent[m_ + ej] == -2) throw std::runtime_error("optimal_coupling: cycle not found");
    // walk back from col ej to row ei collecting tree cells
    std::vector<int> path;  // node sequence col ej ... row ei
    for (int node = m_ + ej; node != -1; node = parent[node]) path.push_back(node);
    // cells along the path: consecutive (row, col) node pairs
    std::vector<std::pair<int, int>> cycle;
    cycle.emplace_back(ei, ej);  // entering, sign +
    for (std::size_t p = 0; p + 1 < path.size(); ++p) {
      const int a = path[p], b = path[p + 1];
      if (a >= m_)
        cycle.emplace_back(b, a - m_);
      else
        cycle.emplace_back(a, b - m_);
    }
    return cycle;
  }

  const Eigen::VectorXd& mu_;
  const Eigen::VectorXd& nu_;
  const Eigen::MatrixXd& c_;
  int m_, n_;
  std::vector<bool> in_basis_;
  std::vector<std::vector<int>> row_adj_, col_adj_;
};

}  // namespace

OtResult optimal_coupling(const Eigen::VectorXd& mu, const Eigen::VectorXd& nu,
                          const Eigen::MatrixXd& cost) {
  if (mu.size() != cost.rows() || nu.size() != cost.cols())
    throw std::invalid_argument("optimal_coupling: size mismatch");
  if (mu.minCoeff() < 0.0 || nu.minCoeff() < 0.0)
    throw std::invalid_argument("optimal_coupling: negative marginal");
  if (std::abs(mu.sum() - nu.sum()) > 1e-8)
    throw std::invalid_argument("optimal_coupling: marginal totals differ");

  // strip zero-mass rows/cols, reinserted as zero rows afterwards
  std::vector<int> ri, cj;
  for (int i = 0; i < mu.size(); ++i)
    if (mu(i) > 0.0) ri.push_back(i);
  for (int j = 0; j < nu.size(); ++j)
    if (nu(j) > 0.0) cj.push_back(j);

  OtResult out;
  out.coupling.mu = mu;
  out.coupling.nu = nu;
  out.coupling.plan = Eigen::MatrixXd::Zero(mu.size(), nu.size());
  if (ri.empty() || cj.empty()) return out;

  Eigen::VectorXd smu(ri.size()), snu(cj.size());
  Eigen::MatrixXd sc(ri.size(), cj.size());
  for (std::size_t a = 0; a < ri.size(); ++a) {
    smu(a) = mu(ri[a]);
    for (std::size_t b = 0; b < cj.size(); ++b) sc(a, b) = cost(ri[a], cj[b]);
  }
  for (std::size_t b = 0; b < cj.size(); ++b) snu(b) = nu(cj[b]);

  Eigen::MatrixXd plan;
  if (ri.size() == 1) {
    plan = snu.transpose();
  } else if (cj.size() == 1) {
    plan = smu;
  } else {
    TransportSimplex simplex(smu, snu, sc);
    simplex.solve(plan, out.iterations);
  }

  double value = 0.0;
  for (std::size_t a = 0; a < ri.size(); ++a)
    for (std::size_t b = 0; b < cj.size(); ++b) {
      out.coupling.plan(ri[a], cj[b]) = plan(a, b);
      value += plan(a, b) * sc(a, b);
    }
  out.value = value;
  return out;
}

double ot_value(const Eigen::VectorXd& mu, const Eigen::VectorXd& nu,
                const Eigen::MatrixXd& cost) {
  return optimal_coupling(mu, nu, cost).value;
}

namespace {
// canonical argument order keeps w2/wc exactly symmetric
bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i) < b(i)) return true;
    if (a(i) > b(i)) return false;
  }
  return false;
}
}  // namespace

double w2(const FinitePmmSpace& space, const Eigen::VectorXd& mu, const Eigen::VectorXd& nu) {
  const Eigen::VectorXd* p = &mu;
  const Eigen::VectorXd* q = &nu;
  if (lex_less(nu, mu)) std::swap(p, q);
  const Eigen::MatrixXd cost = space.dist.array().square();
  return std::sqrt(std::max(0.0, ot_value(*p, *q, cost)));
}

double wc(const FinitePmmSpace& space, const Eigen::VectorXd& mu, const Eigen::VectorXd& nu,
          const CostSpec& cost) {
  if (cost.kind != CostSpec::Kind::Concave)
    throw std::invalid_argument("wc: concave cost required");
  const Eigen::VectorXd* p = &mu;
  const Eigen::VectorXd* q = &nu;
  if (lex_less(nu, mu)) std::swap(p, q);
  const Eigen::MatrixXd cm = par::map_matrix(space.dist, cost.c);
  return ot_value(*p, *q, cm);
}

double tail_second_moment(const FinitePmmSpace& space, const Eigen::VectorXd& mu, double R) {
  if (R < 0.0) throw std::invalid_argument("tail_second_moment: R must be >= 0");
  double acc = 0.0;
  for (int i = 0; i < space.n(); ++i) {
    const double d = space.dist(i, space.base);
    if (d > R) acc += d * d * mu(i);
  }
  return acc;
}

}  // namespace mmgeo::transport
