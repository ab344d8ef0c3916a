#include "lia.hpp"

#include <algorithm>
#include <map>

namespace adcl::lia {

namespace {

using Coeffs = std::vector<std::pair<std::uint32_t, Int>>;

Int coeff_of(const Row& r, std::uint32_t v) {
  auto it = std::lower_bound(r.coeffs.begin(), r.coeffs.end(), v,
                             [](const std::pair<std::uint32_t, Int>& p, std::uint32_t x) { return p.first < x; });
  return it != r.coeffs.end() && it->first == v ? it->second : Int(0);
}

// ka * a + kb * b
Row combine(const Row& a, const Int& ka, const Row& b, const Int& kb) {
  Row r;
  r.constant = ka * a.constant + kb * b.constant;
  auto ia = a.coeffs.begin(), ib = b.coeffs.begin();
  while (ia != a.coeffs.end() || ib != b.coeffs.end()) {
    if (ib == b.coeffs.end() || (ia != a.coeffs.end() && ia->first < ib->first)) {
      r.coeffs.emplace_back(ia->first, ka * ia->second);
      ++ia;
    } else if (ia == a.coeffs.end() || ib->first < ia->first) {
      r.coeffs.emplace_back(ib->first, kb * ib->second);
      ++ib;
    } else {
      Int c = ka * ia->second + kb * ib->second;
      if (c != 0) r.coeffs.emplace_back(ia->first, std::move(c));
      ++ia;
      ++ib;
    }
  }
  return r;
}

Row without(const Row& r, std::uint32_t v) {
  Row out;
  out.constant = r.constant;
  for (auto& p : r.coeffs)
    if (p.first != v) out.coeffs.push_back(p);
  return out;
}

// replace x_v by expr
Row substitute(const Row& r, std::uint32_t v, const Row& expr) {
  Int c = coeff_of(r, v);
  if (c == 0) return r;
  return combine(without(r, v), Int(1), expr, c);
}

enum class Norm { Ok, Trivial, Infeasible };

Int gcd_of(const Coeffs& cs) {
  Int g = 0;
  for (auto& p : cs) {
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), p.second.get_mpz_t());
    if (g == 1) break;
  }
  return g;
}

Norm norm_eq(Row& r) {
  if (r.coeffs.empty()) return r.constant == 0 ? Norm::Trivial : Norm::Infeasible;
  Int g = gcd_of(r.coeffs);
  if (g == 1) return Norm::Ok;
  if (!mpz_divisible_p(r.constant.get_mpz_t(), g.get_mpz_t())) return Norm::Infeasible;
  for (auto& p : r.coeffs) mpz_divexact(p.second.get_mpz_t(), p.second.get_mpz_t(), g.get_mpz_t());
  mpz_divexact(r.constant.get_mpz_t(), r.constant.get_mpz_t(), g.get_mpz_t());
  return Norm::Ok;
}

Norm norm_geq(Row& r) {
  if (r.coeffs.empty()) return r.constant >= 0 ? Norm::Trivial : Norm::Infeasible;
  Int g = gcd_of(r.coeffs);
  if (g == 1) return Norm::Ok;
  for (auto& p : r.coeffs) mpz_divexact(p.second.get_mpz_t(), p.second.get_mpz_t(), g.get_mpz_t());
  r.constant = floor_div(r.constant, g);
  return Norm::Ok;
}

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class Omega {
 public:
  Omega(std::uint32_t n, const Options& opt) : vals_(n), opt_(opt) {}

  bool solve(std::vector<Row> eqs, std::vector<Row> geqs) {
    if (opt_.cancel && opt_.cancel->load(std::memory_order_relaxed)) throw Error(ErrorKind::Cancelled, "cancelled");
    if (!normalize(eqs, geqs)) return false;
    if (!eqs.empty()) return eliminate_eq(std::move(eqs), std::move(geqs));
    return solve_geqs(std::move(geqs));
  }

  std::vector<Int> values(std::uint32_t n) {
    std::vector<Int> out(n);
    for (std::uint32_t i = 0; i < n; ++i) out[i] = value(i);
    return out;
  }

 private:
  static bool normalize(std::vector<Row>& eqs, std::vector<Row>& geqs) {
    std::vector<Row> e2, g2;
    for (auto& r : eqs) {
      auto n = norm_eq(r);
      if (n == Norm::Infeasible) return false;
      if (n == Norm::Ok) e2.push_back(std::move(r));
    }
    for (auto& r : geqs) {
      auto n = norm_geq(r);
      if (n == Norm::Infeasible) return false;
      if (n == Norm::Ok) g2.push_back(std::move(r));
    }
    eqs = std::move(e2);
    geqs = std::move(g2);
    return true;
  }

  std::uint32_t fresh() {
    vals_.emplace_back();
    return static_cast<std::uint32_t>(vals_.size() - 1);
  }

  Int pref(std::uint32_t v, const std::optional<Int>& lo, const std::optional<Int>& hi) {
    Int want = 0;
    if (opt_.seed != 0) {
      auto h = mix(opt_.seed ^ mix(v + 1));
      if (lo && hi) {
        Int width = *hi - *lo + 1;
        Int off = Int(static_cast<unsigned long>(h % 1000003));
        mpz_fdiv_r(off.get_mpz_t(), off.get_mpz_t(), width.get_mpz_t());
        return *lo + off;
      }
      long d = static_cast<long>(h % 17);
      if (lo) return *lo + d;
      if (hi) return *hi - d;
      return Int(d - 8);
    }
    if (lo && want < *lo) want = *lo;
    if (hi && want > *hi) want = *hi;
    return want;
  }

  Int value(std::uint32_t v) {
    if (!vals_[v]) vals_[v] = pref(v, std::nullopt, std::nullopt);
    return *vals_[v];
  }

  Int eval(const Row& r) {
    Int s = r.constant;
    for (auto& [v, c] : r.coeffs) s += c * value(v);
    return s;
  }

  bool eliminate_eq(std::vector<Row> eqs, std::vector<Row> geqs) {
    // prefer an equality with a unit coefficient
    std::size_t best = 0;
    std::uint32_t var = 0;
    bool unit = false;
    Int best_abs;
    for (std::size_t i = 0; i < eqs.size() && !unit; ++i)
      for (auto& [v, c] : eqs[i].coeffs) {
        Int a = abs(c);
        if (a == 1) {
          best = i;
          var = v;
          unit = true;
          break;
        }
        if (best_abs == 0 || a < best_abs) {
          best_abs = a;
          best = i;
          var = v;
        }
      }
    Row e = eqs[best];
    Int ak = coeff_of(e, var);
    Row expr;
    if (unit) {
      // a x + rest = 0  =>  x = -rest / a
      expr = without(e, var);
      if (ak == 1) expr = combine(expr, Int(-1), Row{}, Int(0));
      eqs.erase(eqs.begin() + static_cast<long>(best));
    } else {
      Int m = abs(ak) + 1;
      auto modhat = [&](const Int& a) {
        Int q = floor_div(2 * a + m, 2 * m);
        return Int(a - m * q);
      };
      auto sigma = fresh();
      Int s = sgn(ak) > 0 ? Int(1) : Int(-1);
      expr.constant = s * modhat(e.constant);
      for (auto& [v, c] : e.coeffs)
        if (v != var) {
          Int h = modhat(c);
          if (h != 0) expr.coeffs.emplace_back(v, s * h);
        }
      expr.coeffs.emplace_back(sigma, -s * m);
      std::sort(expr.coeffs.begin(), expr.coeffs.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
    }
    for (auto& r : eqs) r = substitute(r, var, expr);
    for (auto& r : geqs) r = substitute(r, var, expr);
    if (!solve(std::move(eqs), std::move(geqs))) return false;
    vals_[var] = eval(expr);
    return true;
  }

  struct Bounds {
    std::vector<Row> lows, ups;
  };

  // pick a value for x inside the bounds implied by rows under the current assignment
  bool back_solve(std::uint32_t x, const Bounds& b, bool must) {
    std::optional<Int> lo, hi;
    for (auto& r : b.lows) {
      Int a = coeff_of(r, x);
      Int rest = eval(without(r, x));
      Int l = ceil_div(-rest, a);
      if (!lo || l > *lo) lo = l;
    }
    for (auto& r : b.ups) {
      Int a = -coeff_of(r, x);
      Int rest = eval(without(r, x));
      Int h = floor_div(rest, a);
      if (!hi || h < *hi) hi = h;
    }
    if (lo && hi && *lo > *hi) {
      if (must) throw std::logic_error("omega: empty interval after exact elimination");
      return false;
    }
    vals_[x] = pref(x, lo, hi);
    return true;
  }

  bool solve_geqs(std::vector<Row> geqs) {
    // tighten parallel constraints and detect implied equalities
    std::map<Coeffs, std::size_t> index;
    std::vector<Row> uniq;
    for (auto& r : geqs) {
      auto [it, ins] = index.emplace(r.coeffs, uniq.size());
      if (ins)
        uniq.push_back(std::move(r));
      else if (r.constant < uniq[it->second].constant)
        uniq[it->second].constant = r.constant;
    }
    for (std::size_t i = 0; i < uniq.size(); ++i) {
      Coeffs neg = uniq[i].coeffs;
      for (auto& p : neg) p.second = -p.second;
      auto it = index.find(neg);
      if (it == index.end()) continue;
      Int sum = uniq[i].constant + uniq[it->second].constant;
      if (sum < 0) return false;
      if (sum == 0) {
        std::vector<Row> rest;
        for (std::size_t j = 0; j < uniq.size(); ++j)
          if (j != i && j != it->second) rest.push_back(uniq[j]);
        return solve({uniq[i]}, std::move(rest));
      }
    }
    geqs = std::move(uniq);
    if (geqs.empty()) return true;

    struct Stat {
      std::size_t lo = 0, up = 0;
      bool lo_unit = true, up_unit = true;
    };
    std::map<std::uint32_t, Stat> stats;
    for (auto& r : geqs)
      for (auto& [v, c] : r.coeffs) {
        auto& s = stats[v];
        if (c > 0) {
          ++s.lo;
          if (c != 1) s.lo_unit = false;
        } else {
          ++s.up;
          if (c != -1) s.up_unit = false;
        }
      }
    std::uint32_t x = 0;
    int best_rank = 3;
    std::size_t best_cost = 0;
    for (auto& [v, s] : stats) {
      int rank = (s.lo == 0 || s.up == 0) ? 0 : (s.lo_unit || s.up_unit) ? 1 : 2;
      std::size_t cost = s.lo * s.up;
      if (rank < best_rank || (rank == best_rank && cost < best_cost)) {
        best_rank = rank;
        best_cost = cost;
        x = v;
      }
    }

    Bounds b;
    std::vector<Row> others;
    for (auto& r : geqs) {
      Int c = coeff_of(r, x);
      if (c > 0)
        b.lows.push_back(r);
      else if (c < 0)
        b.ups.push_back(r);
      else
        others.push_back(r);
    }
    if (best_rank == 0) {
      if (!solve({}, others)) return false;
      back_solve(x, b, true);
      return true;
    }

    auto shadow = [&](bool dark) {
      std::vector<Row> out = others;
      for (auto& l : b.lows)
        for (auto& u : b.ups) {
          Int a = coeff_of(l, x);
          Int bb = -coeff_of(u, x);
          Row r = combine(without(l, x), bb, without(u, x), a);
          if (dark) r.constant -= (a - 1) * (bb - 1);
          out.push_back(std::move(r));
        }
      return out;
    };

    if (best_rank == 1) {
      if (!solve({}, shadow(false))) return false;
      back_solve(x, b, true);
      return true;
    }

    if (!solve({}, shadow(false))) return false;
    if (back_solve(x, b, false)) return true;
    if (solve({}, shadow(true))) {
      back_solve(x, b, true);
      return true;
    }
    Int amax = 0;
    for (auto& u : b.ups) amax = std::max(amax, Int(-coeff_of(u, x)));
    for (auto& l : b.lows) {
      Int a = coeff_of(l, x);
      Int lim = floor_div(amax * a - amax - a, amax);
      for (Int i = 0; i <= lim; ++i) {
        Row e = l;
        e.constant -= i;
        if (solve({e}, geqs)) return true;
      }
    }
    return false;
  }

  std::vector<std::optional<Int>> vals_;
  Options opt_;
};

bool neq_ok(const Row& r, const std::vector<Int>& vals) {
  Int s = r.constant;
  for (auto& [v, c] : r.coeffs) s += c * vals[v];
  return s != 0;
}

std::optional<std::vector<Int>> solve_rec(const System& s, std::vector<Row> geqs, std::vector<Row> neqs,
                                          const Options& opt) {
  Omega o(s.num_vars, opt);
  if (!o.solve(s.eqs, geqs)) return std::nullopt;
  auto vals = o.values(s.num_vars);
  for (std::size_t i = 0; i < neqs.size(); ++i) {
    if (neq_ok(neqs[i], vals)) continue;
    Row r = neqs[i];
    neqs.erase(neqs.begin() + static_cast<long>(i));
    // r <= -1 or r >= 1
    Row lo = combine(r, Int(-1), Row{}, Int(0));
    lo.constant -= 1;
    Row hi = r;
    hi.constant -= 1;
    for (auto* side : {&lo, &hi}) {
      auto g2 = geqs;
      g2.push_back(*side);
      if (auto res = solve_rec(s, std::move(g2), neqs, opt)) return res;
    }
    return std::nullopt;
  }
  return vals;
}

}  // namespace

Row make_row(std::vector<std::pair<std::uint32_t, Int>> coeffs, Int constant) {
  std::sort(coeffs.begin(), coeffs.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  Row r;
  r.constant = std::move(constant);
  for (auto& p : coeffs) {
    if (!r.coeffs.empty() && r.coeffs.back().first == p.first) {
      r.coeffs.back().second += p.second;
      if (r.coeffs.back().second == 0) r.coeffs.pop_back();
    } else if (p.second != 0) {
      r.coeffs.push_back(std::move(p));
    }
  }
  return r;
}

std::optional<std::vector<Int>> solve(const System& s, const Options& opt) {
  return solve_rec(s, s.geqs, s.neqs, opt);
}

}  // namespace adcl::lia
