#include "padic/toy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "padic/rng.hpp"

namespace padic {

void ToyParams::validate() const {
  if (!std::isfinite(a) || a < 0.0)
    throw DomainError("ToyParams: a must be finite and nonnegative");
  if (!(w_in.p == p) || !(xi.p == p)) throw DomainError("ToyParams: mixed primes");
  if (w_in.level > level || xi.level > level)
    throw DomainError("ToyParams: W_in/xi level above the working level");
}

bool StateLabeling::bistable() const {
  for (Label l : labels)
    if (l == Label::Mid) return false;
  return true;
}

std::uint64_t StateLabeling::union_size() const {
  std::uint64_t n = 0;
  for (Label l : labels)
    if (l != Label::Mid) ++n;
  return n;
}

BigCount BigCount::one() { return BigCount{{1}}; }

void BigCount::mul_small(std::uint32_t m) {
  std::uint64_t carry = 0;
  for (auto& limb : limbs) {
    std::uint64_t v = static_cast<std::uint64_t>(limb) * m + carry;
    limb = static_cast<std::uint32_t>(v % 1000000000ULL);
    carry = v / 1000000000ULL;
  }
  while (carry) {
    limbs.push_back(static_cast<std::uint32_t>(carry % 1000000000ULL));
    carry /= 1000000000ULL;
  }
  if (m == 0) limbs.clear();
}

bool BigCount::leq_u64(std::uint64_t cap, std::uint64_t* value_out) const {
  std::uint64_t v = 0;
  for (std::size_t i = limbs.size(); i-- > 0;) {
    if (v > std::numeric_limits<std::uint64_t>::max() / 1000000000ULL)
      return false;
    v *= 1000000000ULL;
    if (v > std::numeric_limits<std::uint64_t>::max() - limbs[i]) return false;
    v += limbs[i];
  }
  if (value_out) *value_out = v;
  return v <= cap;
}

std::string BigCount::to_string() const {
  if (limbs.empty()) return "0";
  std::string s = std::to_string(limbs.back());
  char buf[16];
  for (std::size_t i = limbs.size() - 1; i-- > 0;) {
    std::snprintf(buf, sizeof buf, "%09u", limbs[i]);
    s += buf;
  }
  return s;
}

DriveField drive(const ToyParams& params, const TreeFunction& x) {
  params.validate();
  if (!(x.p == params.p)) throw DomainError("drive: prime mismatch");
  TreeFunction conv = convolve(params.w_in, x);
  TreeFunction b = add(conv, params.xi);
  return DriveField{lift(b, params.level)};
}

TreeFunction closed_form_state(const ToyParams& params, const DriveField& b) {
  params.validate();
  const double a = params.a;
  if (a > 1.0)
    throw DomainError(
        "closed_form_state: a > 1 has many states; use enumerate_states");
  const TreeFunction bl = lift(b.b, params.level);
  std::vector<double> h(bl.coeffs.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double bi = bl.coeffs[i];
    if (a < 1.0) {
      if (bi > 1.0 - a)
        h[i] = a + bi;
      else if (bi < a - 1.0)
        h[i] = -a + bi;
      else
        h[i] = bi / (1.0 - a);
    } else {
      if (bi > 0.0)
        h[i] = 1.0 + bi;
      else if (bi < 0.0)
        h[i] = -1.0 + bi;
      else
        h[i] = 0.0;
    }
  }
  return TreeFunction(params.p, params.level, std::move(h));
}

namespace {

double state_value(Label l, double a, double b) {
  switch (l) {
    case Label::Plus: return a + b;
    case Label::Minus: return -a + b;
    default: return b / (1.0 - a);
  }
}

StateLabeling build_state(const ToyParams& params, const TreeFunction& b,
                          std::vector<Label> labels) {
  std::vector<double> h(labels.size());
  for (std::size_t i = 0; i < h.size(); ++i)
    h[i] = state_value(labels[i], params.a, b.coeffs[i]);
  StateLabeling s{std::move(labels),
                  TreeFunction(params.p, params.level, std::move(h))};
  for (std::size_t i = 0; i < s.labels.size(); ++i) {
    const double hi = s.state.coeffs[i];
    const double res =
        std::fabs(hi - params.a * pwl_sigmoid_eval(hi) - b.coeffs[i]);
    if (res > 1e-12)
      throw DomainError("enumerate_states: fixed-point residual check failed");
  }
  return s;
}

}  // namespace

StatePoset enumerate_states(const ToyParams& params, const DriveField& b,
                            std::uint64_t cap, std::uint64_t seed) {
  params.validate();
  const double a = params.a;
  if (!(a > 1.0))
    throw DomainError("enumerate_states: requires a > 1; use closed_form_state");
  const TreeFunction bl = lift(b.b, params.level);
  const std::size_t n = bl.coeffs.size();

  std::vector<std::vector<Label>> admissible(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double bi = bl.coeffs[i];
    if (bi > 1.0 - a) admissible[i].push_back(Label::Plus);
    if (bi < a - 1.0) admissible[i].push_back(Label::Minus);
    if (bi > 1.0 - a && bi < a - 1.0) admissible[i].push_back(Label::Mid);
    if (admissible[i].empty())
      throw DomainError("enumerate_states: empty admissible set");
  }

  BigCount count = BigCount::one();
  for (const auto& s : admissible)
    count.mul_small(static_cast<std::uint32_t>(s.size()));

  StatePoset poset{{}, count, false, {}};
  std::uint64_t total = 0;
  if (cap > 0 && count.leq_u64(cap, &total)) {
    std::vector<std::size_t> choice(n, 0);
    for (std::uint64_t c = 0; c < total; ++c) {
      std::vector<Label> labels(n);
      for (std::size_t i = 0; i < n; ++i) labels[i] = admissible[i][choice[i]];
      poset.states.push_back(build_state(params, bl, std::move(labels)));
      for (std::size_t i = n; i-- > 0;) {
        if (++choice[i] < admissible[i].size()) break;
        choice[i] = 0;
      }
    }
  } else {
    poset.sampled = true;
    for (std::uint64_t d = 0; d < cap; ++d) {
      CounterRng rng(seed, d);
      std::vector<Label> labels(n);
      for (std::size_t i = 0; i < n; ++i)
        labels[i] = admissible[i][rng.uniform_index(admissible[i].size())];
      poset.states.push_back(build_state(params, bl, std::move(labels)));
    }
  }
  return poset;
}

Comparison order_relation(const StateLabeling& s1, const StateLabeling& s2) {
  if (s1.labels.size() != s2.labels.size())
    throw DomainError("order_relation: index sets differ");
  if (s1.labels == s2.labels) return Comparison::Equal;
  bool u1_in_u2 = true, u2_in_u1 = true;
  for (std::size_t i = 0; i < s1.labels.size(); ++i) {
    const bool in1 = s1.labels[i] != Label::Mid;
    const bool in2 = s2.labels[i] != Label::Mid;
    if (in1 && !in2) u1_in_u2 = false;
    if (in2 && !in1) u2_in_u1 = false;
  }
  // The lower state is the one with the larger non-MID set (smaller set of
  // bistability); equal unions on distinct labelings are not comparable.
  if (u1_in_u2 && u2_in_u1) return Comparison::Incomparable;
  if (u2_in_u1) return Comparison::LessEq;
  if (u1_in_u2) return Comparison::GreaterEq;
  return Comparison::Incomparable;
}

std::vector<std::size_t> minimal_elements(StatePoset& poset) {
  if (poset.sampled)
    throw DomainError("minimal_elements: not decidable from a sample");
  const std::size_t n = poset.states.size();
  poset.minimal.assign(n, true);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n && poset.minimal[i]; ++j)
      if (j != i &&
          order_relation(poset.states[j], poset.states[i]) == Comparison::LessEq)
        poset.minimal[i] = false;
    if (poset.minimal[i] != poset.states[i].bistable())
      throw DomainError("minimal_elements: minimal/bistable mismatch");
    if (poset.minimal[i]) out.push_back(i);
  }
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> hasse_edges(
    const StatePoset& poset) {
  const std::size_t n = poset.states.size();
  auto below = [&](std::size_t lo, std::size_t hi) {
    return order_relation(poset.states[lo], poset.states[hi]) ==
           Comparison::LessEq;
  };
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t lo = 0; lo < n; ++lo)
    for (std::size_t hi = 0; hi < n; ++hi) {
      if (!(lo != hi && below(lo, hi))) continue;
      bool covering = true;
      for (std::size_t mid = 0; mid < n && covering; ++mid)
        if (mid != lo && mid != hi && below(lo, mid) && below(mid, hi))
          covering = false;
      if (covering) edges.emplace_back(lo, hi);
    }
  return edges;
}

LatticeReport lattice_report(const StatePoset& poset) {
  const std::size_t n = poset.states.size();
  auto leq = [&](std::size_t a, std::size_t b) {
    Comparison c = order_relation(poset.states[a], poset.states[b]);
    return c == Comparison::LessEq || c == Comparison::Equal;
  };
  LatticeReport rep{0, 0, 0};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      ++rep.pairs;
      std::vector<std::size_t> lower, upper;
      for (std::size_t k = 0; k < n; ++k) {
        if (leq(k, i) && leq(k, j)) lower.push_back(k);
        if (leq(i, k) && leq(j, k)) upper.push_back(k);
      }
      auto has_extremum = [&](const std::vector<std::size_t>& set, bool inf) {
        for (std::size_t g : set) {
          bool ok = true;
          for (std::size_t t : set)
            if (inf ? !leq(t, g) : !leq(g, t)) {
              ok = false;
              break;
            }
          if (ok) return true;
        }
        return false;
      };
      if (has_extremum(lower, true)) ++rep.pairs_with_inf;
      if (has_extremum(upper, false)) ++rep.pairs_with_sup;
    }
  return rep;
}

GrayImage edge_detect(const GrayImage& image, const ToyParams& params) {
  params.validate();
  if (params.a > 1.0)
    throw DomainError("edge_detect: a > 1 is the many-state regime");
  const std::uint64_t n = pow_checked(params.p.value(), params.level);
  const std::uint64_t count =
      static_cast<std::uint64_t>(image.width) * image.height;
  if (count > n)
    throw CapacityError("edge_detect: image exceeds p^level pixels");

  std::vector<double> x(n, 0.0);
  for (std::uint64_t i = 0; i < count; ++i)
    x[i] = static_cast<double>(image.pixels[i]) / 127.5 - 1.0;
  DriveField b = drive(params, TreeFunction(params.p, params.level, std::move(x)));
  TreeFunction h = closed_form_state(params, b);

  GrayImage out{image.width, image.height, std::vector<std::uint8_t>(count)};
  for (std::uint64_t i = 0; i < count; ++i) {
    double y = pwl_sigmoid_eval(h.coeffs[i]);
    double v = std::lround((y + 1.0) * 127.5);
    out.pixels[i] = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
  }
  return out;
}

NetworkParams toy_network(const ToyParams& params, const DriveField& b) {
  params.validate();
  if (params.level < 1)
    throw DomainError("toy_network: requires level >= 1");
  const std::uint32_t l = params.level;
  const std::uint64_t n = pow_checked(params.p.value(), l);
  TreeKernel W = TreeKernel::zero(params.p, l);
  for (std::uint64_t i = 0; i < n; ++i)
    W.at(i, i) = params.a * static_cast<double>(n);
  return NetworkParams{params.p,
                       LevelPair(l - 1, 1),
                       make_pwl_sigmoid(),
                       make_pwl_sigmoid(),
                       std::move(W),
                       TreeKernel::zero(params.p, l - 1),
                       TreeKernel::zero(params.p, l),
                       lift(b.b, l),
                       TreeFunction::zero(params.p, l)};
}

}  // namespace padic
