#include "pptc/generator.hpp"

namespace pptc {

namespace {

GuardPtr random_guard(std::mt19937_64& rng, const GenOptions& opts, int depth) {
  if (opts.guard_atoms.empty() || depth <= 0) {
    switch (rng() % 4) {
      case 0: return g_eps();
      case 1: return g_delta();
      default:
        if (opts.guard_atoms.empty()) return rng() % 2 ? g_eps() : g_delta();
        return g_atom(opts.guard_atoms[rng() % opts.guard_atoms.size()]);
    }
  }
  switch (rng() % 6) {
    case 0: return g_atom(opts.guard_atoms[rng() % opts.guard_atoms.size()]);
    case 1: return g_not(random_guard(rng, opts, depth - 1));
    case 2: return g_plus(random_guard(rng, opts, depth - 1), random_guard(rng, opts, depth - 1));
    case 3: return g_seq(random_guard(rng, opts, depth - 1), random_guard(rng, opts, depth - 1));
    case 4:
      return g_prob(random_guard(rng, opts, depth - 1),
                    opts.probs[rng() % opts.probs.size()],
                    random_guard(rng, opts, depth - 1));
    default: return g_atom(opts.guard_atoms[rng() % opts.guard_atoms.size()]);
  }
}

TermPtr leaf(std::mt19937_64& rng, const GenOptions& opts) {
  unsigned roll = rng() % 10;
  if (opts.with_constants && roll == 0) return t_delta();
  if (opts.with_constants && roll == 1) return t_eps();
  if (opts.with_constants && roll == 2) return t_tau();
  if (opts.with_guards && roll == 3) return t_guard(random_guard(rng, opts, 2));
  return t_atom(opts.events[rng() % opts.events.size()]);
}

TermPtr gen(std::mt19937_64& rng, size_t budget, const GenOptions& opts) {
  if (budget <= 1) return leaf(rng, opts);
  size_t left = 1 + rng() % (budget - 1);
  size_t right = budget - left;
  auto sub = [&](size_t b) { return gen(rng, b, opts); };
  for (;;) {
    switch (rng() % 12) {
      case 0:
      case 1: return t_seq(sub(left), sub(right));
      case 2:
      case 3: return t_alt(sub(left), sub(right));
      case 4:
      case 5:
        if (opts.with_prob && !opts.prob_free)
          return t_prob(sub(left), opts.probs[rng() % opts.probs.size()], sub(right));
        break;
      case 6:
        if (opts.with_parallel) {
          switch (rng() % 4) {
            case 0: return t_whole(sub(left), sub(right));
            case 1: return t_par(sub(left), sub(right));
            case 2: return t_lmerge(sub(left), sub(right));
            default: return t_comm(sub(left), sub(right));
          }
        }
        break;
      case 7:
        if (opts.with_conflict_ops)
          return rng() % 2 ? t_celim(sub(budget - 1)) : t_unless(sub(left), sub(right));
        break;
      case 8:
        if (opts.with_encap) {
          std::vector<std::string> H;
          for (const auto& e : opts.events)
            if (rng() % 3 == 0) H.push_back(e);
          return t_encap(std::move(H), sub(budget - 1));
        }
        break;
      default: return leaf(rng, opts);
    }
  }
}

}  // namespace

TermPtr random_term(std::mt19937_64& rng, const GenOptions& opts) {
  return canonicalize(gen(rng, std::max<size_t>(1, opts.max_size), opts));
}

TermPtr random_small_acyclic(std::mt19937_64& rng, size_t max_events,
                             const std::vector<std::string>& events) {
  GenOptions opts;
  opts.events = events;
  opts.max_size = max_events;
  opts.with_constants = false;
  opts.with_conflict_ops = false;
  opts.with_encap = false;
  return random_term(rng, opts);
}

}  // namespace pptc
