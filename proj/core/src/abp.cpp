#include "pptc/abp.hpp"

#include "pptc/parser.hpp"

#include <chrono>
#include <sstream>

namespace pptc {

namespace {

// event name helpers; b = message bit, t = acknowledgement tag
std::string bt(const std::string& base, int b, int t) {
  return base + std::to_string(b) + std::to_string(t);
}

void sender_side(std::ostringstream& os, const std::string& who, const std::string& accept,
                 const std::string& deliver, const std::string& snd, const std::string& rcv) {
  // One direction of the symmetric protocol. States track: message accepted,
  // transmission done, opposite message delivered, round completed (an
  // opposite message tagged with the current round arrived). Messages for the
  // current round are only consumed once this side has sent (they wait in the
  // channel before that); stale arrivals from the previous round are consumed
  // and ignored; retransmission is triggered by a hidden timeout self event.
  for (int b = 0; b < 2; ++b) {
    int nb = 1 - b;
    auto S = [&](const std::string& st) { return who + st + std::to_string(b); };
    std::string next_idle = who + "Idle" + std::to_string(nb);
    auto with_stale = [&](const std::string& st, const std::string& rest) {
      std::string self = who + st + std::to_string(b);
      os << "eq " << self << " = " << rest << " + " << bt(rcv, nb, nb) << " . " << self
         << " + " << bt(rcv, nb, b) << " . " << self << ";\n";
    };
    with_stale("Idle", accept + " . " + S("Have"));
    with_stale("Have", bt(snd, b, nb) + " . " + S("Wait"));
    with_stale("Wait", bt(rcv, b, nb) + " . " + S("WP") + " + " + bt(rcv, b, b) + " . " +
                           S("WC") + " + tmo" + who + " . " + S("WaitR"));
    with_stale("WaitR", bt(snd, b, nb) + " . " + S("Wait"));
    // received (delivery owed), not yet completed; resends carry the tag
    with_stale("WP", deliver + " . " + S("Ack") + " + " + bt(rcv, b, b) + " . " + S("WC") +
                         " + " + bt(rcv, b, nb) + " . " + S("WP"));
    // received and completed, delivery owed
    with_stale("WC", deliver + " . " + next_idle + " + " + bt(rcv, b, b) + " . " + S("WC") +
                         " + " + bt(rcv, b, nb) + " . " + S("WC"));
    // delivered, retransmitting with the completion tag until acknowledged
    with_stale("Ack", "tmo" + who + " . " + S("AckR") + " + " + bt(rcv, b, b) + " . " +
                          next_idle + " + " + bt(rcv, b, nb) + " . " + S("Ack"));
    with_stale("AckR", bt(snd, b, b) + " . " + S("Ack"));
  }
}

void channel(std::ostringstream& os, const std::string& name, const std::string& in,
             const std::string& out, const std::string& drop, const Rational& loss,
             const Rational& dup, int capacity) {
  auto full1 = [&](int b, int t) { return name + "F" + std::to_string(b) + std::to_string(t); };
  std::ostringstream empty_rhs;
  for (int b = 0; b < 2; ++b)
    for (int t = 0; t < 2; ++t) {
      if (b || t) empty_rhs << " + ";
      empty_rhs << bt(in, b, t) << " . " << full1(b, t);
    }
  os << "eq " << name << "E = " << empty_rhs.str() << ";\n";
  for (int b = 0; b < 2; ++b)
    for (int t = 0; t < 2; ++t) {
      std::string fwd = bt(out, b, t) + " . " + name + "E";
      if (dup != 0)
        fwd = "(" + bt(out, b, t) + " . " + full1(b, t) + ") +[" + to_string(dup) + "] (" +
              fwd + ")";
      os << "eq " << full1(b, t) << " = (" << drop << " . " << name << "E) +["
         << to_string(loss) << "] (" << fwd << ");\n";
    }
  if (capacity == 2) {
    // one-full states that still accept a second message, and FIFO pairs
    for (int b = 0; b < 2; ++b)
      for (int t = 0; t < 2; ++t) {
        std::ostringstream ext;
        for (int b2 = 0; b2 < 2; ++b2)
          for (int t2 = 0; t2 < 2; ++t2)
            ext << " + " << bt(in, b2, t2) << " . " << name << "Q" << b << t << b2 << t2;
        std::string fwd = bt(out, b, t) + " . " + name + "E2";
        if (dup != 0)
          fwd = "(" + bt(out, b, t) + " . " + full1(b, t) + "X) +[" + to_string(dup) +
                "] (" + fwd + ")";
        os << "eq " << full1(b, t) << "X = ((" << drop << " . " << name << "E2) +["
           << to_string(loss) << "] (" << fwd << "))" << ext.str() << ";\n";
        for (int b2 = 0; b2 < 2; ++b2)
          for (int t2 = 0; t2 < 2; ++t2) {
            std::string fwd2 = bt(out, b, t) + " . " + full1(b2, t2) + "X";
            if (dup != 0)
              fwd2 = "(" + bt(out, b, t) + " . " + name + "Q" + std::to_string(b) +
                     std::to_string(t) + std::to_string(b2) + std::to_string(t2) + ") +[" +
                     to_string(dup) + "] (" + fwd2 + ")";
            os << "eq " << name << "Q" << b << t << b2 << t2 << " = (" << drop << " . "
               << full1(b2, t2) << "X) +[" << to_string(loss) << "] (" << fwd2 << ");\n";
          }
      }
  }
}

}  // namespace

std::string abp_spec_text(const AbpOptions& opts) {
  std::ostringstream os;
  os << "// Alternating-bit protocol, symmetric two-way re-encoding.\n";
  os << "// Message events carry (bit, acknowledgement tag): a side tags its\n";
  os << "// (re)transmissions with the round of the last message received from\n";
  os << "// the opposite side; receiving a message tagged with the current round\n";
  os << "// completes it. Channels are capacity-" << opts.capacity << " and lose a message\n";
  os << "// with probability " << to_string(opts.loss);
  if (opts.dup != 0) os << " (duplicate with probability " << to_string(opts.dup) << ")";
  os << ".\n";
  os << "// Races against the reserved, never-enabled event `dead` let components\n";
  os << "// move alone; all channel halves are encapsulated and the internal\n";
  os << "// machinery is hidden in the AB root below.\n\n";

  // alphabet
  std::vector<std::string> internals{"fdrop", "rdrop", "tmoS", "tmoR"};
  std::vector<std::string> halves;
  std::vector<std::string> comms;
  for (int b = 0; b < 2; ++b)
    for (int t = 0; t < 2; ++t) {
      halves.push_back(bt("sf", b, t));
      halves.push_back(bt("fin", b, t));
      halves.push_back(bt("fout", b, t));
      halves.push_back(bt("frx", b, t));
      halves.push_back(bt("sr", b, t));
      halves.push_back(bt("rin", b, t));
      halves.push_back(bt("rout", b, t));
      halves.push_back(bt("brx", b, t));
      comms.push_back("comm " + bt("sf", b, t) + " " + bt("fin", b, t) + " = " +
                      bt("fput", b, t) + ";");
      comms.push_back("comm " + bt("fout", b, t) + " " + bt("frx", b, t) + " = " +
                      bt("fget", b, t) + ";");
      comms.push_back("comm " + bt("sr", b, t) + " " + bt("rin", b, t) + " = " +
                      bt("rput", b, t) + ";");
      comms.push_back("comm " + bt("rout", b, t) + " " + bt("brx", b, t) + " = " +
                      bt("rget", b, t) + ";");
      internals.push_back(bt("fput", b, t));
      internals.push_back(bt("fget", b, t));
      internals.push_back(bt("rput", b, t));
      internals.push_back(bt("rget", b, t));
    }
  os << "events acceptS, acceptR, deliverS, deliverR, dead";
  for (const auto& e : halves) os << ", " << e;
  for (const auto& e : internals) os << ", " << e;
  os << ";\n";
  for (const auto& c : comms) os << c << "\n";
  // idling: every event races against the never-enabled dead
  os << "race dead % dead;\n";
  std::vector<std::string> all{"acceptS", "acceptR", "deliverS", "deliverR"};
  all.insert(all.end(), halves.begin(), halves.end());
  all.insert(all.end(), internals.begin(), internals.end());
  for (const auto& e : all) os << "race " << e << " % dead;\n";
  os << "\n";

  // sender talks over sf/brx, replier over sr/frx
  sender_side(os, "S", "acceptS", "deliverS", "sf", "brx");
  sender_side(os, "R", "acceptR", "deliverR", "sr", "frx");
  channel(os, "FC", "fin", "fout", "fdrop", opts.loss, opts.dup, opts.capacity);
  channel(os, "RC", "rin", "rout", "rdrop", opts.loss, opts.dup, opts.capacity);

  std::string fce = opts.capacity == 2 ? "FCE2" : "FCE";
  std::string rce = opts.capacity == 2 ? "RCE2" : "RCE";
  if (opts.capacity == 2) {
    std::ostringstream e2;
    e2 << "eq FCE2 = ";
    bool first = true;
    for (int b = 0; b < 2; ++b)
      for (int t = 0; t < 2; ++t) {
        if (!first) e2 << " + ";
        first = false;
        e2 << bt("fin", b, t) << " . FCF" << b << t << "X";
      }
    e2 << ";\neq RCE2 = ";
    first = true;
    for (int b = 0; b < 2; ++b)
      for (int t = 0; t < 2; ++t) {
        if (!first) e2 << " + ";
        first = false;
        e2 << bt("rin", b, t) << " . RCF" << b << t << "X";
      }
    e2 << ";\n";
    os << e2.str();
  }

  // encapsulated, hidden composition and its specification
  os << "\neq ABraw = SIdle0 || " << fce << " || " << rce << " || RIdle0;\n";
  auto set_of = [](const std::vector<std::string>& v) {
    std::string s = "{";
    for (size_t i = 0; i < v.size(); ++i) {
      if (i) s += ", ";
      s += v[i];
    }
    return s + "}";
  };
  std::vector<std::string> H = halves;
  H.push_back("dead");
  os << "eq AB = hide" << set_of(internals) << "(encap" << set_of(H) << "(ABraw));\n";
  os << "eq Buff = (acceptS || acceptR) . ((deliverS || deliverR) . Buff);\n";
  os << "root AB;\n";
  return os.str();
}

std::set<std::vector<std::string>> weak_step_traces(const Plts& p, size_t depth) {
  // silent closure per state
  std::vector<std::vector<int>> reach(p.states.size());
  for (size_t i = 0; i < p.states.size(); ++i) {
    std::vector<char> seen(p.states.size(), 0);
    std::vector<int> stack{static_cast<int>(i)};
    seen[i] = 1;
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      reach[i].push_back(x);
      auto push = [&](int y) {
        if (!seen[y]) {
          seen[y] = 1;
          stack.push_back(y);
        }
      };
      for (const auto& [w, d] : p.prob_edges[x]) push(d);
      for (const auto& [l, d] : p.act_edges[x])
        if (l.tau_only()) push(d);
    }
  }
  std::set<std::vector<std::string>> out;
  std::set<std::pair<int, std::vector<std::string>>> frontier;
  frontier.insert({p.root, {}});
  out.insert({});
  for (size_t step = 0; step < depth; ++step) {
    std::set<std::pair<int, std::vector<std::string>>> next;
    for (const auto& [s, trace] : frontier) {
      for (int v : reach[s])
        for (const auto& [l, d] : p.act_edges[v]) {
          StepLabel obs = l.hidden();
          if (obs.events.empty()) continue;
          auto t2 = trace;
          t2.push_back(obs.str());
          if (out.insert(t2).second || true) next.insert({d, t2});
        }
    }
    for (const auto& item : next) out.insert(item.second);
    frontier = std::move(next);
  }
  return out;
}

std::string AbpReport::to_text() const {
  std::ostringstream os;
  os << "observable weak step traces equal: " << (traces_equal ? "yes" : "NO") << "\n";
  if (!traces_equal) os << "first difference: " << first_difference << "\n";
  os << "AB:   " << ab_states << " states, " << ab_traces << " traces\n";
  os << "Buff: " << buff_states << " states, " << buff_traces << " traces\n";
  os << "prbstep verdict (reported, not gated): "
     << (prbs_equivalent ? "equivalent" : "not equivalent") << "\n";
  os << "elapsed: " << seconds << " s\n";
  return os.str();
}

AbpReport run_abp(const AbpOptions& opts) {
  auto start = std::chrono::steady_clock::now();
  AbpReport report;
  SpecFile spec = parse_spec_file(abp_spec_text(opts));
  Plts ab = build_plts(t_recvar("AB"), spec, opts.limits);
  Plts buff = build_plts(t_recvar("Buff"), spec, opts.limits);
  report.ab_states = ab.states.size();
  report.buff_states = buff.states.size();
  auto ta = weak_step_traces(ab, opts.trace_depth);
  auto tb = weak_step_traces(buff, opts.trace_depth);
  report.ab_traces = ta.size();
  report.buff_traces = tb.size();
  report.traces_equal = ta == tb;
  if (!report.traces_equal) {
    std::vector<std::vector<std::string>> diff;
    std::set_symmetric_difference(ta.begin(), ta.end(), tb.begin(), tb.end(),
                                  std::back_inserter(diff));
    if (!diff.empty()) {
      std::string side = ta.count(diff.front()) ? "AB only: " : "Buff only: ";
      std::string tr;
      for (const auto& l : diff.front()) tr += l + " ";
      report.first_difference = side + tr;
    }
  }
  report.prbs_equivalent = prob_rooted_branching_step_bisim(ab, buff).equivalent;
  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace pptc
