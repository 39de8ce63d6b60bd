// Copyright 2026 The probft Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <functional>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "probft/analysis.hpp"
#include "probft/config.hpp"

namespace probft::analysis {

std::string_view to_string(Protocol p) {
  switch (p) {
    case Protocol::kPbft:
      return "pbft";
    case Protocol::kProbft:
      return "probft";
    case Protocol::kHotStuff:
      return "hotstuff";
  }
  return "unknown";
}

MessageCount message_counts(Protocol p, std::uint32_t n, std::uint32_t f, double l, double o) {
  const std::uint64_t nn = n;
  MessageCount c;
  switch (p) {
    case Protocol::kPbft:
      c.leader = nn - 1;
      c.votes = 2 * nn * (nn - 1);
      break;
    case Protocol::kProbft:
      c.leader = nn - 1;
      c.votes = 2 * nn * quorum_sizes(n, f, l, o).s;
      break;
    case Protocol::kHotStuff:
      c.leader = 4 * (nn - 1);
      c.votes = 4 * (nn - 1);
      break;
  }
  return c;
}

std::uint32_t Grid::faults(std::uint32_t n, double ratio) {
  const auto f = static_cast<std::uint32_t>(std::floor(ratio * n + 1e-9));
  if (3ull * f >= n) {
    throw ConfigError(fmt::format("grid point n={} f/n={} gives f={} >= n/3", n, ratio, f));
  }
  return f;
}

namespace {

struct NamedBound {
  const char* name;
  std::function<BoundResult(double n, double f, double o, double l, double q)> eval;
};

const std::vector<NamedBound>& bound_table() {
  static const std::vector<NamedBound> table{
      {"quorum_prob_lower", [](double n, double f, double o, double, double q) {
         return quorum_prob_lower_bound(n, f, o, q);
       }},
      {"epsilon_quorum", [](double n, double f, double o, double l, double) {
         return epsilon_quorum_bound(n, f, o, l);
       }},
      {"commit_quorum_lower", [](double n, double f, double o, double, double q) {
         return commit_quorum_lower_bound(n, f, o, q);
       }},
      {"per_replica_termination", [](double n, double f, double o, double, double q) {
         return per_replica_termination_bound(n, f, o, q);
       }},
      {"all_replicas_termination", [](double n, double f, double o, double, double q) {
         return all_replicas_termination_bound(n, f, o, q);
       }},
      {"asymptotic_termination", [](double n, double f, double, double, double) {
         return asymptotic_termination_bound(n, f);
       }},
      {"decide_prob_upper", [](double n, double f, double o, double, double q) {
         return decide_prob_upper_bound(n, o, q, (n + f) / 2);
       }},
      {"agreement_violation_in_view", [](double n, double f, double o, double, double q) {
         return agreement_violation_in_view_bound(n, f, o, q);
       }},
      {"agreement_violation_squared", [](double n, double f, double o, double, double q) {
         return agreement_violation_squared_bound(n, f, o, q);
       }},
      {"view_change_violation", [](double n, double f, double o, double, double q) {
         return view_change_violation_bound(n, f, o, q);
       }},
      {"safety_one_view", [](double n, double f, double o, double, double q) {
         return safety_bound(n, f, o, q, 1);
       }},
  };
  return table;
}

}  // namespace

void write_bounds_csv(std::ostream& out, const Grid& grid) {
  out << kBoundsCsvVersion << '\n';
  out << "n,f,o,l,q,s,bound,value,raw,applicable,reason\n";
  for (auto n : grid.n) {
    for (double ratio : grid.f_ratio) {
      const auto f = Grid::faults(n, ratio);
      for (double o : grid.o) {
        for (double l : grid.l) {
          const auto qs = quorum_sizes(n, f, l, o);
          for (const auto& b : bound_table()) {
            const auto r = b.eval(n, f, o, l, qs.q);
            fmt::print(out, "{},{},{},{},{},{},{},{:.10g},{:.10g},{},{}\n", n, f, o, l, qs.q, qs.s,
                       b.name, r.value, r.raw, r.applicable ? 1 : 0, r.reason);
          }
        }
      }
    }
  }
}

void write_msgcount_csv(std::ostream& out, const std::vector<std::uint32_t>& ns, double l,
                        const std::vector<double>& os) {
  out << kMsgCountCsvVersion << '\n';
  out << "n,pbft,hotstuff";
  for (double o : os) out << fmt::format(",probft_o{}", o);
  for (double o : os) out << fmt::format(",ratio_o{}", o);
  out << '\n';
  for (auto n : ns) {
    const auto pbft = message_counts(Protocol::kPbft, n, 0, l, 2);
    const auto hotstuff = message_counts(Protocol::kHotStuff, n, 0, l, 2);
    out << fmt::format("{},{},{}", n, pbft.total(), hotstuff.total());
    std::vector<double> ratios;
    for (double o : os) {
      const auto pro = message_counts(Protocol::kProbft, n, 0, l, o).total();
      out << ',' << pro;
      ratios.push_back(static_cast<double>(pro) / static_cast<double>(pbft.total()));
    }
    for (double r : ratios) out << fmt::format(",{:.6f}", r);
    out << '\n';
  }
}

}  // namespace probft::analysis
