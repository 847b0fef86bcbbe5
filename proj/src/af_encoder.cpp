#include "arbiter/af_encoder.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

#include "arbiter/error.hpp"

namespace arbiter {

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<int> rank_;
};

}  // namespace

ArgumentationFramework encode_af(const Debate& debate) {
  // Work in sorted-id space so the result does not depend on list order.
  std::vector<std::size_t> order(debate.adus.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return debate.adus[a].id < debate.adus[b].id; });
  std::map<std::string, std::size_t> rank;
  for (std::size_t r = 0; r < order.size(); ++r) rank.emplace(debate.adus[order[r]].id, r);

  auto rank_of = [&](const std::string& id) {
    auto it = rank.find(id);
    if (it == rank.end())
      throw ValidationError("debate '" + debate.id + "': relation endpoint '" + id + "' is not a known ADU");
    return it->second;
  };

  DisjointSets sets(order.size());
  for (const Relation& rel : debate.relations)
    if (rel.kind != RelationKind::Conflict) sets.unite(rank_of(rel.source), rank_of(rel.target));

  // Ranks ascend, so the first rank seen for a root is the group's smallest id.
  std::map<std::size_t, ArgId> group_of_root;
  std::vector<AbstractArgument> args;
  std::vector<ArgId> group_of_rank(order.size());
  for (std::size_t r = 0; r < order.size(); ++r) {
    const std::size_t root = sets.find(r);
    auto [it, inserted] = group_of_root.emplace(root, static_cast<ArgId>(args.size()));
    if (inserted) args.push_back(AbstractArgument{it->second, {}, Stance::Favour, ""});
    group_of_rank[r] = it->second;
    args[it->second].adu_ids.push_back(debate.adus[order[r]].id);
  }

  for (AbstractArgument& arg : args) {
    std::size_t favour = 0, against = 0;
    for (const auto& adu_id : arg.adu_ids)
      (debate.adus[order[rank.at(adu_id)]].stance == Stance::Favour ? favour : against) += 1;
    if (favour == against)
      throw EncodingError("debate '" + debate.id + "': argument group starting at ADU '" + arg.adu_ids.front() +
                          "' has a stance tie (" + std::to_string(favour) + " F / " +
                          std::to_string(against) + " A)");
    arg.stance = favour > against ? Stance::Favour : Stance::Against;
  }

  std::set<std::pair<ArgId, ArgId>> attacks;
  for (const Relation& rel : debate.relations)
    if (rel.kind == RelationKind::Conflict)
      attacks.emplace(group_of_rank[rank_of(rel.source)], group_of_rank[rank_of(rel.target)]);

  return ArgumentationFramework(debate.id, std::move(args), std::move(attacks));
}

AfSummary af_summary(const ArgumentationFramework& af) {
  AfSummary s;
  s.arguments = af.size();
  s.attacks = af.attacks().size();
  for (const auto& a : af.arguments())
    (a.stance == Stance::Favour ? s.favour_arguments : s.against_arguments) += 1;
  for (const auto& [from, to] : af.attacks())
    if (from == to) ++s.self_attacks;
  return s;
}

std::string AfSummary::to_text() const {
  std::ostringstream os;
  os << "|A|=" << arguments << " |R|=" << attacks << " F=" << favour_arguments << " A=" << against_arguments
     << " self-attacks=" << self_attacks;
  return os.str();
}

}  // namespace arbiter
