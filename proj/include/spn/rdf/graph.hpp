#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "spn/rdf/term.hpp"

namespace spn::rdf {

using TermId = std::uint32_t;
using IdTriple = std::array<TermId, 3>;
using PrefixMap = std::map<std::string, std::string>;

// Pattern over interned ids; an absent position is a wildcard.
struct IdPattern {
  std::optional<TermId> s;
  std::optional<TermId> p;
  std::optional<TermId> o;
};

// Indexed triple set. Terms are interned into a dictionary that only grows;
// three sorted permutations (spo, pos, osp) answer every bound/unbound mix.
class Graph {
 public:
  Graph() = default;
  static Graph with_default_prefixes();

  bool insert(const Triple& t);
  bool remove(const Triple& t);
  bool contains(const Triple& t) const;
  std::size_t size() const { return spo_.size(); }
  bool empty() const { return spo_.empty(); }

  std::vector<Triple> match(const std::optional<Term>& s, const std::optional<Term>& p,
                            const std::optional<Term>& o) const;

  // All triples in (subject, predicate, object) term order.
  std::vector<Triple> triples() const;
  // Every distinct term occurring in some triple.
  std::set<Term> terms() const;

  // Convenience lookups used throughout model extraction.
  std::vector<Term> objects(const Term& s, const Term& p) const;
  std::vector<Term> subjects(const Term& p, const Term& o) const;
  std::optional<Term> object(const Term& s, const Term& p) const;

  // Id-level access for the query engine.
  std::optional<TermId> lookup(const Term& t) const;
  TermId intern(const Term& t);
  const Term& term(TermId id) const { return dictionary_[id]; }
  bool insert_ids(const IdTriple& t);
  bool remove_ids(const IdTriple& t);
  bool contains_ids(const IdTriple& t) const { return spo_.count(t) != 0; }
  std::size_t count(const IdPattern& pattern) const;

  template <typename Fn>
  void for_each(const IdPattern& pattern, Fn&& fn) const;

  PrefixMap& prefixes() { return prefixes_; }
  const PrefixMap& prefixes() const { return prefixes_; }

  // A blank-node label unused by any earlier parse session on this graph.
  std::string fresh_blank_label();

  friend bool operator==(const Graph& a, const Graph& b) { return a.triples() == b.triples(); }

 private:
  static constexpr TermId kMin = 0;
  static constexpr TermId kMax = UINT32_MAX;

  IdTriple resolve(const Triple& t);
  std::optional<IdTriple> find(const Triple& t) const;

  std::vector<Term> dictionary_;
  std::unordered_map<Term, TermId, TermHash> ids_;
  std::set<IdTriple> spo_;
  std::set<IdTriple> pos_;  // stored as (p, o, s)
  std::set<IdTriple> osp_;  // stored as (o, s, p)
  PrefixMap prefixes_;
  std::uint64_t blank_counter_ = 0;
};

template <typename Fn>
void Graph::for_each(const IdPattern& q, Fn&& fn) const {
  auto scan = [&](const std::set<IdTriple>& index, IdTriple lo, IdTriple hi, auto&& unpermute) {
    for (auto it = index.lower_bound(lo); it != index.end() && *it <= hi; ++it) {
      const IdTriple t = unpermute(*it);
      if (q.s && t[0] != *q.s) continue;
      if (q.p && t[1] != *q.p) continue;
      if (q.o && t[2] != *q.o) continue;
      if (!fn(t)) return;
    }
  };
  auto id = [](const IdTriple& t) { return t; };
  auto from_pos = [](const IdTriple& t) { return IdTriple{t[2], t[0], t[1]}; };
  auto from_osp = [](const IdTriple& t) { return IdTriple{t[1], t[2], t[0]}; };

  if (q.s) {
    if (q.p) {
      if (q.o) {
        IdTriple t{*q.s, *q.p, *q.o};
        if (spo_.count(t)) fn(t);
        return;
      }
      scan(spo_, {*q.s, *q.p, kMin}, {*q.s, *q.p, kMax}, id);
    } else if (q.o) {
      scan(osp_, {*q.o, *q.s, kMin}, {*q.o, *q.s, kMax}, from_osp);
    } else {
      scan(spo_, {*q.s, kMin, kMin}, {*q.s, kMax, kMax}, id);
    }
  } else if (q.p) {
    if (q.o) {
      scan(pos_, {*q.p, *q.o, kMin}, {*q.p, *q.o, kMax}, from_pos);
    } else {
      scan(pos_, {*q.p, kMin, kMin}, {*q.p, kMax, kMax}, from_pos);
    }
  } else if (q.o) {
    scan(osp_, {*q.o, kMin, kMin}, {*q.o, kMax, kMax}, from_osp);
  } else {
    for (const auto& t : spo_) {
      if (!fn(t)) return;
    }
  }
}

}  // namespace spn::rdf
