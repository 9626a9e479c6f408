#include "spn/rdf/graph.hpp"

#include <algorithm>

#include "spn/rdf/vocab.hpp"

namespace spn::rdf {

Graph Graph::with_default_prefixes() {
  Graph g;
  g.prefixes_ = ns::default_prefixes();
  return g;
}

std::optional<TermId> Graph::lookup(const Term& t) const {
  auto it = ids_.find(t);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

TermId Graph::intern(const Term& t) {
  auto [it, inserted] = ids_.try_emplace(t, static_cast<TermId>(dictionary_.size()));
  if (inserted) dictionary_.push_back(t);
  return it->second;
}

IdTriple Graph::resolve(const Triple& t) {
  return {intern(t.subject), intern(t.predicate), intern(t.object)};
}

std::optional<IdTriple> Graph::find(const Triple& t) const {
  auto s = lookup(t.subject);
  auto p = lookup(t.predicate);
  auto o = lookup(t.object);
  if (!s || !p || !o) return std::nullopt;
  return IdTriple{*s, *p, *o};
}

bool Graph::insert_ids(const IdTriple& t) {
  if (!spo_.insert(t).second) return false;
  pos_.insert({t[1], t[2], t[0]});
  osp_.insert({t[2], t[0], t[1]});
  return true;
}

bool Graph::remove_ids(const IdTriple& t) {
  if (spo_.erase(t) == 0) return false;
  pos_.erase({t[1], t[2], t[0]});
  osp_.erase({t[2], t[0], t[1]});
  return true;
}

bool Graph::insert(const Triple& t) { return insert_ids(resolve(t)); }

bool Graph::remove(const Triple& t) {
  auto ids = find(t);
  return ids && remove_ids(*ids);
}

bool Graph::contains(const Triple& t) const {
  auto ids = find(t);
  return ids && spo_.count(*ids) != 0;
}

std::size_t Graph::count(const IdPattern& pattern) const {
  std::size_t n = 0;
  for_each(pattern, [&](const IdTriple&) {
    ++n;
    return true;
  });
  return n;
}

std::vector<Triple> Graph::match(const std::optional<Term>& s, const std::optional<Term>& p,
                                 const std::optional<Term>& o) const {
  IdPattern q;
  if (s) {
    if (!(q.s = lookup(*s))) return {};
  }
  if (p) {
    if (!(q.p = lookup(*p))) return {};
  }
  if (o) {
    if (!(q.o = lookup(*o))) return {};
  }
  std::vector<Triple> out;
  for_each(q, [&](const IdTriple& t) {
    out.push_back({term(t[0]), term(t[1]), term(t[2])});
    return true;
  });
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Triple> Graph::triples() const {
  std::vector<Triple> out;
  out.reserve(spo_.size());
  for (const auto& t : spo_) out.push_back({term(t[0]), term(t[1]), term(t[2])});
  std::sort(out.begin(), out.end());
  return out;
}

std::set<Term> Graph::terms() const {
  std::set<TermId> seen;
  for (const auto& t : spo_) seen.insert(t.begin(), t.end());
  std::set<Term> out;
  for (TermId id : seen) out.insert(term(id));
  return out;
}

std::vector<Term> Graph::objects(const Term& s, const Term& p) const {
  std::vector<Term> out;
  for (auto& t : match(s, p, std::nullopt)) out.push_back(std::move(t.object));
  return out;
}

std::vector<Term> Graph::subjects(const Term& p, const Term& o) const {
  std::vector<Term> out;
  for (auto& t : match(std::nullopt, p, o)) out.push_back(std::move(t.subject));
  return out;
}

std::optional<Term> Graph::object(const Term& s, const Term& p) const {
  auto all = objects(s, p);
  if (all.empty()) return std::nullopt;
  return all.front();
}

std::string Graph::fresh_blank_label() { return "b" + std::to_string(blank_counter_++); }

}  // namespace spn::rdf
