#include "hengine/isomorphism.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <vector>

namespace hengine {

namespace {

struct Signature {
  std::string cls;
  std::map<std::string, Value> attrs;
  std::map<std::string, int> out_deg;
  std::map<std::string, int> in_deg;

  bool operator==(const Signature&) const = default;
};

using PairLinks = std::map<std::pair<ObjectId, ObjectId>, std::map<std::string, int>>;

struct Side {
  std::vector<ObjectId> ids;
  std::map<ObjectId, Signature> sig;
  PairLinks pair_links;

  explicit Side(const InstanceGraph& g) {
    for (const auto& [id, obj] : g.objects()) {
      ids.push_back(id);
      sig.emplace(id, Signature{obj.cls->qualified(), obj.attrs, {}, {}});
    }
    for (const Link& l : g.links()) {
      ++sig.at(l.src).out_deg[l.ref];
      ++sig.at(l.tgt).in_deg[l.ref];
      ++pair_links[{l.src, l.tgt}][l.ref];
    }
  }

  const std::map<std::string, int>* between(ObjectId s, ObjectId t) const {
    auto it = pair_links.find({s, t});
    return it == pair_links.end() ? nullptr : &it->second;
  }
};

bool same_links(const Side& a, ObjectId as, ObjectId at, const Side& b, ObjectId bs,
                ObjectId bt) {
  const auto* la = a.between(as, at);
  const auto* lb = b.between(bs, bt);
  if (!la || !lb) return !la && !lb;
  return *la == *lb;
}

struct Search {
  const Side& a;
  const Side& b;
  std::map<ObjectId, ObjectId> fwd;
  std::map<ObjectId, bool> used;

  bool run(std::size_t i) {
    if (i == a.ids.size()) return true;
    ObjectId v = a.ids[i];
    const Signature& vs = a.sig.at(v);
    for (ObjectId w : b.ids) {
      if (used[w]) continue;
      if (!(b.sig.at(w) == vs)) continue;
      if (!consistent(v, w)) continue;
      fwd.emplace(v, w);
      used[w] = true;
      if (run(i + 1)) return true;
      fwd.erase(v);
      used[w] = false;
    }
    return false;
  }

  bool consistent(ObjectId v, ObjectId w) const {
    if (!same_links(a, v, v, b, w, w)) return false;
    for (const auto& [u, x] : fwd) {
      if (!same_links(a, u, v, b, x, w)) return false;
      if (!same_links(a, v, u, b, w, x)) return false;
    }
    return true;
  }
};

}  // namespace

bool isomorphic(const InstanceGraph& a, const InstanceGraph& b) {
  if (a.objects().size() != b.objects().size()) return false;
  if (a.links().size() != b.links().size()) return false;
  Side sa(a), sb(b);

  // A multiset mismatch of signatures rules the bijection out immediately.
  std::vector<const Signature*> xs, ys;
  for (const auto& [id, s] : sa.sig) xs.push_back(&s);
  for (const auto& [id, s] : sb.sig) ys.push_back(&s);
  auto by_value = [](const Signature* p, const Signature* q) {
    if (p->cls != q->cls) return p->cls < q->cls;
    if (p->attrs != q->attrs) return p->attrs < q->attrs;
    if (p->out_deg != q->out_deg) return p->out_deg < q->out_deg;
    return p->in_deg < q->in_deg;
  };
  std::sort(xs.begin(), xs.end(), by_value);
  std::sort(ys.begin(), ys.end(), by_value);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(*xs[i] == *ys[i])) return false;
  }

  Search search{sa, sb, {}, {}};
  return search.run(0);
}

}  // namespace hengine
