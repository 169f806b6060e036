#include "minij/sites.hpp"

#include <algorithm>
#include <sstream>

namespace minij {

std::string site_kind_name(AnnotationSite::Kind k) {
  switch (k) {
    case AnnotationSite::Kind::FieldType: return "FieldType";
    case AnnotationSite::Kind::ParamType: return "ParamType";
    case AnnotationSite::Kind::ReturnType: return "ReturnType";
    case AnnotationSite::Kind::LocalType: return "LocalType";
  }
  return "?";
}

std::string AnnotationSite::key() const {
  std::ostringstream os;
  os << site_kind_name(kind) << '|' << owner << '|' << member << '|' << index << '|' << localId
     << '|';
  for (int p : path) os << p << '.';
  return os.str();
}

void FixSet::add(const Fix& f) {
  if (bot_) return;
  auto it = std::lower_bound(fixes_.begin(), fixes_.end(), f, [](const Fix& a, const Fix& b) {
    return a.site.key() < b.site.key();
  });
  if (it != fixes_.end() && it->site == f.site) {
    if (it->ann != f.ann) {
      bot_ = true;
      fixes_.clear();
    }
    return;
  }
  fixes_.insert(it, f);
}

FixSet FixSet::combine(const FixSet& o) const {
  if (bot_ || o.bot_) return bottom();
  FixSet r = *this;
  for (const auto& f : o.fixes_) {
    r.add(f);
    if (r.bot_) return bottom();
  }
  return r;
}

bool FixSet::hasOrigin(FixOrigin o) const {
  for (const auto& f : fixes_)
    if (f.origin == o) return true;
  return false;
}

std::string FixSet::key() const {
  if (bot_) return "<bottom>";
  std::ostringstream os;
  for (const auto& f : fixes_) os << f.site.key() << '=' << qualifier_name(f.ann) << ';';
  return os.str();
}

void AnnotationOverlay::set(const AnnotationSite& s, Qualifier q) {
  anns_[s.key()] = {s, q};
}

std::optional<Qualifier> AnnotationOverlay::get(const AnnotationSite& s) const {
  auto it = anns_.find(s.key());
  if (it == anns_.end()) return std::nullopt;
  return it->second.second;
}

std::optional<Qualifier> AnnotationOverlay::get(AnnotationSite::Kind kind,
                                                const std::string& owner,
                                                const std::string& member, int index, int localId,
                                                const std::vector<int>& path) const {
  AnnotationSite s;
  s.kind = kind;
  s.owner = owner;
  s.member = member;
  s.index = index;
  s.localId = localId;
  s.path = path;
  return get(s);
}

bool AnnotationOverlay::conflicts(const Fix& f) const {
  auto q = get(f.site);
  return q && *q != f.ann;
}

void AnnotationOverlay::remove(const AnnotationSite& s) { anns_.erase(s.key()); }

}  // namespace minij
