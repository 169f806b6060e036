#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "minij/span.hpp"
#include "minij/types.hpp"

namespace minij {

// A declaration position an annotation can be written at. `path` walks into
// type arguments (array element = step 0); an empty path is the top level.
// The site identity is the structural part; file/line/col/offset locate the
// exact insertion point in source and are derived during fix construction.
struct AnnotationSite {
  enum class Kind { FieldType, ParamType, ReturnType, LocalType };

  Kind kind = Kind::FieldType;
  std::string owner;   // class name
  std::string member;  // field name, or method name for Param/Return/Local
  int index = -1;      // parameter index (ParamType)
  int localId = -1;    // LocalType
  std::vector<int> path;

  std::string file;
  int line = 0;
  int col = 0;
  int offset = 0;

  std::string key() const;  // structural identity
  bool operator<(const AnnotationSite& o) const { return key() < o.key(); }
  bool operator==(const AnnotationSite& o) const { return key() == o.key(); }
};

std::string site_kind_name(AnnotationSite::Kind k);

// Where a fix came from; drives search acceptance and patch provenance.
enum class FixOrigin { Direct, Generics, PolyParams, PolyFallback };

struct Fix {
  AnnotationSite site;
  Qualifier ann = Qualifier::Untainted;
  FixOrigin origin = FixOrigin::Direct;
};

// Set of fixes or the failure value. combine() is a commutative, associative
// union that absorbs failure and fails on conflicting annotations at one site.
class FixSet {
 public:
  static FixSet bottom() {
    FixSet f;
    f.bot_ = true;
    return f;
  }
  FixSet() = default;

  bool isBottom() const { return bot_; }
  bool empty() const { return !bot_ && fixes_.empty(); }
  const std::vector<Fix>& fixes() const { return fixes_; }

  // Adds one fix; duplicate site with same qualifier is a no-op, with a
  // different qualifier turns the set to bottom.
  void add(const Fix& f);
  FixSet combine(const FixSet& o) const;

  bool hasOrigin(FixOrigin o) const;
  std::string key() const;  // canonical identity for dedup

 private:
  bool bot_ = false;
  std::vector<Fix> fixes_;  // kept sorted by site key
};

// Annotations applied on top of the parsed program during search. Maps a
// site's structural key to the qualifier it pins.
class AnnotationOverlay {
 public:
  void set(const AnnotationSite& s, Qualifier q);
  std::optional<Qualifier> get(const AnnotationSite& s) const;
  std::optional<Qualifier> get(AnnotationSite::Kind kind, const std::string& owner,
                               const std::string& member, int index, int localId,
                               const std::vector<int>& path) const;
  bool conflicts(const Fix& f) const;
  void remove(const AnnotationSite& s);
  size_t size() const { return anns_.size(); }
  const std::map<std::string, std::pair<AnnotationSite, Qualifier>>& entries() const {
    return anns_;
  }

 private:
  std::map<std::string, std::pair<AnnotationSite, Qualifier>> anns_;
};

}  // namespace minij
