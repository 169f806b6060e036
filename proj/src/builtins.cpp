#include "minij/builtins.hpp"

namespace minij {

namespace {

ParsedType ty(const std::string& name, std::vector<ParsedType> args = {}) {
  ParsedType t;
  t.name = name;
  t.args = std::move(args);
  return t;
}

ParsedType arr(ParsedType elem) {
  ParsedType t;
  t.shape = ParsedType::Shape::Array;
  t.args.push_back(std::move(elem));
  return t;
}

ParsedType ann(Qualifier q, ParsedType t) {
  t.ann = q;
  return t;
}

BuiltinMethod method(std::string owner, std::string name, ParsedType ret,
                     std::vector<ParsedType> params, bool isStatic = false) {
  BuiltinMethod m;
  m.owner = std::move(owner);
  m.name = std::move(name);
  m.returnType = std::move(ret);
  m.paramTypes = std::move(params);
  m.isStatic = isStatic;
  return m;
}

std::vector<BuiltinClass> build() {
  std::vector<BuiltinClass> cs;

  cs.push_back({"Object", "lib.lang", {}, "", {}});
  cs.push_back({"String",
                "lib.lang",
                {},
                "",
                {
                    method("String", "substring", ty("String"), {ty("int"), ty("int")}),
                    method("String", "lastIndexOf", ty("int"), {ty("String")}),
                    method("String", "concat", ty("String"), {ty("String")}),
                    method("String", "length", ty("int"), {}),
                    method("String", "toString", ty("String"), {}),
                }});
  cs.push_back({"Integer", "lib.lang", {}, "", {}});
  cs.push_back({"Class", "lib.lang", {}, "", {}});
  cs.push_back({"Function", "lib.lang", {}, "", {}});

  cs.push_back({"Collection",
                "lib.util",
                {"E"},
                "",
                {
                    method("Collection", "add", ty("boolean"), {ty("E")}),
                    method("Collection", "size", ty("int"), {}),
                    method("Collection", "iterator", ty("Iterator", {ty("E")}), {}),
                    // A fresh array; its contents mirror the collection's
                    // element qualifier through E.
                    method("Collection", "toArray", ann(Qualifier::Untainted, arr(ty("E"))), {}),
                }});
  cs.push_back({"Iterator",
                "lib.util",
                {"E"},
                "",
                {
                    method("Iterator", "next", ty("E"), {}),
                    method("Iterator", "hasNext", ty("boolean"), {}),
                }});
  cs.push_back({"List",
                "lib.util",
                {"E"},
                "Collection",
                {
                    method("List", "get", ty("E"), {ty("int")}),
                }});
  cs.push_back({"ArrayList", "lib.util", {"E"}, "List", {}});
  cs.push_back({"Map",
                "lib.util",
                {"K", "V"},
                "",
                {
                    method("Map", "get", ty("V"), {ty("K")}),
                    method("Map", "put", ty("V"), {ty("K"), ty("V")}),
                    method("Map", "values", ty("Collection", {ty("V")}), {}),
                    method("Map", "containsKey", ty("boolean"), {ty("K")}),
                }});
  cs.push_back({"HashMap", "lib.util", {"K", "V"}, "Map", {}});
  cs.push_back({"Properties",
                "lib.util",
                {},
                "",
                {
                    method("Properties", "getProperty", ty("String"), {ty("String")}),
                    method("Properties", "setProperty", ty("String"),
                           {ty("String"), ty("String")}),
                }});

  cs.push_back({"Path",
                "lib.io",
                {},
                "",
                {
                    method("Path", "toAbsolutePath", ty("Path"), {}),
                    method("Path", "toFile", ty("File"), {}),
                }});
  cs.push_back({"File",
                "lib.io",
                {},
                "",
                {
                    method("File", "getName", ty("String"), {}),
                    method("File", "getPath", ty("String"), {}),
                }});
  cs.push_back({"Paths",
                "lib.io",
                {},
                "",
                {
                    method("Paths", "get", ty("Path"), {ty("String")}, true),
                }});

  cs.push_back({"Env",
                "lib.env",
                {},
                "",
                {
                    method("Env", "input", ty("String"), {}, true),
                    method("Env", "readLine", ty("String"), {}, true),
                }});
  cs.push_back({"TaintSource",
                "lib.net",
                {},
                "",
                {
                    method("TaintSource", "getTaintedData", ty("String"), {}),
                    method("TaintSource", "getTaintData", ty("List", {ty("String")}), {}),
                    method("TaintSource", "fetchProps", ty("Properties"), {}, true),
                }});
  cs.push_back({"Fetcher",
                "lib.net",
                {},
                "",
                {
                    method("Fetcher", "fetch", ty("String"), {ty("String")}, true),
                }});
  cs.push_back({"Db",
                "lib.db",
                {},
                "",
                {
                    method("Db", "exec", ty("int"), {ty("String")}, true),
                }});
  cs.push_back({"Esc",
                "lib.esc",
                {},
                "",
                {
                    method("Esc", "clean", ty("String"), {ty("String")}, true),
                }});

  return cs;
}

}  // namespace

const std::vector<BuiltinClass>& load_builtins() {
  static const std::vector<BuiltinClass> kBuiltins = build();
  return kBuiltins;
}

}  // namespace minij
