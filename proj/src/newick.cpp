#include "tbrkit/newick.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <sstream>

#include "tbrkit/errors.hpp"

namespace tbrkit {

namespace {

bool reserved_label(const std::string& s) {
  if (s.size() < 3 || s[0] != '$' || s[1] != 'R') return false;
  return std::all_of(s.begin() + 2, s.end(), [](char c) { return std::isdigit(c); });
}

struct Parser {
  const std::string& text;
  std::size_t pos = 0;
  bool allow_reserved;
  MutableGraph g;

  explicit Parser(const std::string& t, bool ar) : text(t), allow_reserved(ar) {}

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }
  char peek() {
    skip_ws();
    if (pos >= text.size()) throw ParseError("newick: unexpected end of input", pos);
    return text[pos];
  }
  void expect(char c) {
    if (peek() != c)
      throw ParseError(std::string("newick: expected '") + c + "'", pos);
    ++pos;
  }

  bool label_char(char c) const {
    if (std::isspace(static_cast<unsigned char>(c))) return false;
    return c != '(' && c != ')' && c != ',' && c != ':' && c != ';';
  }

  std::string read_label() {
    skip_ws();
    std::size_t start = pos;
    while (pos < text.size() && label_char(text[pos])) ++pos;
    return text.substr(start, pos - start);
  }

  void discard_length() {
    skip_ws();
    if (pos < text.size() && text[pos] == ':') {
      ++pos;
      skip_ws();
      std::size_t start = pos;
      while (pos < text.size() &&
             (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '.' ||
              text[pos] == '-' || text[pos] == '+' || text[pos] == 'e' || text[pos] == 'E'))
        ++pos;
      if (pos == start) throw ParseError("newick: missing branch length after ':'", pos);
    }
  }

  // Returns the vertex of the subtree just read; children_out collects the
  // child count to enforce binarity at the caller.
  int read_node(bool is_root) {
    skip_ws();
    if (peek() == '(') {
      ++pos;
      std::vector<int> children;
      children.push_back(read_node(false));
      while (peek() == ',') {
        ++pos;
        children.push_back(read_node(false));
      }
      expect(')');
      std::size_t here = pos;
      read_label();  // internal label, discarded
      discard_length();
      int limit = is_root ? 3 : 2;
      if (static_cast<int>(children.size()) > limit)
        throw ParseError("newick: non-binary internal vertex", here);
      if (static_cast<int>(children.size()) < 2)
        throw ParseError("newick: vertex with a single child", here);
      int v = g.add_vertex();
      for (int c : children) g.add_edge(v, c);
      return v;
    }
    std::size_t here = pos;
    std::string label = read_label();
    if (label.empty()) throw ParseError("newick: empty leaf label", here);
    if (!allow_reserved && reserved_label(label))
      throw ParseError("newick: label '" + label + "' uses the reserved $R namespace", here);
    discard_length();
    return g.add_vertex(label);
  }

  UnrootedTree run() {
    skip_ws();
    if (pos >= text.size()) throw ParseError("newick: empty input", 0);
    if (text[pos] != '(')
      throw ParseError("newick: tree must start with '('", pos);
    int root = read_node(true);
    expect(';');
    skip_ws();
    if (pos != text.size())
      throw ParseError("newick: trailing characters after ';'", pos);
    if (g.degree(root) == 2) g.suppress_vertex(root);
    try {
      return UnrootedTree::from_graph(g);
    } catch (const InvalidArgument& e) {
      throw ParseError(std::string("newick: ") + e.what());
    }
  }
};

}  // namespace

UnrootedTree parse_newick(const std::string& text, bool allow_reserved) {
  Parser p(text, allow_reserved);
  return p.run();
}

std::string serialize_newick(const UnrootedTree& t) {
  // Root at the internal vertex next to the smallest leaf; the two-leaf tree
  // is written directly.
  std::vector<Taxon> taxa = t.taxa();
  if (t.leaf_count() == 2) return "(" + taxa[0] + "," + taxa[1] + ");";

  int small_leaf = t.leaf_vertex(taxa[0]);
  int root = t.neighbors(small_leaf)[0];

  // For each subtree, produce (text, smallest contained taxon).
  std::function<std::pair<std::string, Taxon>(int, int)> render =
      [&](int v, int from) -> std::pair<std::string, Taxon> {
    if (t.is_leaf(v)) return {t.label(v), t.label(v)};
    std::vector<std::pair<Taxon, std::string>> parts;
    for (int u : t.neighbors(v)) {
      if (u == from) continue;
      auto [txt, mn] = render(u, v);
      parts.emplace_back(mn, txt);
    }
    std::sort(parts.begin(), parts.end());
    std::string out = "(";
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (i) out += ",";
      out += parts[i].second;
    }
    out += ")";
    return {out, parts[0].first};
  };

  std::vector<std::pair<Taxon, std::string>> parts;
  for (int u : t.neighbors(root)) {
    auto [txt, mn] = render(u, root);
    parts.emplace_back(mn, txt);
  }
  std::sort(parts.begin(), parts.end());
  std::string out = "(";
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += ",";
    out += parts[i].second;
  }
  out += ");";
  return out;
}

std::vector<UnrootedTree> read_newick_file(const std::string& path, bool allow_reserved) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  std::vector<UnrootedTree> out;
  std::string line;
  while (std::getline(in, line)) {
    std::string trimmed = line;
    trimmed.erase(0, trimmed.find_first_not_of(" \t\r\n"));
    if (trimmed.empty()) continue;
    out.push_back(parse_newick(trimmed, allow_reserved));
  }
  if (out.empty()) throw ParseError("no trees in '" + path + "'");
  return out;
}

void write_newick_file(const std::string& path, const std::vector<UnrootedTree>& trees) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  for (const auto& t : trees) out << serialize_newick(t) << "\n";
}

}  // namespace tbrkit
