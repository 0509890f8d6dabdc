// Tolerant readers for the three reply shapes: atom lists (optionally split
// into "added" and "removed" sections), a full (:init ...) block, option
// numbers, and ranked atom lists.

#include <algorithm>
#include <cctype>
#include <set>

#include "modelspace/error.hpp"
#include "modelspace/llm.hpp"

namespace modelspace {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

enum class Section { kNone, kAdd, kRemove };

struct Candidate {
  std::size_t line = 0;     // 1-based
  std::string text;         // the parenthesized group as written
  bool negated = false;
  bool in_init_block = false;
  std::optional<GroundAtom> atom;  // absent when malformed
  Section section = Section::kNone;
};

struct Scan {
  std::vector<Candidate> candidates;
  std::vector<std::string> notes;
  bool init_block = false;
};

std::optional<GroundAtom> atom_from_body(std::string_view body) {
  GroundAtom atom;
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    if (atom.predicate.empty()) {
      atom.predicate = token;
    } else {
      atom.args.push_back(token);
    }
    token.clear();
  };
  for (char c : body) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == ',' || c == '\'' || c == '"') {
      flush();
    } else if (c == '(' || c == ')') {
      return std::nullopt;
    } else {
      token += c;
    }
  }
  flush();
  if (atom.predicate.empty() || atom.predicate.front() == ':') return std::nullopt;
  return atom;
}

std::size_t matching_paren(const std::string& s, std::size_t open) {
  int depth = 0;
  for (std::size_t i = open; i < s.size(); ++i) {
    if (s[i] == '(') ++depth;
    if (s[i] == ')' && --depth == 0) return i;
  }
  return std::string::npos;
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

class Scanner {
 public:
  explicit Scanner(std::string text) : text_(std::move(text)) {
    std::size_t line = 1;
    line_of_.reserve(text_.size());
    for (char c : text_) {
      line_of_.push_back(line);
      if (c == '\n') ++line;
    }
  }

  Scan run() {
    groups(0, text_.size(), false);
    return std::move(scan_);
  }

 private:
  void groups(std::size_t from, std::size_t to, bool in_init) {
    for (std::size_t i = from; i < to; ++i) {
      if (text_[i] == ')') continue;
      if (text_[i] != '(') continue;
      const std::size_t close = matching_paren(text_, i);
      if (close == std::string::npos || close >= to) {
        scan_.notes.push_back("line " + std::to_string(line_of_[i]) + ": unbalanced '('");
        continue;
      }
      group(i, close, in_init);
      i = close;
    }
  }

  void group(std::size_t open, std::size_t close, bool in_init) {
    const std::string inner = trim(std::string_view(text_).substr(open + 1, close - open - 1));
    if (inner.rfind(":init", 0) == 0) {
      scan_.init_block = true;
      groups(open + 1, close, true);
      return;
    }
    const bool nested = inner.find('(') != std::string::npos;
    if (nested) {
      // (not (p x)) is a removal; any other wrapper, such as (and ...), is
      // looked through.
      if (inner.rfind("not", 0) == 0 && inner.size() > 3 &&
          (inner[3] == '(' || std::isspace(static_cast<unsigned char>(inner[3])))) {
        const std::size_t sub = text_.find('(', open + 1);
        const std::size_t sub_close = matching_paren(text_, sub);
        if (sub_close != std::string::npos && sub_close < close &&
            trim(std::string_view(text_).substr(sub_close + 1, close - sub_close - 1)).empty()) {
          add(sub, sub_close, true, in_init);
          return;
        }
      }
      groups(open + 1, close, in_init);
      return;
    }
    if (inner.empty()) return;
    add(open, close, false, in_init);
  }

  void add(std::size_t open, std::size_t close, bool negated, bool in_init) {
    Candidate c;
    c.line = line_of_[open];
    c.text = text_.substr(open, close - open + 1);
    c.negated = negated;
    c.in_init_block = in_init;
    c.atom = atom_from_body(std::string_view(text_).substr(open + 1, close - open - 1));
    scan_.candidates.push_back(std::move(c));
  }

  std::string text_;
  std::vector<std::size_t> line_of_;
  Scan scan_;
};

// Section headers are the text on a line before its first '('.
std::vector<Section> line_sections(const std::string& text) {
  std::vector<Section> out{Section::kNone};  // index 0 unused
  Section current = Section::kNone;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    const std::string line = text.substr(start, end - start);
    const std::string head = line.substr(0, line.find('('));
    if (head.find("remov") != std::string::npos || head.find("delet") != std::string::npos) {
      current = Section::kRemove;
    } else if (head.find("add") != std::string::npos) {
      current = Section::kAdd;
    }
    out.push_back(current);
    start = end + 1;
  }
  return out;
}

std::string note(const Candidate& c, const std::string& why) {
  return "line " + std::to_string(c.line) + ": " + c.text + ": " + why;
}

// Drops malformed and ill-typed candidates, recording why.
std::vector<Candidate> well_formed(Scan& scan, const Model& base, std::vector<std::string>& notes) {
  notes.insert(notes.end(), scan.notes.begin(), scan.notes.end());
  std::vector<Candidate> out;
  for (auto& c : scan.candidates) {
    if (!c.atom) {
      notes.push_back(note(c, "not an atom"));
      continue;
    }
    if (auto problem = check_atom(base, *c.atom)) {
      notes.push_back(note(c, *problem));
      continue;
    }
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace

ParsedEdits parse_edit_response(std::string_view text, const Model& base, ResponseMode mode) {
  const std::string lowered = lower(text);
  Scan scan = Scanner(lowered).run();
  if (mode == ResponseMode::kAuto) {
    if (trim(lowered).rfind("(:init", 0) == 0) {
      mode = ResponseMode::kFullInitBlock;
    } else if (lowered.find("removed") != std::string::npos) {
      mode = ResponseMode::kAddRemove;
    } else {
      mode = ResponseMode::kAddOnly;
    }
  }

  ParsedEdits out;
  out.mode = mode;
  const auto atoms = well_formed(scan, base, out.rejected);
  if (atoms.empty()) throw UnparseableResponse("no usable atom in the response", out.rejected);

  std::vector<ModelEdit> edits;
  std::set<GroundAtom> added;
  std::set<GroundAtom> removed;
  auto push = [&](const Candidate& c, EditKind kind) {
    const bool present = base.problem.init_contains(*c.atom);
    if (kind == EditKind::kAdd && present) {
      out.rejected.push_back(note(c, "already in init"));
    } else if (kind == EditKind::kRemove && !present) {
      out.rejected.push_back(note(c, "not in init, nothing to remove"));
    } else if ((kind == EditKind::kAdd ? removed : added).count(*c.atom)) {
      out.rejected.push_back(note(c, "both added and removed"));
    } else if ((kind == EditKind::kAdd ? added : removed).insert(*c.atom).second) {
      edits.push_back({kind, *c.atom});
    }
  };

  if (mode == ResponseMode::kFullInitBlock) {
    std::set<GroundAtom> listed;
    for (const auto& c : atoms) {
      if (c.negated) {
        out.rejected.push_back(note(c, "negation inside an init block"));
        continue;
      }
      listed.insert(*c.atom);
    }
    for (const auto& a : listed) {
      if (!base.problem.init_contains(a)) edits.push_back(add_edit(a));
    }
    for (const auto& a : base.problem.init) {
      if (!listed.count(a)) edits.push_back(remove_edit(a));
    }
  } else if (mode == ResponseMode::kAddRemove) {
    const auto sections = line_sections(lowered);
    for (const auto& c : atoms) {
      const Section s = c.line < sections.size() ? sections[c.line] : Section::kNone;
      push(c, c.negated || s == Section::kRemove ? EditKind::kRemove : EditKind::kAdd);
    }
  } else {
    for (const auto& c : atoms) push(c, c.negated ? EditKind::kRemove : EditKind::kAdd);
  }
  out.edits = EditSet(std::move(edits));
  return out;
}

std::size_t parse_option_choice(std::string_view text, std::size_t option_count) {
  std::size_t i = 0;
  while (i < text.size() && !std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
  if (i == text.size()) throw Error(ErrorCode::kNoNumberFound, "no option number in the response");
  std::size_t j = i;
  while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
  const std::string digits(text.substr(i, j - i));
  const std::size_t value = digits.size() > 9 ? 0 : std::stoul(digits);
  if (value < 1 || value > option_count) {
    throw Error(ErrorCode::kOutOfRange, "option " + digits + " is outside 1.." + std::to_string(option_count));
  }
  return value;
}

RankedList parse_ranked_list(std::string_view text, const Model& base, std::size_t cap) {
  Scan scan = Scanner(lower(text)).run();
  RankedList out;
  const auto atoms = well_formed(scan, base, out.diagnostics);
  std::set<GroundAtom> seen;
  for (const auto& c : atoms) {
    if (out.edits.size() == cap) {
      out.diagnostics.push_back(note(c, "beyond the cap of " + std::to_string(cap)));
      continue;
    }
    if (c.negated) {
      out.diagnostics.push_back(note(c, "removals are not ranked"));
    } else if (base.problem.init_contains(*c.atom)) {
      out.diagnostics.push_back(note(c, "already in init"));
    } else if (!seen.insert(*c.atom).second) {
      out.diagnostics.push_back(note(c, "duplicate"));
    } else {
      out.edits.push_back(add_edit(*c.atom));
    }
  }
  if (out.edits.empty()) throw UnparseableResponse("no usable atom in the ranked list", out.diagnostics);
  return out;
}

}  // namespace modelspace
