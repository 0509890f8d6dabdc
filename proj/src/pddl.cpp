#include "modelspace/pddl.hpp"

#include <algorithm>
#include <set>

#include "modelspace/error.hpp"
#include "sexpr.hpp"

namespace modelspace {

using detail::SExpr;

namespace {

std::string join_atom(std::string_view predicate,
                      const std::vector<std::string>& args) {
  std::string out = "(";
  out += predicate;
  for (const auto& a : args) {
    out += ' ';
    out += a;
  }
  out += ')';
  return out;
}

[[noreturn]] void fail(ErrorCode code, const std::string& message,
                       const SExpr& at) {
  throw ParseError(code, message, at.line, at.column,
                   at.is_list ? std::string(at.head()) : at.token);
}

const SExpr& expect_list(const SExpr& e, std::string_view what) {
  if (!e.is_list) fail(ErrorCode::kSyntaxError, "expected " + std::string(what), e);
  return e;
}

const std::string& expect_token(const SExpr& e, std::string_view what) {
  if (e.is_list) fail(ErrorCode::kSyntaxError, "expected " + std::string(what), e);
  return e.token;
}

bool is_variable(std::string_view s) { return !s.empty() && s.front() == '?'; }

// Parses `a b - t c - u d` style lists. Tokens like `-object` (no space after
// the dash) are read as a type marker.
std::vector<TypedName> parse_typed_list(const std::vector<SExpr>& items,
                                        std::size_t begin) {
  std::vector<TypedName> out;
  std::vector<std::string> pending;
  for (std::size_t i = begin; i < items.size(); ++i) {
    const SExpr& item = items[i];
    if (item.is_list) {
      if (item.head() == "either") {
        fail(ErrorCode::kUnsupportedFeature, "'either' types are not supported", item);
      }
      fail(ErrorCode::kSyntaxError, "unexpected list in typed list", item);
    }
    std::string type;
    if (item.token == "-") {
      if (i + 1 >= items.size()) fail(ErrorCode::kSyntaxError, "missing type after '-'", item);
      const SExpr& t = items[++i];
      if (t.is_list) {
        if (t.head() == "either") {
          fail(ErrorCode::kUnsupportedFeature, "'either' types are not supported", t);
        }
        fail(ErrorCode::kSyntaxError, "expected type name", t);
      }
      type = t.token;
    } else if (item.token.size() > 1 && item.token.front() == '-') {
      type = item.token.substr(1);
    } else {
      pending.push_back(item.token);
      continue;
    }
    if (pending.empty()) fail(ErrorCode::kSyntaxError, "type without names", item);
    for (auto& name : pending) out.push_back({std::move(name), type});
    pending.clear();
  }
  for (auto& name : pending) out.push_back({std::move(name), std::string(kRootType)});
  return out;
}

void sort_unique(std::vector<LiftedAtom>& atoms) {
  std::sort(atoms.begin(), atoms.end());
  atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
}

void sort_unique(std::vector<GroundAtom>& atoms) {
  std::sort(atoms.begin(), atoms.end());
  atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
}

bool is_unsupported_connective(std::string_view head) {
  static const std::set<std::string, std::less<>> kUnsupported = {
      "or", "imply", "exists", "forall", "when", "=", "increase", "decrease",
      "assign", "scale-up", "scale-down", "at", "over", "preference"};
  return kUnsupported.contains(head);
}

class DomainReader {
 public:
  DomainModel read(const SExpr& root) {
    expect_list(root, "(define ...)");
    if (root.head() != "define" || root.items.size() < 2) {
      fail(ErrorCode::kSyntaxError, "expected (define (domain ...) ...)", root);
    }
    const SExpr& header = expect_list(root.items[1], "(domain name)");
    if (header.head() != "domain" || header.items.size() != 2) {
      fail(ErrorCode::kSyntaxError, "expected (domain name)", header);
    }
    dom_.name = expect_token(header.items[1], "domain name");

    for (std::size_t i = 2; i < root.items.size(); ++i) {
      const SExpr& section = expect_list(root.items[i], "domain section");
      const std::string_view key = section.head();
      if (key == ":requirements") {
        read_requirements(section);
      } else if (key == ":types") {
        read_types(section);
      } else if (key == ":constants") {
        read_constants(section);
      } else if (key == ":predicates") {
        read_predicates(section);
      } else if (key == ":action") {
        read_action(section);
      } else if (key == ":functions" || key == ":derived" ||
                 key == ":durative-action" || key == ":axiom" ||
                 key == ":constraints") {
        fail(ErrorCode::kUnsupportedFeature,
             "section " + std::string(key) + " is outside the STRIPS subset", section);
      } else {
        fail(ErrorCode::kSyntaxError, "unknown domain section", section);
      }
    }
    return std::move(dom_);
  }

 private:
  void read_requirements(const SExpr& section) {
    for (std::size_t i = 1; i < section.items.size(); ++i) {
      const std::string& req = expect_token(section.items[i], "requirement");
      if (req != ":strips" && req != ":typing") {
        fail(ErrorCode::kUnsupportedFeature, "requirement " + req + " is not supported",
             section.items[i]);
      }
      dom_.requirements.push_back(req);
    }
  }

  void read_types(const SExpr& section) {
    for (auto& [child, parent] : parse_typed_list(section.items, 1)) {
      if (child == kRootType) continue;
      auto [it, inserted] = dom_.type_parent.emplace(child, parent);
      if (!inserted && it->second != parent) {
        fail(ErrorCode::kInvalidModel, "type " + child + " declared with two parents", section);
      }
    }
    // Parents mentioned only on the right of '-' are implicitly declared.
    std::vector<std::string> implicit;
    for (const auto& [child, parent] : dom_.type_parent) {
      if (parent != kRootType && !dom_.type_parent.contains(parent)) implicit.push_back(parent);
    }
    for (auto& t : implicit) dom_.type_parent.emplace(t, std::string(kRootType));
    for (const auto& [child, parent] : dom_.type_parent) {
      std::set<std::string> seen{child};
      std::string cur = parent;
      while (cur != kRootType) {
        if (!seen.insert(cur).second) {
          fail(ErrorCode::kInvalidModel, "cyclic type hierarchy at " + child, section);
        }
        cur = dom_.type_parent.at(cur);
      }
    }
  }

  void require_type(const std::string& type, const SExpr& at) {
    if (!dom_.has_type(type)) fail(ErrorCode::kUnknownType, "unknown type " + type, at);
  }

  void read_constants(const SExpr& section) {
    for (auto& [name, type] : parse_typed_list(section.items, 1)) {
      require_type(type, section);
      dom_.constants[name] = type;
    }
  }

  void read_predicates(const SExpr& section) {
    for (std::size_t i = 1; i < section.items.size(); ++i) {
      const SExpr& decl = expect_list(section.items[i], "predicate declaration");
      if (decl.items.empty()) fail(ErrorCode::kSyntaxError, "empty predicate", decl);
      PredicateDecl pred;
      pred.name = expect_token(decl.items[0], "predicate name");
      pred.params = parse_typed_list(decl.items, 1);
      for (const auto& p : pred.params) {
        if (!is_variable(p.name)) fail(ErrorCode::kSyntaxError, "expected variable", decl);
        require_type(p.type, decl);
      }
      if (dom_.find_predicate(pred.name) != nullptr) {
        fail(ErrorCode::kInvalidModel, "duplicate predicate " + pred.name, decl);
      }
      dom_.predicates.push_back(std::move(pred));
    }
  }

  void read_action(const SExpr& section) {
    if (section.items.size() < 2) fail(ErrorCode::kSyntaxError, "action without name", section);
    ActionSchema action;
    action.name = expect_token(section.items[1], "action name");
    if (dom_.find_action(action.name) != nullptr) {
      fail(ErrorCode::kInvalidModel, "duplicate action " + action.name, section);
    }
    const SExpr* pre = nullptr;
    const SExpr* eff = nullptr;
    for (std::size_t i = 2; i < section.items.size(); i += 2) {
      const std::string& key = expect_token(section.items[i], "action keyword");
      if (i + 1 >= section.items.size()) {
        fail(ErrorCode::kSyntaxError, "missing value for " + key, section.items[i]);
      }
      const SExpr& value = section.items[i + 1];
      if (key == ":parameters") {
        expect_list(value, "parameter list");
        action.parameters = parse_typed_list(value.items, 0);
        for (const auto& p : action.parameters) {
          if (!is_variable(p.name)) fail(ErrorCode::kSyntaxError, "expected variable", value);
          require_type(p.type, value);
        }
      } else if (key == ":precondition") {
        pre = &value;
      } else if (key == ":effect") {
        eff = &value;
      } else {
        fail(ErrorCode::kUnsupportedFeature, "action keyword " + key, section.items[i]);
      }
    }
    if (pre != nullptr) read_condition(*pre, action, action.preconditions);
    if (eff != nullptr) read_effect(*eff, action);
    sort_unique(action.preconditions);
    sort_unique(action.add_effects);
    sort_unique(action.del_effects);
    for (const auto& a : action.add_effects) {
      if (std::binary_search(action.del_effects.begin(), action.del_effects.end(), a)) {
        fail(ErrorCode::kInvalidModel,
             "atom " + a.str() + " is both added and deleted by " + action.name, section);
      }
    }
    dom_.actions.push_back(std::move(action));
  }

  void read_condition(const SExpr& e, const ActionSchema& action,
                      std::vector<LiftedAtom>& out) {
    expect_list(e, "condition");
    if (e.items.empty()) return;
    const std::string_view head = e.head();
    if (head == "and") {
      for (std::size_t i = 1; i < e.items.size(); ++i) read_condition(e.items[i], action, out);
    } else if (head == "not") {
      fail(ErrorCode::kUnsupportedFeature, "negative preconditions are not supported", e);
    } else if (is_unsupported_connective(head) && dom_.find_predicate(head) == nullptr) {
      fail(ErrorCode::kUnsupportedFeature, "'" + std::string(head) + "' is not supported", e);
    } else {
      out.push_back(read_lifted_atom(e, action));
    }
  }

  void read_effect(const SExpr& e, ActionSchema& action) {
    expect_list(e, "effect");
    if (e.items.empty()) return;
    const std::string_view head = e.head();
    if (head == "and") {
      for (std::size_t i = 1; i < e.items.size(); ++i) read_effect(e.items[i], action);
    } else if (head == "not") {
      if (e.items.size() != 2) fail(ErrorCode::kSyntaxError, "malformed negation", e);
      action.del_effects.push_back(read_lifted_atom(expect_list(e.items[1], "atom"), action));
    } else if (is_unsupported_connective(head) && dom_.find_predicate(head) == nullptr) {
      fail(ErrorCode::kUnsupportedFeature, "'" + std::string(head) + "' effects are not supported", e);
    } else {
      action.add_effects.push_back(read_lifted_atom(e, action));
    }
  }

  LiftedAtom read_lifted_atom(const SExpr& e, const ActionSchema& action) {
    LiftedAtom atom;
    atom.predicate = expect_token(e.items.at(0), "predicate");
    const PredicateDecl* decl = dom_.find_predicate(atom.predicate);
    if (decl == nullptr) fail(ErrorCode::kUnknownPredicate, "undeclared predicate " + atom.predicate, e);
    if (decl->params.size() + 1 != e.items.size()) {
      fail(ErrorCode::kArityMismatch,
           atom.predicate + " expects " + std::to_string(decl->params.size()) + " arguments", e);
    }
    for (std::size_t i = 1; i < e.items.size(); ++i) {
      const std::string& arg = expect_token(e.items[i], "argument");
      const std::string& expected = decl->params[i - 1].type;
      if (is_variable(arg)) {
        auto it = std::find_if(action.parameters.begin(), action.parameters.end(),
                               [&](const TypedName& p) { return p.name == arg; });
        if (it == action.parameters.end()) {
          fail(ErrorCode::kUnknownVariable, "variable " + arg + " is not a parameter of " + action.name, e);
        }
        // Supertype parameters are allowed; grounding drops ill-typed bindings.
        if (!dom_.is_subtype(it->type, expected) && !dom_.is_subtype(expected, it->type)) {
          fail(ErrorCode::kTypeMismatch, arg + " of type " + it->type + " cannot fill " + expected, e);
        }
      } else {
        auto it = dom_.constants.find(arg);
        if (it == dom_.constants.end()) fail(ErrorCode::kUnknownObject, "unknown constant " + arg, e);
        if (!dom_.is_subtype(it->second, expected)) {
          fail(ErrorCode::kTypeMismatch, arg + " of type " + it->second + " cannot fill " + expected, e);
        }
      }
      atom.args.push_back(arg);
    }
    return atom;
  }

  DomainModel dom_;
};

class ProblemReader {
 public:
  explicit ProblemReader(const DomainModel& dom) : dom_(dom) {}

  ProblemModel read(const SExpr& root) {
    expect_list(root, "(define ...)");
    if (root.head() != "define" || root.items.size() < 2) {
      fail(ErrorCode::kSyntaxError, "expected (define (problem ...) ...)", root);
    }
    const SExpr& header = expect_list(root.items[1], "(problem name)");
    if (header.head() != "problem" || header.items.size() != 2) {
      fail(ErrorCode::kSyntaxError, "expected (problem name)", header);
    }
    prob_.name = expect_token(header.items[1], "problem name");

    const SExpr* init = nullptr;
    const SExpr* goal = nullptr;
    for (std::size_t i = 2; i < root.items.size(); ++i) {
      const SExpr& section = expect_list(root.items[i], "problem section");
      const std::string_view key = section.head();
      if (key == ":domain") {
        if (section.items.size() != 2) fail(ErrorCode::kSyntaxError, "expected (:domain name)", section);
        prob_.domain_name = expect_token(section.items[1], "domain name");
        if (prob_.domain_name != dom_.name) {
          fail(ErrorCode::kInvalidModel,
               "problem targets domain " + prob_.domain_name + " but " + dom_.name + " was given", section);
        }
      } else if (key == ":requirements") {
        for (std::size_t j = 1; j < section.items.size(); ++j) {
          const std::string& req = expect_token(section.items[j], "requirement");
          if (req != ":strips" && req != ":typing") {
            fail(ErrorCode::kUnsupportedFeature, "requirement " + req + " is not supported", section.items[j]);
          }
        }
      } else if (key == ":objects") {
        for (auto& [name, type] : parse_typed_list(section.items, 1)) {
          if (!dom_.has_type(type)) fail(ErrorCode::kUnknownType, "unknown type " + type, section);
          auto [it, inserted] = prob_.objects.emplace(name, type);
          if (!inserted && it->second != type) {
            fail(ErrorCode::kInvalidModel, "object " + name + " declared with two types", section);
          }
        }
      } else if (key == ":init") {
        init = &section;
      } else if (key == ":goal") {
        goal = &section;
      } else if (key == ":metric" || key == ":constraints") {
        fail(ErrorCode::kUnsupportedFeature, std::string(key) + " is not supported", section);
      } else {
        fail(ErrorCode::kSyntaxError, "unknown problem section", section);
      }
    }
    if (prob_.domain_name.empty()) prob_.domain_name = dom_.name;
    if (init != nullptr) {
      for (std::size_t i = 1; i < init->items.size(); ++i) {
        const SExpr& e = expect_list(init->items[i], "init atom");
        if (e.head() == "=") fail(ErrorCode::kUnsupportedFeature, "numeric fluents are not supported", e);
        if (e.head() == "not") fail(ErrorCode::kUnsupportedFeature, "negative init literals", e);
        prob_.init.push_back(read_ground_atom(e));
      }
    }
    if (goal != nullptr) {
      if (goal->items.size() > 2) fail(ErrorCode::kSyntaxError, "expected one goal formula", *goal);
      if (goal->items.size() == 2) read_goal(goal->items[1]);
    }
    sort_unique(prob_.init);
    sort_unique(prob_.goal);
    return std::move(prob_);
  }

 private:
  void read_goal(const SExpr& e) {
    expect_list(e, "goal");
    if (e.items.empty()) return;
    const std::string_view head = e.head();
    if (head == "and") {
      for (std::size_t i = 1; i < e.items.size(); ++i) read_goal(e.items[i]);
    } else if (head == "not") {
      fail(ErrorCode::kUnsupportedFeature, "negative goals are not supported", e);
    } else if (is_unsupported_connective(head) && dom_.find_predicate(head) == nullptr) {
      fail(ErrorCode::kUnsupportedFeature, "'" + std::string(head) + "' goals are not supported", e);
    } else {
      prob_.goal.push_back(read_ground_atom(e));
    }
  }

  GroundAtom read_ground_atom(const SExpr& e) {
    GroundAtom atom;
    atom.predicate = expect_token(e.items.at(0), "predicate");
    const PredicateDecl* decl = dom_.find_predicate(atom.predicate);
    if (decl == nullptr) fail(ErrorCode::kUnknownPredicate, "undeclared predicate " + atom.predicate, e);
    if (decl->params.size() + 1 != e.items.size()) {
      fail(ErrorCode::kArityMismatch,
           atom.predicate + " expects " + std::to_string(decl->params.size()) + " arguments", e);
    }
    for (std::size_t i = 1; i < e.items.size(); ++i) {
      const std::string& arg = expect_token(e.items[i], "object");
      std::string type;
      if (auto it = prob_.objects.find(arg); it != prob_.objects.end()) {
        type = it->second;
      } else if (auto c = dom_.constants.find(arg); c != dom_.constants.end()) {
        type = c->second;
      } else {
        fail(ErrorCode::kUnknownObject, "unknown object " + arg, e);
      }
      if (!dom_.is_subtype(type, decl->params[i - 1].type)) {
        fail(ErrorCode::kTypeMismatch,
             arg + " of type " + type + " cannot fill " + decl->params[i - 1].type, e);
      }
      atom.args.push_back(arg);
    }
    return atom;
  }

  const DomainModel& dom_;
  ProblemModel prob_;
};

const SExpr& single_define(const std::vector<SExpr>& exprs, std::string_view what) {
  if (exprs.size() != 1) {
    throw ParseError(ErrorCode::kSyntaxError,
                     "expected exactly one " + std::string(what) + " definition",
                     exprs.empty() ? 1 : exprs[1].line,
                     exprs.empty() ? 1 : exprs[1].column, "");
  }
  return exprs.front();
}

}  // namespace

std::string GroundAtom::str() const { return join_atom(predicate, args); }
std::string LiftedAtom::str() const { return join_atom(predicate, args); }
std::string PlanStep::str() const { return join_atom(action, args); }

const PredicateDecl* DomainModel::find_predicate(std::string_view name) const {
  for (const auto& p : predicates) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

const ActionSchema* DomainModel::find_action(std::string_view name) const {
  for (const auto& a : actions) {
    if (a.name == name) return &a;
  }
  return nullptr;
}

bool DomainModel::has_type(std::string_view type) const {
  return type == kRootType || type_parent.contains(std::string(type));
}

bool DomainModel::is_subtype(std::string_view type, std::string_view ancestor) const {
  if (ancestor == kRootType) return true;
  std::string cur(type);
  for (std::size_t guard = 0; guard <= type_parent.size(); ++guard) {
    if (cur == ancestor) return true;
    auto it = type_parent.find(cur);
    if (it == type_parent.end()) return false;
    cur = it->second;
  }
  return false;
}

bool ProblemModel::init_contains(const GroundAtom& atom) const {
  return std::binary_search(init.begin(), init.end(), atom);
}

std::optional<std::string> Model::object_type(std::string_view object) const {
  const std::string key(object);
  if (auto it = problem.objects.find(key); it != problem.objects.end()) return it->second;
  if (auto it = domain.constants.find(key); it != domain.constants.end()) return it->second;
  return std::nullopt;
}

std::map<std::string, std::string> Model::universe() const {
  std::map<std::string, std::string> out = domain.constants;
  for (const auto& [name, type] : problem.objects) out[name] = type;
  return out;
}

DomainModel parse_domain(std::string_view text) {
  const auto exprs = detail::read_sexprs(text);
  return DomainReader().read(single_define(exprs, "domain"));
}

ProblemModel parse_problem(std::string_view text, const DomainModel& domain) {
  const auto exprs = detail::read_sexprs(text);
  return ProblemReader(domain).read(single_define(exprs, "problem"));
}

Model parse_model(std::string_view domain_text, std::string_view problem_text) {
  Model m;
  m.domain = parse_domain(domain_text);
  m.problem = parse_problem(problem_text, m.domain);
  return m;
}

Plan parse_plan(std::string_view text) {
  Plan plan;
  for (const SExpr& e : detail::read_sexprs(text)) {
    if (!e.is_list || e.items.empty()) {
      fail(ErrorCode::kSyntaxError, "expected (action args...)", e);
    }
    PlanStep step;
    step.action = expect_token(e.items[0], "action name");
    for (std::size_t i = 1; i < e.items.size(); ++i) {
      step.args.push_back(expect_token(e.items[i], "action argument"));
    }
    plan.steps.push_back(std::move(step));
  }
  plan.cost = static_cast<double>(plan.steps.size());
  return plan;
}

std::optional<std::string> check_atom(const Model& model, const GroundAtom& atom) {
  const PredicateDecl* decl = model.domain.find_predicate(atom.predicate);
  if (decl == nullptr) return "unknown predicate " + atom.predicate;
  if (decl->params.size() != atom.args.size()) {
    return atom.predicate + " expects " + std::to_string(decl->params.size()) + " arguments";
  }
  for (std::size_t i = 0; i < atom.args.size(); ++i) {
    auto type = model.object_type(atom.args[i]);
    if (!type) return "unknown object " + atom.args[i];
    if (!model.domain.is_subtype(*type, decl->params[i].type)) {
      return atom.args[i] + " of type " + *type + " cannot fill " + decl->params[i].type;
    }
  }
  return std::nullopt;
}

}  // namespace modelspace
