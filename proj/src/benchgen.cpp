#include "modelspace/benchgen.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <random>
#include <set>

#include <json.hpp>

#include "modelspace/error.hpp"
#include "modelspace/planner.hpp"
#include "modelspace/util.hpp"

namespace modelspace {

namespace {

constexpr const char* kTravelDomain = R"((define (domain domaingotocity)
  (:requirements :typing)
  (:types city - object)
  (:predicates
    (at ?x - city)
    (has_taxi ?x ?y - city)
    (has_bus ?x ?y - city)
    (neighboring ?x ?y - city))
  (:action use_taxi
    :parameters (?from ?to - city)
    :precondition (and (at ?from) (has_taxi ?from ?to))
    :effect (and (not (at ?from)) (at ?to)))
  (:action use_bus
    :parameters (?from ?to - city)
    :precondition (and (at ?from) (has_bus ?from ?to))
    :effect (and (not (at ?from)) (at ?to))))
)";

constexpr const char* kRoombaDomain = R"((define (domain roomba)
  (:requirements :strips :typing)
  (:types cell - object)
  (:predicates
    (at ?c - cell)
    (adjacent ?x ?y - cell)
    (path_is_clear ?x ?y - cell)
    (chair_blocking_path_between ?x ?y - cell)
    (table_blocking_path_between ?x ?y - cell)
    (wall_between ?x ?y - cell)
    (is_dirty ?c - cell)
    (is_clean ?c - cell))
  (:action move
    :parameters (?from ?to - cell)
    :precondition (and (at ?from) (adjacent ?from ?to) (path_is_clear ?from ?to))
    :effect (and (at ?to) (not (at ?from))))
  (:action clean
    :parameters (?c - cell)
    :precondition (and (at ?c) (is_dirty ?c))
    :effect (and (is_clean ?c) (not (is_dirty ?c)))))
)";

// shake sets part2 from ?d1, not ?d2; pouring then needs part2 equal to the first ingredient.
constexpr const char* kBarmanDomain = R"((define (domain barman)
  (:requirements :strips :typing)
  (:types
    beverage container - object
    ingredient cocktail - beverage
    shot shaker - container)
  (:predicates
    (empty ?c - container)
    (contains ?c - container ?b - beverage)
    (clean ?c - container)
    (unshaked ?s - shaker)
    (shaked ?s - shaker)
    (cocktail-part1 ?a - cocktail ?b - ingredient)
    (cocktail-part2 ?a - cocktail ?b - ingredient))
  (:action shake
    :parameters (?b - cocktail ?d1 ?d2 - ingredient ?s - shaker)
    :precondition (and (contains ?s ?d1) (contains ?s ?d2) (unshaked ?s))
    :effect (and (not (unshaked ?s)) (not (contains ?s ?d1)) (not (contains ?s ?d2))
                 (shaked ?s) (cocktail-part1 ?b ?d1) (cocktail-part2 ?b ?d1) (contains ?s ?b)))
  (:action pour-shaker-to-shot
    :parameters (?b - cocktail ?d - shot ?s - shaker ?d1 ?d2 - ingredient)
    :precondition (and (shaked ?s) (empty ?d) (clean ?d) (contains ?s ?b)
                       (cocktail-part1 ?b ?d1) (cocktail-part2 ?b ?d2))
    :effect (and (not (clean ?d)) (not (empty ?d)) (contains ?d ?b))))
)";

constexpr const char* kLogisticsSimpleDomain = R"((define (domain logistics-simple)
  (:requirements :strips :typing)
  (:types package truck station - object)
  (:predicates
    (package-at ?p - package ?s - station)
    (truck-at ?t - truck ?s - station)
    (ready ?t - truck)
    (connected ?x ?y - station))
  (:action transport
    :parameters (?p - package ?t - truck ?from ?to - station)
    :precondition (and (package-at ?p ?from) (truck-at ?t ?from) (ready ?t) (connected ?from ?to))
    :effect (and (not (package-at ?p ?from)) (package-at ?p ?to))))
)";

constexpr const char* kLogisticsDomain = R"((define (domain logistics)
  (:requirements :strips :typing)
  (:types
    truck airplane - vehicle
    package vehicle - physobj
    airport location - place
    city place physobj - object)
  (:predicates
    (in-city ?loc - place ?city - city)
    (at ?obj - physobj ?loc - place)
    (in ?pkg - package ?veh - vehicle))
  (:action load-truck
    :parameters (?pkg - package ?truck - truck ?loc - place)
    :precondition (and (at ?truck ?loc) (at ?pkg ?loc))
    :effect (and (not (at ?pkg ?loc)) (in ?pkg ?truck)))
  (:action load-airplane
    :parameters (?pkg - package ?airplane - airplane ?loc - place)
    :precondition (and (at ?pkg ?loc) (at ?airplane ?loc))
    :effect (and (not (at ?pkg ?loc)) (in ?pkg ?airplane)))
  (:action unload-truck
    :parameters (?pkg - package ?truck - truck ?loc - place)
    :precondition (and (at ?truck ?loc) (in ?pkg ?truck))
    :effect (and (not (in ?pkg ?truck)) (at ?pkg ?loc)))
  (:action unload-airplane
    :parameters (?pkg - package ?airplane - airplane ?loc - place)
    :precondition (and (in ?pkg ?airplane) (at ?airplane ?loc))
    :effect (and (not (in ?pkg ?airplane)) (at ?pkg ?loc)))
  (:action drive-truck
    :parameters (?truck - truck ?loc-from - place ?loc-to - place ?city - city)
    :precondition (and (at ?truck ?loc-from) (in-city ?loc-from ?city) (in-city ?loc-to ?city))
    :effect (and (not (at ?truck ?loc-from)) (at ?truck ?loc-to)))
  (:action fly-airplane
    :parameters (?airplane - airplane ?loc-from - airport ?loc-to - airport)
    :precondition (at ?airplane ?loc-from)
    :effect (and (not (at ?airplane ?loc-from)) (at ?airplane ?loc-to))))
)";

const DomainModel& domain_model(DomainKind kind) {
  static const std::array<DomainModel, 5> domains = {
      parse_domain(kTravelDomain), parse_domain(kRoombaDomain), parse_domain(kBarmanDomain),
      parse_domain(kLogisticsSimpleDomain), parse_domain(kLogisticsDomain)};
  return domains[static_cast<std::size_t>(kind)];
}

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) { return splitmix(a ^ splitmix(b)); }

// Draws are done by hand so the streams do not depend on the standard
// library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  std::size_t below(std::size_t n) { return n == 0 ? 0 : static_cast<std::size_t>(gen_() % n); }
  int between(int lo, int hi) { return lo + static_cast<int>(below(static_cast<std::size_t>(hi - lo + 1))); }
  bool chance(double p) { return static_cast<double>(gen_() >> 11) * 0x1.0p-53 < p; }
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 gen_;
};

// a, b, ..., z, aa, ab, ...
std::string letters(std::size_t i) {
  std::string out;
  ++i;
  while (i > 0) {
    --i;
    out.insert(out.begin(), static_cast<char>('a' + i % 26));
    i /= 26;
  }
  return out;
}

std::vector<std::string> shuffled_names(const std::string& prefix, std::size_t n, Rng& rng) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back(prefix + letters(i));
  rng.shuffle(names);
  return names;
}

class ProblemBuilder {
 public:
  ProblemBuilder(DomainKind kind, std::string name) {
    problem_.name = std::move(name);
    problem_.domain_name = domain_model(kind).name;
    kind_ = kind;
  }
  void object(const std::string& name, const std::string& type) { problem_.objects[name] = type; }
  void init(std::string pred, std::vector<std::string> args) {
    init_.insert({std::move(pred), std::move(args)});
  }
  bool has(const std::string& pred, const std::vector<std::string>& args) const {
    return init_.count({pred, args}) > 0;
  }
  void goal(std::string pred, std::vector<std::string> args) {
    problem_.goal.push_back({std::move(pred), std::move(args)});
  }
  Model build() {
    problem_.init.assign(init_.begin(), init_.end());
    std::sort(problem_.goal.begin(), problem_.goal.end());
    problem_.goal.erase(std::unique(problem_.goal.begin(), problem_.goal.end()), problem_.goal.end());
    return Model{domain_model(kind_), problem_};
  }

 private:
  DomainKind kind_;
  ProblemModel problem_;
  std::set<GroundAtom> init_;
};

// Backbone length for the chain-plus-tree generators: at least min(n-1, 4)
// so that four deletions fit.
int backbone_length(int n, Rng& rng) {
  const int floor = std::min(n - 1, 4);
  return std::max(floor, n - 1 - rng.between(0, n / 2));
}

// Tree over n nodes: 0..len is the backbone, the rest hang off earlier nodes.
std::vector<std::pair<int, int>> random_tree(int n, int len, Rng& rng) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < len; ++i) edges.push_back({i, i + 1});
  for (int i = len + 1; i < n; ++i) edges.push_back({static_cast<int>(rng.below(static_cast<std::size_t>(i))), i});
  return edges;
}

Model travel(int n, Rng& rng, const std::string& name) {
  ProblemBuilder b(DomainKind::kTravel, name);
  const auto city = shuffled_names("city_", static_cast<std::size_t>(n), rng);
  for (const auto& c : city) b.object(c, "city");
  const int len = backbone_length(n, rng);
  auto service = [&](const std::string& x, const std::string& y) {
    b.init(rng.chance(0.5) ? "has_bus" : "has_taxi", {x, y});
  };
  for (const auto& [u, v] : random_tree(n, len, rng)) {
    const auto& x = city[static_cast<std::size_t>(u)];
    const auto& y = city[static_cast<std::size_t>(v)];
    const bool backbone = v <= len;
    b.init("neighboring", {x, y});
    if (backbone || rng.chance(0.7)) service(x, y);
    if (rng.chance(0.5)) {
      b.init("neighboring", {y, x});
      if (rng.chance(backbone ? 0.5 : 0.7)) service(y, x);
    }
  }
  // Neighbors without any service.
  for (int extra = rng.between(0, n / 2); extra > 0; --extra) {
    const auto& x = city[rng.below(city.size())];
    const auto& y = city[rng.below(city.size())];
    if (x != y) b.init("neighboring", {x, y});
  }
  b.init("at", {city[0]});
  b.goal("at", {city[static_cast<std::size_t>(len)]});
  return b.build();
}

std::string cell(int r, int c) { return "cell_" + std::to_string(r) + "_" + std::to_string(c); }

Model roomba(int rows, int cols, Rng& rng, const std::string& name) {
  ProblemBuilder b(DomainKind::kRoomba, name);
  const int n = rows * cols;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) b.object(cell(r, c), "cell");
  }
  auto rc = [&](int i) { return cell(i / cols, i % cols); };
  std::vector<std::pair<int, int>> grid;
  for (int i = 0; i < n; ++i) {
    if (i % cols + 1 < cols) grid.push_back({i, i + 1});
    if (i + cols < n) grid.push_back({i, i + cols});
  }
  // Random spanning tree (Kruskal over shuffled edges).
  rng.shuffle(grid);
  std::vector<int> parent(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) parent[static_cast<std::size_t>(i)] = i;
  auto root = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)];
    return x;
  };
  std::vector<std::vector<int>> tree(static_cast<std::size_t>(n));
  for (const auto& [u, v] : grid) {
    const std::string x = rc(u);
    const std::string y = rc(v);
    b.init("adjacent", {x, y});
    b.init("adjacent", {y, x});
    const int ru = root(u);
    const int rv = root(v);
    if (ru != rv) {
      parent[static_cast<std::size_t>(ru)] = rv;
      tree[static_cast<std::size_t>(u)].push_back(v);
      tree[static_cast<std::size_t>(v)].push_back(u);
      b.init("path_is_clear", {x, y});
      b.init("path_is_clear", {y, x});
    } else if (rng.chance(0.6)) {
      b.init("wall_between", {x, y});
      b.init("wall_between", {y, x});
    } else {
      const char* obstacle = rng.chance(0.5) ? "chair_blocking_path_between" : "table_blocking_path_between";
      b.init(obstacle, {x, y});
      b.init(obstacle, {y, x});
    }
  }
  const int start = static_cast<int>(rng.below(static_cast<std::size_t>(n)));
  std::vector<int> dist(static_cast<std::size_t>(n), -1);
  std::vector<int> queue{start};
  dist[static_cast<std::size_t>(start)] = 0;
  for (std::size_t q = 0; q < queue.size(); ++q) {
    for (int v : tree[static_cast<std::size_t>(queue[q])]) {
      if (dist[static_cast<std::size_t>(v)] < 0) {
        dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(queue[q])] + 1;
        queue.push_back(v);
      }
    }
  }
  const int far = *std::max_element(dist.begin(), dist.end());
  std::vector<int> targets;
  for (int i = 0; i < n; ++i) {
    if (dist[static_cast<std::size_t>(i)] >= std::min(far, 4)) targets.push_back(i);
  }
  const int target = targets[rng.below(targets.size())];
  for (int i = 0; i < n; ++i) {
    if (i == target) {
      b.init("is_dirty", {rc(i)});
    } else if (rng.chance(0.3)) {
      b.init("is_dirty", {rc(i)});
    } else if (rng.chance(0.5)) {
      b.init("is_clean", {rc(i)});
    }
  }
  b.init("at", {rc(start)});
  b.goal("is_clean", {rc(target)});
  return b.build();
}

Model barman(int n, Rng& rng, const std::string& name) {
  ProblemBuilder b(DomainKind::kBarmanSimple, name);
  std::vector<std::string> ingredients;
  for (int i = 0; i < 2 * n; ++i) ingredients.push_back("ingredient_" + letters(static_cast<std::size_t>(i)));
  if (n > 1) rng.shuffle(ingredients);
  for (const auto& d : ingredients) b.object(d, "ingredient");
  for (int i = 0; i < n; ++i) {
    const auto tag = letters(static_cast<std::size_t>(i));
    const std::string cocktail = "cocktail_" + tag;
    const std::string shaker = "shaker_" + tag;
    const std::string shot = "shot_" + tag;
    b.object(cocktail, "cocktail");
    b.object(shaker, "shaker");
    b.object(shot, "shot");
    const auto& d1 = ingredients[static_cast<std::size_t>(2 * i)];
    const auto& d2 = ingredients[static_cast<std::size_t>(2 * i + 1)];
    b.init("cocktail-part1", {cocktail, d1});
    b.init("cocktail-part2", {cocktail, d2});
    b.init("contains", {shaker, d1});
    b.init("contains", {shaker, d2});
    b.init("unshaked", {shaker});
    b.init("empty", {shot});
    b.init("clean", {shot});
    if (rng.chance(0.5)) b.init("clean", {shaker});
    b.goal("contains", {shot, cocktail});
  }
  return b.build();
}

Model logistics_simple(int n, Rng& rng, const std::string& name) {
  ProblemBuilder b(DomainKind::kLogisticsSimple, name);
  const auto station = shuffled_names("station_", static_cast<std::size_t>(n), rng);
  const int len = backbone_length(n, rng);
  for (int i = 0; i < n; ++i) {
    const auto& s = station[static_cast<std::size_t>(i)];
    const std::string truck = "truck_" + s.substr(8);
    b.object(s, "station");
    b.object(truck, "truck");
    b.init("truck-at", {truck, s});
    b.init("ready", {truck});
  }
  for (const auto& [u, v] : random_tree(n, len, rng)) {
    b.init("connected", {station[static_cast<std::size_t>(u)], station[static_cast<std::size_t>(v)]});
    b.init("connected", {station[static_cast<std::size_t>(v)], station[static_cast<std::size_t>(u)]});
  }
  b.object("package_a", "package");
  b.init("package-at", {"package_a", station[0]});
  b.goal("package-at", {"package_a", station[static_cast<std::size_t>(len)]});
  return b.build();
}

Model logistics(int cities, int locations, Rng& rng, const std::string& name) {
  ProblemBuilder b(DomainKind::kLogistics, name);
  std::vector<std::vector<std::string>> places(static_cast<std::size_t>(cities));
  std::vector<std::string> airports;
  for (int c = 0; c < cities; ++c) {
    const auto tag = letters(static_cast<std::size_t>(c));
    const std::string city = "city_" + tag;
    b.object(city, "city");
    const std::string airport = "airport_" + tag;
    b.object(airport, "airport");
    b.init("in-city", {airport, city});
    places[static_cast<std::size_t>(c)].push_back(airport);
    airports.push_back(airport);
    for (int l = 1; l < locations; ++l) {
      const std::string loc = "location_" + tag + std::to_string(l);
      b.object(loc, "location");
      b.init("in-city", {loc, city});
      places[static_cast<std::size_t>(c)].push_back(loc);
    }
    const std::string truck = "truck_" + tag;
    b.object(truck, "truck");
    const auto& where = places[static_cast<std::size_t>(c)];
    b.init("at", {truck, where[rng.below(where.size())]});
  }
  b.object("airplane_a", "airplane");
  b.init("at", {"airplane_a", airports[rng.below(airports.size())]});
  for (const char* pkg : {"package_a", "package_b"}) {
    b.object(pkg, "package");
    const auto from_city = rng.below(places.size());
    auto to_city = rng.below(places.size() - 1);
    if (to_city >= from_city) ++to_city;
    const auto& from = places[from_city];
    const auto& to = places[to_city];
    b.init("at", {pkg, from[rng.below(from.size())]});
    b.goal("at", {pkg, to[rng.below(to.size())]});
  }
  return b.build();
}

bool has_init(const Model& m, const std::string& pred, const std::vector<std::string>& args) {
  return m.problem.init_contains({pred, args});
}

bool is_vehicle(const Model& m, const std::string& object) {
  const auto type = m.object_type(object);
  return type && m.domain.is_subtype(*type, "vehicle");
}

bool add_member(DomainKind kind, const Model& ctx, const GroundAtom& a) {
  switch (kind) {
    case DomainKind::kTravel:
      return (a.predicate == "has_bus" || a.predicate == "has_taxi") && a.args.size() == 2 &&
             has_init(ctx, "neighboring", a.args);
    case DomainKind::kRoomba:
      return a.predicate == "path_is_clear" && a.args.size() == 2 && has_init(ctx, "adjacent", a.args) &&
             !has_init(ctx, "wall_between", a.args) &&
             !has_init(ctx, "wall_between", {a.args[1], a.args[0]});
    case DomainKind::kBarmanSimple:
      return a.predicate == "clean";
    case DomainKind::kLogisticsSimple:
      return a.predicate == "ready";
    case DomainKind::kLogistics: {
      if (a.predicate != "at" || a.args.size() != 2 || !is_vehicle(ctx, a.args[0])) return false;
      for (const auto& f : ctx.problem.init) {
        if (f.predicate == "at" && f.args[0] == a.args[0]) return false;
      }
      const auto vtype = ctx.object_type(a.args[0]);
      const auto ltype = ctx.object_type(a.args[1]);
      if (*vtype == "airplane") return ltype && *ltype == "airport";
      return true;
    }
  }
  return false;
}

bool is_obstacle(const GroundAtom& a) {
  return a.predicate == "chair_blocking_path_between" || a.predicate == "table_blocking_path_between";
}

Model without(const Model& m, const std::vector<GroundAtom>& drop, const std::vector<GroundAtom>& insert) {
  Model out = m;
  auto& init = out.problem.init;
  for (const auto& a : drop) init.erase(std::remove(init.begin(), init.end(), a), init.end());
  init.insert(init.end(), insert.begin(), insert.end());
  std::sort(init.begin(), init.end());
  init.erase(std::unique(init.begin(), init.end()), init.end());
  return out;
}

std::vector<std::string> to_strings(const std::vector<GroundAtom>& atoms) {
  std::vector<std::string> out;
  for (const auto& a : atoms) out.push_back(a.str());
  return out;
}

std::vector<GroundAtom> atoms_from(const nlohmann::json& j) {
  std::vector<GroundAtom> out;
  for (const auto& s : j) {
    const auto edit = parse_edit("(+ " + s.get<std::string>() + ")");
    out.push_back(edit.atom);
  }
  return out;
}

}  // namespace

std::string to_string(DomainKind kind) {
  switch (kind) {
    case DomainKind::kTravel: return "travel";
    case DomainKind::kRoomba: return "roomba";
    case DomainKind::kBarmanSimple: return "barman-simple";
    case DomainKind::kLogisticsSimple: return "logistics-simple";
    case DomainKind::kLogistics: return "logistics";
  }
  return "?";
}

std::string display_name(DomainKind kind) {
  switch (kind) {
    case DomainKind::kTravel: return "Travel";
    case DomainKind::kRoomba: return "Roomba";
    case DomainKind::kBarmanSimple: return "Barman-S";
    case DomainKind::kLogisticsSimple: return "Logistics-S";
    case DomainKind::kLogistics: return "Logistics";
  }
  return "?";
}

DomainKind parse_domain_kind(std::string_view name) {
  for (auto kind : all_domain_kinds()) {
    if (to_string(kind) == name) return kind;
  }
  throw Error(ErrorCode::kOutOfRange, "unknown domain '" + std::string(name) + "'");
}

const std::vector<DomainKind>& all_domain_kinds() {
  static const std::vector<DomainKind> kinds = {DomainKind::kTravel, DomainKind::kRoomba,
                                                DomainKind::kBarmanSimple, DomainKind::kLogisticsSimple,
                                                DomainKind::kLogistics};
  return kinds;
}

const std::vector<DomainKind>& novel_domain_kinds() {
  static const std::vector<DomainKind> kinds = {DomainKind::kTravel, DomainKind::kRoomba,
                                                DomainKind::kBarmanSimple, DomainKind::kLogisticsSimple};
  return kinds;
}

SizeRange accepted_sizes(DomainKind kind) {
  switch (kind) {
    case DomainKind::kTravel: return {{3, 0}, {30, 0}};
    case DomainKind::kRoomba: return {{3, 3}, {8, 8}};
    case DomainKind::kBarmanSimple: return {{1, 0}, {5, 0}};
    case DomainKind::kLogisticsSimple: return {{4, 0}, {20, 0}};
    case DomainKind::kLogistics: return {{2, 2}, {5, 4}};
  }
  return {};
}

SizeRange default_sizes(DomainKind kind) {
  switch (kind) {
    case DomainKind::kTravel: return {{5, 0}, {10, 0}};
    case DomainKind::kRoomba: return {{3, 3}, {5, 5}};
    case DomainKind::kBarmanSimple: return {{1, 0}, {3, 0}};
    case DomainKind::kLogisticsSimple: return {{4, 0}, {12, 0}};
    case DomainKind::kLogistics: return {{2, 2}, {3, 3}};
  }
  return {};
}

std::string family_id(DomainKind kind) {
  switch (kind) {
    case DomainKind::kTravel: return "travel-services-between-neighbors";
    case DomainKind::kRoomba: return "roomba-clear-obstructed-paths";
    case DomainKind::kBarmanSimple: return "barman-clean-containers";
    case DomainKind::kLogisticsSimple: return "logistics-simple-ready-trucks";
    case DomainKind::kLogistics: return "logistics-vehicle-positions";
  }
  return "?";
}

std::string ReasonableFamily::id() const { return family_id(domain); }

bool ReasonableFamily::contains(const ModelEdit& edit, const EditSet& within) const {
  if (edit.kind == EditKind::kAdd) return add_member(domain, context, edit.atom);
  // The only member removals: a Roomba obstacle on a path that the same set
  // clears.
  if (domain != DomainKind::kRoomba || !is_obstacle(edit.atom)) return false;
  return within.contains(add_edit({"path_is_clear", edit.atom.args}));
}

bool ReasonableFamily::contains(const EditSet& edits) const {
  if (edits.empty()) return false;
  return std::all_of(edits.edits().begin(), edits.edits().end(),
                     [&](const ModelEdit& e) { return contains(e, edits); });
}

GeneratedModel generate_instance(DomainKind kind, SizeParams size, std::uint64_t seed) {
  const auto range = accepted_sizes(kind);
  const bool two_d = range.min.secondary > 0;
  if (size.primary < range.min.primary || size.primary > range.max.primary ||
      (two_d && (size.secondary < range.min.secondary || size.secondary > range.max.secondary))) {
    throw Error(ErrorCode::kOutOfRange, "size " + std::to_string(size.primary) +
                                            (two_d ? "x" + std::to_string(size.secondary) : "") +
                                            " is outside the accepted range for " + to_string(kind));
  }
  if (!two_d) size.secondary = 0;
  constexpr int kAttempts = 8;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    Rng rng(mix(seed, static_cast<std::uint64_t>(attempt) * 131 + static_cast<std::uint64_t>(kind)));
    const std::string name = to_string(kind) + "_" + std::to_string(seed % 100000);
    Model m;
    switch (kind) {
      case DomainKind::kTravel: m = travel(size.primary, rng, name); break;
      case DomainKind::kRoomba: m = roomba(size.primary, size.secondary, rng, name); break;
      case DomainKind::kBarmanSimple: m = barman(size.primary, rng, name); break;
      case DomainKind::kLogisticsSimple: m = logistics_simple(size.primary, rng, name); break;
      case DomainKind::kLogistics: m = logistics(size.primary, size.secondary, rng, name); break;
    }
    if (solve(m).solved()) return {m, ReasonableFamily{kind, m}};
  }
  throw Error(ErrorCode::kGenerationFailed,
              "no solvable " + to_string(kind) + " model after " + std::to_string(kAttempts) + " attempts");
}

EditSet BenchInstance::ground_truth_repair() const {
  std::vector<ModelEdit> edits;
  for (const auto& a : deleted_facts) edits.push_back(add_edit(a));
  for (const auto& a : inserted_facts) edits.push_back(remove_edit(a));
  return EditSet(std::move(edits));
}

EditSet BenchInstance::ground_truth_adds() const {
  std::vector<ModelEdit> edits;
  for (const auto& a : deleted_facts) edits.push_back(add_edit(a));
  return EditSet(std::move(edits));
}

RepairTask BenchInstance::task(UseCase use_case) const {
  RepairTask t;
  t.base = perturbed;
  t.use_case = use_case;
  if (use_case == UseCase::kExecutability) t.target_plan = target_plan;
  return t;
}

BenchInstance perturb_unsolvable(const GeneratedModel& m, int k, std::uint64_t seed) {
  if (k < 1 || k > 4) throw Error(ErrorCode::kOutOfRange, "k must be in 1..4, got " + std::to_string(k));
  const auto verdict = solve(m.model);
  if (!verdict.solved()) throw Error(ErrorCode::kPerturbationFailed, "model is not solvable");

  // Init facts the plan relies on whose re-addition would be a family edit.
  std::set<GroundAtom> supports;
  for (const auto& step : verdict.plan.steps) {
    for (auto& p : instantiate_step(m.model, step).pre) supports.insert(std::move(p));
  }
  std::vector<GroundAtom> candidates;
  for (const auto& a : supports) {
    if (!m.model.problem.init_contains(a)) continue;
    if (add_member(m.family.domain, without(m.model, {a}, {}), a)) candidates.push_back(a);
  }
  if (candidates.size() < static_cast<std::size_t>(k)) {
    throw Error(ErrorCode::kPerturbationFailed, "only " + std::to_string(candidates.size()) +
                                                    " deletable facts support the plan, need " +
                                                    std::to_string(k));
  }

  Rng rng(mix(seed, 0x7065727475726bull));
  std::set<std::vector<GroundAtom>> tried;
  constexpr int kAttempts = 20;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    auto pool = candidates;
    rng.shuffle(pool);
    std::vector<GroundAtom> deleted(pool.begin(), pool.begin() + k);
    std::sort(deleted.begin(), deleted.end());
    std::vector<GroundAtom> inserted;
    if (m.family.domain == DomainKind::kRoomba) {
      for (const auto& a : deleted) {
        inserted.push_back({rng.chance(0.5) ? "chair_blocking_path_between" : "table_blocking_path_between", a.args});
      }
    }
    if (!tried.insert(deleted).second) continue;
    Model perturbed = without(m.model, deleted, inserted);
    if (solve(perturbed).status != SolveStatus::kProvenUnsolvable) continue;
    if (!solve(without(perturbed, {}, deleted)).solved()) continue;

    BenchInstance inst;
    inst.domain = m.family.domain;
    inst.seed = seed;
    inst.k = k;
    inst.solvable = m.model;
    inst.perturbed = std::move(perturbed);
    inst.deleted_facts = std::move(deleted);
    inst.inserted_facts = std::move(inserted);
    inst.family = ReasonableFamily{m.family.domain, inst.perturbed};
    select_target_plan(inst);
    return inst;
  }
  throw Error(ErrorCode::kPerturbationFailed,
              "no " + std::to_string(k) + "-subset of the plan's support made the model unsolvable");
}

Plan select_target_plan(BenchInstance& inst) {
  const auto verdict = solve(inst.solvable);
  if (!verdict.solved()) throw Error(ErrorCode::kInvariantViolation, inst.id + ": original is not solved");
  if (validate_plan(inst.perturbed, verdict.plan).valid) {
    throw Error(ErrorCode::kInvariantViolation, inst.id + ": target plan survives the perturbation");
  }
  inst.target_plan = verdict.plan;
  return inst.target_plan;
}

std::vector<std::string> verify_instance(const BenchInstance& inst) {
  std::vector<std::string> problems;
  if (!solve(inst.solvable).solved()) problems.push_back("original is not solved");
  if (solve(inst.perturbed).status != SolveStatus::kProvenUnsolvable) {
    problems.push_back("perturbed model is not proven unsolvable");
  }
  if (!solve(without(inst.perturbed, {}, inst.deleted_facts)).solved()) {
    problems.push_back("restoring the deleted facts does not solve it");
  }
  if (!validate_plan(inst.solvable, inst.target_plan).valid) problems.push_back("target plan invalid in original");
  if (validate_plan(inst.perturbed, inst.target_plan).valid) problems.push_back("target plan valid in perturbed");
  if (inst.deleted_facts.size() != static_cast<std::size_t>(inst.k) || inst.k < 1 || inst.k > 4) {
    problems.push_back("k does not match the deleted facts");
  }
  if (!inst.family.contains(inst.ground_truth_adds())) problems.push_back("deleted facts are not family edits");
  if (!inst.family.contains(inst.ground_truth_repair())) problems.push_back("ground-truth repair is not a family edit");
  return problems;
}

std::vector<BenchInstance> generate_batch(const BatchSpec& spec) {
  if (spec.k_min < 1 || spec.k_max > 4 || spec.k_min > spec.k_max) {
    throw Error(ErrorCode::kOutOfRange, "k range must lie within 1..4");
  }
  SizeRange sizes = spec.sizes;
  if (sizes.max.primary == 0) sizes = default_sizes(spec.domain);
  std::vector<BenchInstance> out(spec.count);
  parallel_for(spec.count, spec.jobs, [&](std::size_t i) {
    int k = spec.k_min + static_cast<int>(i % static_cast<std::size_t>(spec.k_max - spec.k_min + 1));
    // Each deleted clean shot needs a cocktail of its own, and a Logistics
    // plan rarely moves more than three vehicles.
    if (spec.domain == DomainKind::kBarmanSimple) k = std::min(k, std::max(1, sizes.max.primary));
    if (spec.domain == DomainKind::kLogistics) k = std::min(k, 3);
    const std::uint64_t base = mix(mix(spec.seed, static_cast<std::uint64_t>(spec.domain)), i);
    constexpr int kAttempts = 12;
    for (int attempt = 0; attempt < kAttempts; ++attempt) {
      const std::uint64_t seed = mix(base, static_cast<std::uint64_t>(attempt)) % 1'000'000'007ull;
      Rng rng(seed);
      SizeParams size{rng.between(sizes.min.primary, sizes.max.primary),
                      sizes.max.secondary > 0 ? rng.between(sizes.min.secondary, sizes.max.secondary) : 0};
      if (spec.domain == DomainKind::kBarmanSimple) size.primary = std::max(size.primary, k);
      try {
        auto inst = perturb_unsolvable(generate_instance(spec.domain, size, seed), k, seed);
        inst.size = size;
        char id[32];
        std::snprintf(id, sizeof id, "-%03zu", i);
        inst.id = to_string(spec.domain) + id;
        out[i] = std::move(inst);
        return;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kGenerationFailed && e.code() != ErrorCode::kPerturbationFailed &&
            e.code() != ErrorCode::kOutOfRange) {
          throw;
        }
      }
    }
    throw Error(ErrorCode::kGenerationFailed, "could not build instance " + std::to_string(i) + " of " +
                                                  to_string(spec.domain) + " with k=" + std::to_string(k));
  });
  return out;
}

void write_instance(const std::filesystem::path& dir, const BenchInstance& inst) {
  write_file_atomic(dir / "domain.pddl", render_domain(inst.solvable.domain));
  write_file_atomic(dir / "problem_solvable.pddl", render_problem(inst.solvable.problem));
  write_file_atomic(dir / "problem_perturbed.pddl", render_problem(inst.perturbed.problem));
  write_file_atomic(dir / "target_plan.txt", render_plan(inst.target_plan));
  const nlohmann::ordered_json truth = {
      {"id", inst.id},
      {"domain", to_string(inst.domain)},
      {"size", {inst.size.primary, inst.size.secondary}},
      {"seed", inst.seed},
      {"k", inst.k},
      {"deleted_facts", to_strings(inst.deleted_facts)},
      {"inserted_facts", to_strings(inst.inserted_facts)},
      {"family_id", inst.family.id()},
      {"plan_size", inst.target_plan.size()},
  };
  write_file_atomic(dir / "ground_truth.json", truth.dump(2) + "\n");
}

BenchInstance read_instance(const std::filesystem::path& dir) {
  BenchInstance inst;
  nlohmann::json truth;
  try {
    truth = nlohmann::json::parse(read_text_file(dir / "ground_truth.json"));
    inst.id = truth.at("id").get<std::string>();
    inst.domain = parse_domain_kind(truth.at("domain").get<std::string>());
    inst.size = {truth.at("size").at(0).get<int>(), truth.at("size").at(1).get<int>()};
    inst.seed = truth.at("seed").get<std::uint64_t>();
    inst.k = truth.at("k").get<int>();
    inst.deleted_facts = atoms_from(truth.at("deleted_facts"));
    inst.inserted_facts = atoms_from(truth.value("inserted_facts", nlohmann::json::array()));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchemaError, (dir / "ground_truth.json").string() + ": " + e.what());
  }
  const std::string domain = read_text_file(dir / "domain.pddl");
  inst.solvable = parse_model(domain, read_text_file(dir / "problem_solvable.pddl"));
  inst.perturbed = parse_model(domain, read_text_file(dir / "problem_perturbed.pddl"));
  inst.target_plan = parse_plan(read_text_file(dir / "target_plan.txt"));
  inst.family = ReasonableFamily{inst.domain, inst.perturbed};
  return inst;
}

std::vector<std::filesystem::path> list_instances(const std::filesystem::path& bench) {
  std::vector<std::filesystem::path> out;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(bench, ec)) {
    if (entry.is_directory() && std::filesystem::exists(entry.path() / "ground_truth.json")) {
      out.push_back(entry.path());
    }
  }
  if (ec) throw Error(ErrorCode::kIoError, "cannot list " + bench.string());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace modelspace
