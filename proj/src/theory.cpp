#include "emars/theory.hpp"

#include <algorithm>

#include "emars/error.hpp"
#include "emars/interval.hpp"

namespace emars {

namespace {

using Args = std::span<const Term>;

const DataValue& value_arg(Args args, std::size_t i, const std::string& op) {
  const DataValue* v = as_value(args[i]);
  if (v == nullptr) throw DatatypeError(op + ": argument " + std::to_string(i + 1) + " is not a data value");
  return *v;
}

template <class T>
const T& typed_arg(Args args, std::size_t i, const std::string& op) {
  const DataValue& v = value_arg(args, i, op);
  const T* t = std::get_if<T>(&v);
  if (t == nullptr) {
    throw DatatypeError(op + ": argument " + std::to_string(i + 1) + " is " +
                        std::string(datatype_name(datatype_of(v))));
  }
  return *t;
}

const std::vector<Datatype> kImprecise = {Datatype::quantity, Datatype::geo_coordinates, Datatype::time};
const std::vector<Datatype> kStringLike = {Datatype::string, Datatype::monolingual_text, Datatype::multilingual_text};
const std::vector<Datatype> kOrdered = {Datatype::string, Datatype::monolingual_text, Datatype::multilingual_text,
                                       Datatype::quantity, Datatype::time};

bool main_order(dt::Order o, Args args, const std::string& op) {
  const DataValue& a = value_arg(args, 0, op);
  const DataValue& b = value_arg(args, 1, op);
  if (a.index() != b.index()) throw DatatypeError(op + ": datatype mismatch");
  if (const auto* qa = std::get_if<QuantityValue>(&a)) {
    return dt::qty_compare(dt::Flavour::main, o, *qa, std::get<QuantityValue>(b));
  }
  if (const auto* ta = std::get_if<TimeValue>(&a)) {
    const auto& tb = std::get<TimeValue>(b);
    if (ta->empty || tb.empty) throw DatatypeError(op + ": EMPTY operand");
    switch (o) {
      case dt::Order::lt: return ta->main < tb.main;
      case dt::Order::le: return ta->main <= tb.main;
      case dt::Order::gt: return ta->main > tb.main;
      case dt::Order::ge: return ta->main >= tb.main;
    }
  }
  static constexpr dt::StringRelation kStr[] = {dt::StringRelation::lt, dt::StringRelation::le, dt::StringRelation::gt,
                                                dt::StringRelation::ge};
  return dt::str_relate(kStr[static_cast<int>(o)], a, b);
}

void register_relations(DatatypeTheory& th) {
  for (Datatype d : kAllDatatypes) {
    th.add_relation({std::string(datatype_name(d)), 1, {}, [d](Args a) {
                       const DataValue* v = as_value(a[0]);
                       return v != nullptr && datatype_of(*v) == d;
                     }});
  }

  auto state = [](dt::ImpreciseState s, const char* name) {
    return RelationInfo{name, 1, kImprecise,
                        [s, name](Args a) { return dt::iv_state(value_arg(a, 0, name)) == s; }};
  };
  th.add_relation(state(dt::ImpreciseState::precise, "precise"));
  th.add_relation(state(dt::ImpreciseState::imprecise, "imprecise"));
  th.add_relation(state(dt::ImpreciseState::empty, "empty"));
  th.add_relation({"nonempty", 1, kImprecise, [](Args a) {
                     return dt::iv_state(value_arg(a, 0, "nonempty")) != dt::ImpreciseState::empty;
                   }});

  const std::pair<const char*, dt::IntervalRelation> interval[] = {{"overlaps", dt::IntervalRelation::overlaps},
                                                                   {"disjoint", dt::IntervalRelation::disjoint},
                                                                   {"main_eq", dt::IntervalRelation::main_eq},
                                                                   {"main_neq", dt::IntervalRelation::main_neq}};
  for (const auto& [name, rel] : interval) {
    std::string n = name;
    th.add_relation({n, 2, kImprecise, [rel, n](Args a) {
                       return dt::iv_relate(rel, value_arg(a, 0, n), value_arg(a, 1, n));
                     }});
  }

  const std::pair<const char*, dt::Order> orders[] = {
      {"lt", dt::Order::lt}, {"le", dt::Order::le}, {"gt", dt::Order::gt}, {"ge", dt::Order::ge}};
  for (const auto& [base, o] : orders) {
    const std::string b = base;
    for (const std::string& n : {b, b + "_main"}) {
      th.add_relation({n, 2, kOrdered, [o, n](Args a) { return main_order(o, a, n); }});
    }
    for (auto [prefix, flavour] : {std::pair{"must_be_", dt::Flavour::must}, std::pair{"can_be_", dt::Flavour::can}}) {
      const std::string n = prefix + b;
      th.add_relation({n, 2, {Datatype::quantity}, [o, flavour, n](Args a) {
                         return dt::qty_compare(flavour, o, typed_arg<QuantityValue>(a, 0, n),
                                                typed_arg<QuantityValue>(a, 1, n));
                       }});
    }
  }

  const std::pair<const char*, dt::TimeOrder> times[] = {{"before", dt::TimeOrder::before},
                                                         {"after", dt::TimeOrder::after}};
  for (const auto& [base, rel] : times) {
    const std::string b = base;
    const std::pair<std::string, dt::Flavour> variants[] = {{b, dt::Flavour::main},
                                                            {"must_be_" + b, dt::Flavour::must},
                                                            {"can_be_" + b, dt::Flavour::can},
                                                            {"could_be_" + b, dt::Flavour::can}};
    for (const auto& [n, flavour] : variants) {
      th.add_relation({n, 2, {Datatype::time}, [rel, flavour, n](Args a) {
                         return dt::time_compare(flavour, rel, typed_arg<TimeValue>(a, 0, n),
                                                 typed_arg<TimeValue>(a, 1, n));
                       }});
    }
  }

  const std::pair<const char*, dt::Direction> dirs[] = {{"north_of", dt::Direction::north},
                                                        {"south_of", dt::Direction::south},
                                                        {"east_of", dt::Direction::east},
                                                        {"west_of", dt::Direction::west}};
  for (const auto& [base, dir] : dirs) {
    const std::string b = base;
    const std::pair<std::string, dt::Flavour> variants[] = {
        {b, dt::Flavour::main}, {"must_be_" + b, dt::Flavour::must}, {"can_be_" + b, dt::Flavour::can}};
    for (const auto& [n, flavour] : variants) {
      th.add_relation({n, 2, {Datatype::geo_coordinates}, [dir, flavour, n](Args a) {
                         return dt::geo_relate(dir, flavour, typed_arg<GeoCoordinatesValue>(a, 0, n),
                                               typed_arg<GeoCoordinatesValue>(a, 1, n));
                       }});
    }
  }

  th.add_relation({"matches", 2, kStringLike, [](Args a) {
                     return dt::str_relate(dt::StringRelation::matches, value_arg(a, 0, "matches"),
                                           value_arg(a, 1, "matches"));
                   }});
}

void register_functions(DatatypeTheory& th) {
  th.add_function({"iv_intersect", 2, kImprecise, std::nullopt, [](Args a) -> Term {
                     return dt::iv_intersect(value_arg(a, 0, "iv_intersect"), value_arg(a, 1, "iv_intersect"));
                   }});
  th.add_function({"iv_hull", 2, kImprecise, std::nullopt, [](Args a) -> Term {
                     return dt::iv_hull(value_arg(a, 0, "iv_hull"), value_arg(a, 1, "iv_hull"));
                   }});
  th.add_function_alias("intersect", "iv_intersect");
  th.add_function_alias("hull", "iv_hull");

  for (auto [name, which] : {std::pair{"time_first", dt::Extreme::first}, std::pair{"time_last", dt::Extreme::last}}) {
    const std::string n = name;
    th.add_function({n, 2, {Datatype::time}, std::nullopt, [which, n](Args a) -> Term {
                       return DataValue(
                           dt::time_extreme(which, typed_arg<TimeValue>(a, 0, n), typed_arg<TimeValue>(a, 1, n)));
                     }});
  }

  const std::tuple<const char*, dt::Flavour, dt::TimeOrder> parts[] = {
      {"could_be_before", dt::Flavour::can, dt::TimeOrder::before},
      {"can_be_before", dt::Flavour::can, dt::TimeOrder::before},
      {"must_be_before", dt::Flavour::must, dt::TimeOrder::before},
      {"could_be_after", dt::Flavour::can, dt::TimeOrder::after},
      {"can_be_after", dt::Flavour::can, dt::TimeOrder::after},
      {"must_be_after", dt::Flavour::must, dt::TimeOrder::after}};
  for (const auto& [name, flavour, rel] : parts) {
    const std::string n = name;
    th.add_function({n, 2, {Datatype::time}, std::nullopt, [flavour, rel, n](Args a) -> Term {
                       return DataValue(
                           dt::time_part(typed_arg<TimeValue>(a, 0, n), typed_arg<TimeValue>(a, 1, n), flavour, rel));
                     }});
  }

  th.add_function({"text", 1, {Datatype::monolingual_text}, Datatype::string, [](Args a) -> Term {
                     return DataValue(dt::text_extract(dt::TextFunction::text, value_arg(a, 0, "text")));
                   }});
  th.add_function({"lang", 1, {Datatype::monolingual_text}, Datatype::string, [](Args a) -> Term {
                     return DataValue(dt::text_extract(dt::TextFunction::lang, value_arg(a, 0, "lang")));
                   }});
  th.add_function({"text_for_lang", 2, {Datatype::multilingual_text}, Datatype::string, [](Args a) -> Term {
                     const auto& tag = typed_arg<StringValue>(a, 1, "text_for_lang");
                     return DataValue(
                         dt::text_extract(dt::TextFunction::text_for_lang, value_arg(a, 0, "text_for_lang"), tag.text));
                   }});
}

}  // namespace

bool FunctionInfo::closed_on(Datatype d) const {
  return !result && std::find(accepts.begin(), accepts.end(), d) != accepts.end();
}

const DatatypeTheory& DatatypeTheory::wikidata() {
  static const DatatypeTheory theory = [] {
    DatatypeTheory th;
    register_relations(th);
    register_functions(th);
    return th;
  }();
  return theory;
}

const RelationInfo* DatatypeTheory::relation(std::string_view name) const {
  auto it = relations_.find(name);
  return it == relations_.end() ? nullptr : &it->second;
}

const FunctionInfo* DatatypeTheory::function(std::string_view name) const {
  auto it = functions_.find(name);
  return it == functions_.end() ? nullptr : &it->second;
}

std::vector<std::string> DatatypeTheory::relation_names() const {
  std::vector<std::string> out;
  for (const auto& [name, info] : relations_) out.push_back(name);
  return out;
}

std::vector<std::string> DatatypeTheory::function_names() const {
  std::vector<std::string> out;
  for (const auto& [name, info] : functions_) out.push_back(name);
  return out;
}

void DatatypeTheory::add_relation(RelationInfo info) {
  RelationInfo negated = info;
  negated.name = "not_" + info.name;
  negated.eval = [f = info.eval](Args a) { return !f(a); };
  relations_.insert_or_assign(negated.name, std::move(negated));
  std::string name = info.name;
  relations_.insert_or_assign(std::move(name), std::move(info));
}

void DatatypeTheory::add_function(FunctionInfo info) {
  std::string name = info.name;
  functions_.insert_or_assign(std::move(name), std::move(info));
}

void DatatypeTheory::add_function_alias(const std::string& alias, const std::string& target) {
  FunctionInfo info = functions_.at(target);
  info.name = alias;
  add_function(std::move(info));
}

}  // namespace emars
