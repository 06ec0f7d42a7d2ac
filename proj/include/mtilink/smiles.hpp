#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "mtilink/error.hpp"
#include "mtilink/tsv.hpp"

namespace mtilink {

enum class BondType : int { Single = 0, Double = 1, Triple = 2, Aromatic = 3 };

inline constexpr int kNumBondTypes = 4;

// Twice the bond order, so aromatic (1.5) stays integral.
inline int twice_bond_order(BondType b) {
  switch (b) {
    case BondType::Single: return 2;
    case BondType::Double: return 4;
    case BondType::Triple: return 6;
    case BondType::Aromatic: return 3;
  }
  return 2;
}

// Per-atom integer attributes; the 7-slot initial feature of the molecule
// branch, in this fixed order.
struct AtomAttr {
  int element = 0;        // atomic number
  int degree = 0;         // heavy-atom neighbors
  int formal_charge = 0;
  int chirality = 0;      // 0 none, 1 @, 2 @@
  int num_hydrogens = 0;  // explicit + implicit
  int hybridization = 0;  // 0 sp, 1 sp2, 2 sp3, 3 other
  int is_aromatic = 0;

  std::array<int, 7> features() const {
    return {element, degree, formal_charge, chirality, num_hydrogens, hybridization,
            is_aromatic};
  }

  friend bool operator==(const AtomAttr&, const AtomAttr&) = default;
};

struct Bond {
  std::uint32_t i = 0;
  std::uint32_t j = 0;
  BondType order = BondType::Single;

  friend bool operator==(const Bond&, const Bond&) = default;
};

// Bidirectional heavy-atom graph of one molecule. May be disconnected
// (multi-fragment SMILES). Atom order is appearance order in the source
// string.
struct MolecularGraph {
  std::vector<AtomAttr> atoms;
  std::vector<Bond> bonds;
  std::vector<std::vector<std::uint32_t>> adjacency;  // symmetric, ascending

  std::size_t num_atoms() const { return atoms.size(); }
  std::size_t num_bonds() const { return bonds.size(); }

  friend bool operator==(const MolecularGraph&, const MolecularGraph&) = default;
};

inline std::array<int, 7> atom_features(const MolecularGraph& g, std::size_t i) {
  if (i >= g.atoms.size()) {
    raise(Errc::IndexOutOfRange,
          "atom " + std::to_string(i) + " of " + std::to_string(g.atoms.size()));
  }
  return g.atoms[i].features();
}

namespace detail {

inline const std::unordered_map<std::string, int>& element_table() {
  static const std::unordered_map<std::string, int> table = {
      {"H", 1},    {"He", 2},   {"Li", 3},   {"Be", 4},   {"B", 5},    {"C", 6},
      {"N", 7},    {"O", 8},    {"F", 9},    {"Ne", 10},  {"Na", 11},  {"Mg", 12},
      {"Al", 13},  {"Si", 14},  {"P", 15},   {"S", 16},   {"Cl", 17},  {"Ar", 18},
      {"K", 19},   {"Ca", 20},  {"Sc", 21},  {"Ti", 22},  {"V", 23},   {"Cr", 24},
      {"Mn", 25},  {"Fe", 26},  {"Co", 27},  {"Ni", 28},  {"Cu", 29},  {"Zn", 30},
      {"Ga", 31},  {"Ge", 32},  {"As", 33},  {"Se", 34},  {"Br", 35},  {"Kr", 36},
      {"Rb", 37},  {"Sr", 38},  {"Y", 39},   {"Zr", 40},  {"Nb", 41},  {"Mo", 42},
      {"Tc", 43},  {"Ru", 44},  {"Rh", 45},  {"Pd", 46},  {"Ag", 47},  {"Cd", 48},
      {"In", 49},  {"Sn", 50},  {"Sb", 51},  {"Te", 52},  {"I", 53},   {"Xe", 54},
      {"Cs", 55},  {"Ba", 56},  {"La", 57},  {"Ce", 58},  {"Pr", 59},  {"Nd", 60},
      {"Pm", 61},  {"Sm", 62},  {"Eu", 63},  {"Gd", 64},  {"Tb", 65},  {"Dy", 66},
      {"Ho", 67},  {"Er", 68},  {"Tm", 69},  {"Yb", 70},  {"Lu", 71},  {"Hf", 72},
      {"Ta", 73},  {"W", 74},   {"Re", 75},  {"Os", 76},  {"Ir", 77},  {"Pt", 78},
      {"Au", 79},  {"Hg", 80},  {"Tl", 81},  {"Pb", 82},  {"Bi", 83},  {"Po", 84},
      {"At", 85},  {"Rn", 86},  {"Fr", 87},  {"Ra", 88},  {"Ac", 89},  {"Th", 90},
      {"Pa", 91},  {"U", 92},   {"Np", 93},  {"Pu", 94},
  };
  return table;
}

// Organic-subset valences: the default fills implicit hydrogens, the max
// caps bonding before ValenceUnderflow. Hypervalent-written nitro, sulfone
// and phosphate groups sit between the two; they parse with zero hydrogens.
struct OrganicValence {
  int def;
  int max;
};

inline const OrganicValence* organic_valence(int element) {
  static const std::unordered_map<int, OrganicValence> table = {
      {5, {3, 3}},  {6, {4, 4}},  {7, {3, 5}},  {8, {2, 2}},  {15, {3, 5}},
      {16, {2, 6}}, {9, {1, 1}},  {17, {1, 1}}, {35, {1, 1}}, {53, {1, 1}},
  };
  auto it = table.find(element);
  return it == table.end() ? nullptr : &it->second;
}

// Charge shifts bonding capacity: cations of N/O/P/S/halogen gain a bond,
// anions lose one; carbon loses capacity in either direction; boron gains
// on the anion side.
inline int charge_adjust(int element, int valence, int charge) {
  int adjusted;
  if (element == 6) {
    adjusted = valence - (charge < 0 ? -charge : charge);
  } else if (element == 5) {
    adjusted = valence - charge;
  } else {
    adjusted = valence + charge;
  }
  return adjusted < 0 ? 0 : adjusted;
}

}  // namespace detail

// Hydrogens needed to fill the charge-adjusted default valence, given the
// heavy bond-order sum (aromatic bonds count 1.5; the sum is floored).
// Saturated and hypervalent atoms return 0, as do elements outside the
// organic subset.
inline int implicit_hydrogens(int element, int charge, double bond_order_sum) {
  const auto* valence = detail::organic_valence(element);
  if (valence == nullptr) return 0;
  const int bonds = static_cast<int>(bond_order_sum);  // non-negative, so truncation == floor
  const int adjusted = detail::charge_adjust(element, valence->def, charge);
  return adjusted > bonds ? adjusted - bonds : 0;
}

namespace detail {

struct ParserAtom {
  int element = 0;
  bool aromatic = false;
  bool bracket = false;
  int charge = 0;
  int chirality = 0;
  int explicit_h = 0;  // bracket atoms only
};

class SmilesParser {
 public:
  explicit SmilesParser(const std::string& s) : s_(s) {}

  MolecularGraph run() {
    if (s_.empty()) raise(Errc::UnknownAtomSymbol, "empty SMILES string");
    while (pos_ < s_.size()) step();
    finish();
    return build();
  }

 private:
  void step() {
    const char c = s_[pos_];
    if (c == '(') {
      if (!prev_) raise(Errc::UnbalancedParenthesis, ctx("branch opened before any atom"));
      if (pending_bond_) raise(Errc::InvalidBond, ctx("bond symbol before '('"));
      branch_stack_.push_back(*prev_);
      ++pos_;
    } else if (c == ')') {
      if (branch_stack_.empty()) raise(Errc::UnbalancedParenthesis, ctx("unmatched ')'"));
      if (pending_bond_) raise(Errc::InvalidBond, ctx("dangling bond before ')'"));
      prev_ = branch_stack_.back();
      branch_stack_.pop_back();
      ++pos_;
    } else if (c == '.') {
      if (pending_bond_) raise(Errc::InvalidBond, ctx("bond symbol before '.'"));
      prev_.reset();
      ++pos_;
    } else if (c == '-' || c == '=' || c == '#' || c == ':') {
      if (pending_bond_) raise(Errc::InvalidBond, ctx("two bond symbols in a row"));
      pending_bond_ = bond_from_char(c);
      ++pos_;
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '%') {
      ring_closure();
    } else if (c == '[') {
      add_atom(parse_bracket_atom());
    } else {
      add_atom(parse_organic_atom());
    }
  }

  static BondType bond_from_char(char c) {
    switch (c) {
      case '-': return BondType::Single;
      case '=': return BondType::Double;
      case '#': return BondType::Triple;
      default: return BondType::Aromatic;
    }
  }

  ParserAtom parse_organic_atom() {
    const char c = s_[pos_];
    ParserAtom atom;
    switch (c) {
      case 'C':
        if (pos_ + 1 < s_.size() && s_[pos_ + 1] == 'l') {
          atom.element = 17;
          pos_ += 2;
          return atom;
        }
        atom.element = 6;
        break;
      case 'B':
        if (pos_ + 1 < s_.size() && s_[pos_ + 1] == 'r') {
          atom.element = 35;
          pos_ += 2;
          return atom;
        }
        atom.element = 5;
        break;
      case 'N': atom.element = 7; break;
      case 'O': atom.element = 8; break;
      case 'P': atom.element = 15; break;
      case 'S': atom.element = 16; break;
      case 'F': atom.element = 9; break;
      case 'I': atom.element = 53; break;
      case 'b': atom.element = 5; atom.aromatic = true; break;
      case 'c': atom.element = 6; atom.aromatic = true; break;
      case 'n': atom.element = 7; atom.aromatic = true; break;
      case 'o': atom.element = 8; atom.aromatic = true; break;
      case 'p': atom.element = 15; atom.aromatic = true; break;
      case 's': atom.element = 16; atom.aromatic = true; break;
      default:
        raise(Errc::UnknownAtomSymbol, ctx(std::string("unexpected character '") + c + "'"));
    }
    ++pos_;
    return atom;
  }

  ParserAtom parse_bracket_atom() {
    ++pos_;  // consume '['
    ParserAtom atom;
    atom.bracket = true;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      ++pos_;  // isotope label: parsed, not an attribute
    }
    parse_bracket_symbol(atom);
    if (pos_ < s_.size() && s_[pos_] == '@') {
      ++pos_;
      if (pos_ < s_.size() && s_[pos_] == '@') {
        atom.chirality = 2;
        ++pos_;
      } else {
        atom.chirality = 1;
      }
    }
    if (pos_ < s_.size() && s_[pos_] == 'H') {
      ++pos_;
      atom.explicit_h = 1;
      if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        atom.explicit_h = 0;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
          atom.explicit_h = atom.explicit_h * 10 + (s_[pos_] - '0');
          ++pos_;
        }
      }
    }
    if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) {
      atom.charge = parse_charge();
    }
    if (pos_ < s_.size() && s_[pos_] == ':') {
      ++pos_;  // atom class: parsed, not an attribute
      if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        raise(Errc::UnknownAtomSymbol, ctx("atom class without digits"));
      }
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    if (pos_ >= s_.size() || s_[pos_] != ']') {
      raise(Errc::UnknownAtomSymbol, ctx("unterminated bracket atom"));
    }
    ++pos_;
    return atom;
  }

  void parse_bracket_symbol(ParserAtom& atom) {
    if (pos_ >= s_.size()) raise(Errc::UnknownAtomSymbol, ctx("unterminated bracket atom"));
    const char c = s_[pos_];
    if (std::islower(static_cast<unsigned char>(c))) {
      // aromatic bracket symbols: c, n, o, p, s, b, se, as
      std::string sym(1, c);
      if ((c == 's' || c == 'a') && pos_ + 1 < s_.size() &&
          (s_[pos_ + 1] == 'e' || s_[pos_ + 1] == 's')) {
        sym += s_[pos_ + 1];
      }
      static const std::unordered_map<std::string, int> aromatic_symbols = {
          {"b", 5}, {"c", 6}, {"n", 7}, {"o", 8}, {"p", 15},
          {"s", 16}, {"se", 34}, {"as", 33}};
      auto it = aromatic_symbols.find(sym);
      if (it == aromatic_symbols.end()) {
        raise(Errc::UnknownAtomSymbol, ctx("unknown aromatic symbol '" + sym + "'"));
      }
      atom.element = it->second;
      atom.aromatic = true;
      pos_ += sym.size();
      return;
    }
    if (!std::isupper(static_cast<unsigned char>(c))) {
      raise(Errc::UnknownAtomSymbol, ctx(std::string("bad element symbol start '") + c + "'"));
    }
    std::string sym(1, c);
    if (pos_ + 1 < s_.size() && std::islower(static_cast<unsigned char>(s_[pos_ + 1]))) {
      const std::string two = sym + s_[pos_ + 1];
      if (detail::element_table().count(two)) {
        atom.element = detail::element_table().at(two);
        pos_ += 2;
        return;
      }
    }
    auto it = detail::element_table().find(sym);
    if (it == detail::element_table().end()) {
      raise(Errc::UnknownAtomSymbol, ctx("unknown element '" + sym + "'"));
    }
    if (it->second == 1) {
      raise(Errc::UnknownAtomSymbol, ctx("hydrogen as an explicit atom is not supported"));
    }
    atom.element = it->second;
    ++pos_;
  }

  int parse_charge() {
    const char sign_char = s_[pos_];
    const int sign = sign_char == '+' ? 1 : -1;
    ++pos_;
    if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      int mag = 0;
      int digits = 0;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        mag = mag * 10 + (s_[pos_] - '0');
        ++pos_;
        if (++digits > 2) raise(Errc::InvalidCharge, ctx("charge magnitude too long"));
      }
      if (mag == 0) raise(Errc::InvalidCharge, ctx("zero charge magnitude"));
      return sign * mag;
    }
    int mag = 1;
    while (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) {
      if (s_[pos_] != sign_char) raise(Errc::InvalidCharge, ctx("mixed charge signs"));
      ++mag;
      ++pos_;
    }
    return sign * mag;
  }

  void ring_closure() {
    if (!prev_) raise(Errc::UnclosedRingBond, ctx("ring bond digit before any atom"));
    int digit;
    if (s_[pos_] == '%') {
      if (pos_ + 2 >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_ + 1])) ||
          !std::isdigit(static_cast<unsigned char>(s_[pos_ + 2]))) {
        raise(Errc::UnclosedRingBond, ctx("'%' needs two digits"));
      }
      digit = (s_[pos_ + 1] - '0') * 10 + (s_[pos_ + 2] - '0');
      pos_ += 3;
    } else {
      digit = s_[pos_] - '0';
      ++pos_;
    }
    auto it = open_rings_.find(digit);
    if (it == open_rings_.end()) {
      open_rings_[digit] = {*prev_, pending_bond_};
      pending_bond_.reset();
      return;
    }
    const auto [open_atom, open_bond] = it->second;
    open_rings_.erase(it);
    if (open_bond && pending_bond_ && *open_bond != *pending_bond_) {
      raise(Errc::InvalidBond, ctx("ring bond order mismatch"));
    }
    std::optional<BondType> order = pending_bond_ ? pending_bond_ : open_bond;
    pending_bond_.reset();
    connect(open_atom, *prev_, order);
  }

  void add_atom(const ParserAtom& atom) {
    const auto index = static_cast<std::uint32_t>(atoms_.size());
    atoms_.push_back(atom);
    if (prev_) connect(*prev_, index, pending_bond_);
    pending_bond_.reset();
    prev_ = index;
  }

  void connect(std::uint32_t a, std::uint32_t b, std::optional<BondType> order) {
    if (a == b) raise(Errc::InvalidBond, ctx("bond from an atom to itself"));
    BondType bt;
    if (order) {
      bt = *order;
      if (bt == BondType::Aromatic && !(atoms_[a].aromatic && atoms_[b].aromatic)) {
        raise(Errc::InvalidBond, ctx("aromatic bond between non-aromatic atoms"));
      }
    } else {
      bt = (atoms_[a].aromatic && atoms_[b].aromatic) ? BondType::Aromatic : BondType::Single;
    }
    const std::uint64_t key = bond_key(a, b);
    if (!seen_bonds_.insert(key).second) {
      raise(Errc::InvalidBond, ctx("duplicate bond between atoms " + std::to_string(a) +
                                   " and " + std::to_string(b)));
    }
    bonds_.push_back({a, b, bt});
  }

  static std::uint64_t bond_key(std::uint32_t a, std::uint32_t b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | b;
  }

  void finish() const {
    if (!branch_stack_.empty()) raise(Errc::UnbalancedParenthesis, "unclosed '(' at end of input");
    if (pending_bond_) raise(Errc::InvalidBond, "dangling bond at end of input");
    if (!open_rings_.empty()) {
      raise(Errc::UnclosedRingBond,
            "ring bond " + std::to_string(open_rings_.begin()->first) + " never closed");
    }
  }

  MolecularGraph build() const {
    MolecularGraph g;
    const std::size_t n = atoms_.size();
    g.adjacency.assign(n, {});
    std::vector<int> twice_sum(n, 0);
    std::vector<int> doubles(n, 0);
    std::vector<int> triples(n, 0);
    std::vector<int> aromatic_bonds(n, 0);
    for (const Bond& b : bonds_) {
      g.adjacency[b.i].push_back(b.j);
      g.adjacency[b.j].push_back(b.i);
      twice_sum[b.i] += twice_bond_order(b.order);
      twice_sum[b.j] += twice_bond_order(b.order);
      if (b.order == BondType::Double) { ++doubles[b.i]; ++doubles[b.j]; }
      if (b.order == BondType::Triple) { ++triples[b.i]; ++triples[b.j]; }
      if (b.order == BondType::Aromatic) { ++aromatic_bonds[b.i]; ++aromatic_bonds[b.j]; }
    }
    for (auto& adj : g.adjacency) std::sort(adj.begin(), adj.end());
    g.bonds = bonds_;
    g.atoms.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const ParserAtom& pa = atoms_[i];
      AtomAttr attr;
      attr.element = pa.element;
      attr.degree = static_cast<int>(g.adjacency[i].size());
      attr.formal_charge = pa.charge;
      attr.chirality = pa.chirality;
      attr.is_aromatic = pa.aromatic ? 1 : 0;
      if (pa.bracket) {
        attr.num_hydrogens = pa.explicit_h;
      } else {
        const auto* valence = detail::organic_valence(pa.element);
        if (valence != nullptr) {
          const int max_adjusted = detail::charge_adjust(pa.element, valence->max, pa.charge);
          // For the overflow check, aromatic bonds count at their kekulized
          // minimum (order 1): ring atoms with exocyclic double bonds, like
          // the carbonyl carbons of caffeine, are fine in some kekulization.
          const int min_sum =
              aromatic_bonds[i] + (twice_sum[i] - 3 * aromatic_bonds[i]) / 2;
          if (min_sum > max_adjusted) {
            raise(Errc::ValenceUnderflow,
                  "atom " + std::to_string(i) + ": bond order sum " + std::to_string(min_sum) +
                      " exceeds supported valence " + std::to_string(max_adjusted));
          }
        }
        attr.num_hydrogens =
            implicit_hydrogens(pa.element, pa.charge, static_cast<double>(twice_sum[i]) / 2.0);
      }
      if (triples[i] >= 1 || doubles[i] >= 2) {
        attr.hybridization = 0;  // sp
      } else if (pa.aromatic || doubles[i] == 1) {
        attr.hybridization = 1;  // sp2
      } else if (pa.charge == 0) {
        attr.hybridization = 2;  // sp3
      } else {
        attr.hybridization = 3;  // other
      }
      g.atoms.push_back(attr);
    }
    return g;
  }

  std::string ctx(const std::string& msg) const {
    return msg + " at position " + std::to_string(pos_) + " in '" + s_ + "'";
  }

  const std::string& s_;
  std::size_t pos_ = 0;
  std::vector<ParserAtom> atoms_;
  std::vector<Bond> bonds_;
  std::unordered_set<std::uint64_t> seen_bonds_;
  std::optional<std::uint32_t> prev_;
  std::optional<BondType> pending_bond_;
  std::vector<std::uint32_t> branch_stack_;
  std::unordered_map<int, std::pair<std::uint32_t, std::optional<BondType>>> open_rings_;
};

}  // namespace detail

inline MolecularGraph parse_smiles(const std::string& s) {
  return detail::SmilesParser(s).run();
}

// id -> SMILES table; structures parse lazily and cache.
class MoleculeTable {
 public:
  static MoleculeTable load(const std::vector<TsvRow>& rows) {
    MoleculeTable table;
    for (const auto& row : rows) {
      if (row.fields.size() != 2) {
        raise(Errc::MalformedRow, "line " + std::to_string(row.line_no) + ": expected 2 columns");
      }
      const std::string& id = row.fields[0];
      const std::string& smiles = row.fields[1];
      if (id.empty() || smiles.empty()) {
        raise(Errc::MalformedRow, "line " + std::to_string(row.line_no) + ": empty field");
      }
      auto it = table.smiles_.find(id);
      if (it != table.smiles_.end()) {
        if (it->second != smiles) {
          raise(Errc::MalformedRow, "molecule '" + id + "' has two different structures");
        }
        continue;
      }
      table.smiles_.emplace(id, smiles);
    }
    return table;
  }

  static MoleculeTable load_file(const std::string& path) {
    return load(read_tsv_file(path, 2));
  }

  // Same conflict rule as load: re-adding an id is fine only if the
  // structure agrees.
  void add(const std::string& id, const std::string& smiles) {
    if (id.empty() || smiles.empty()) {
      raise(Errc::MalformedRow, "empty molecule id or structure");
    }
    auto it = smiles_.find(id);
    if (it != smiles_.end()) {
      if (it->second != smiles) {
        raise(Errc::MalformedRow, "molecule '" + id + "' has two different structures");
      }
      return;
    }
    smiles_.emplace(id, smiles);
  }

  bool contains(const std::string& id) const { return smiles_.count(id) > 0; }

  const std::string& smiles_of(const std::string& id) const {
    auto it = smiles_.find(id);
    if (it == smiles_.end()) raise(Errc::MissingStructure, "no SMILES for molecule '" + id + "'");
    return it->second;
  }

  const MolecularGraph& graph_of(const std::string& id) const {
    auto it = graphs_.find(id);
    if (it != graphs_.end()) return it->second;
    return graphs_.emplace(id, parse_smiles(smiles_of(id))).first->second;
  }

  std::size_t size() const { return smiles_.size(); }

 private:
  std::unordered_map<std::string, std::string> smiles_;
  mutable std::unordered_map<std::string, MolecularGraph> graphs_;
};

}  // namespace mtilink
