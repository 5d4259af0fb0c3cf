#include "chorex/printer.hpp"

#include <sstream>

#include "overloaded.hpp"

namespace chorex {

using detail::overloaded;

namespace {

void print(std::ostream& os, const Choreography& c);
void print(std::ostream& os, const Behaviour& b);

void print(std::ostream& os, const Interaction& eta) {
  if (eta.kind == Interaction::Kind::Com) {
    os << eta.sender << "." << to_string(eta.expr) << " -> " << eta.receiver;
  } else {
    os << eta.sender << " -> " << eta.receiver << "[" << eta.label << "]";
  }
}

void print(std::ostream& os, const Choreography& c) {
  std::visit(overloaded{
                 [&](const ChorEnd&) { os << "0"; },
                 [&](const ChorStuck& x) {
                   os << "1";
                   if (!x.notes.empty()) {
                     os << " /* stuck:";
                     for (std::size_t i = 0; i < x.notes.size(); ++i) os << (i ? " | " : " ") << x.notes[i];
                     os << " */";
                   }
                 },
                 [&](const ChorSeq& x) {
                   if (x.actions.size() == 1) {
                     print(os, x.actions.front());
                   } else {
                     os << "(";
                     for (std::size_t i = 0; i < x.actions.size(); ++i) {
                       if (i) os << " | ";
                       print(os, x.actions[i]);
                     }
                     os << ")";
                   }
                   os << "; ";
                   print(os, x.cont);
                 },
                 [&](const ChorCond& x) {
                   os << "if " << x.p << "=" << x.q << " then (";
                   print(os, x.then_branch);
                   os << ") else (";
                   print(os, x.else_branch);
                   os << ")";
                 },
                 [&](const ChorCall& x) { os << x.name; },
                 [&](const ChorDef& x) {
                   os << "def " << x.name << " = ";
                   print(os, x.body);
                   os << " in ";
                   print(os, x.cont);
                 },
             },
             c->node);
}

void print(std::ostream& os, const Behaviour& b) {
  std::visit(overloaded{
                 [&](const BehEnd&) { os << "0"; },
                 [&](const BehSend& x) {
                   os << x.to << "!" << to_string(x.expr) << "; ";
                   print(os, x.cont);
                 },
                 [&](const BehRecv& x) {
                   os << x.from << "?; ";
                   print(os, x.cont);
                 },
                 [&](const BehSelect& x) {
                   os << x.to << "+" << x.label << "; ";
                   print(os, x.cont);
                 },
                 [&](const BehBranch& x) {
                   os << x.from << "&{";
                   bool first = true;
                   for (const auto& [l, br] : x.branches) {
                     os << (first ? "" : ", ") << l << ": ";
                     print(os, br);
                     first = false;
                   }
                   os << "}";
                 },
                 [&](const BehCond& x) {
                   os << "if *=" << x.other << " then (";
                   print(os, x.then_branch);
                   os << ") else (";
                   print(os, x.else_branch);
                   os << ")";
                 },
                 [&](const BehDef& x) {
                   os << "def " << x.name << " = ";
                   print(os, x.body);
                   os << " in ";
                   print(os, x.cont);
                 },
                 [&](const BehCall& x) { os << x.name; },
             },
             b->node);
}

template <class T>
std::string to_text(const T& t) {
  std::ostringstream os;
  print(os, t);
  return os.str();
}

}  // namespace

std::string render(const Interaction& eta) { return to_text(eta); }
std::string render(const Choreography& c) { return to_text(c); }
std::string render(const Behaviour& b) { return to_text(b); }

std::string render(const ChoreographyProgram& prog) {
  std::ostringstream os;
  for (const auto& [name, body] : prog.defs) {
    os << "def " << name << " = ";
    print(os, body);
    os << "\n";
  }
  os << "main = ";
  print(os, prog.main);
  return os.str();
}

std::string render(const Network& n) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [p, b] : n.processes) {
    if (!first) os << "\n| ";
    os << p << " { ";
    print(os, b);
    os << " }";
    first = false;
  }
  return os.str();
}

}  // namespace chorex
