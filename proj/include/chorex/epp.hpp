// EndPoint Projection.

#pragma once

#include <map>
#include <set>
#include <string>

#include "chorex/syntax.hpp"

namespace chorex {

/// Two behaviours have no merge. `path()` locates the first incompatible
/// pair, as a sequence of steps from the root (e.g. "a!pwd/&ok").
class MergeError : public Error {
 public:
  MergeError(std::string path, const Behaviour& left, const Behaviour& right);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

class ProjectionError : public Error {
 public:
  ProjectionError(ProcessName process, const std::string& reason);
  const ProcessName& process() const { return process_; }

 private:
  ProcessName process_;
};

Behaviour merge(const Behaviour& a, const Behaviour& b);

/// Procedure name -> processes involved in it, including through the
/// procedures it calls (least fixpoint). Nested definitions are included.
using ProcedureUsage = std::map<ProcedureName, std::set<ProcessName>>;
ProcedureUsage procedure_usage(const ChoreographyProgram& prog);

/// Projects a choreography term onto r. Definition-free result except for
/// nested `def` nodes in c, which are projected in place.
Behaviour project_behaviour(const ChoreographyProgram& prog, const Choreography& c, const ProcessName& r,
                            const ProcedureUsage& usage);

/// One process per name of main and the definitions reachable from it.
/// Each behaviour carries the projections of the procedures it uses as
/// nested definitions.
Network epp(const ChoreographyProgram& prog);

}  // namespace chorex
