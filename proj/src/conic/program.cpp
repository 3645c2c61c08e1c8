#include "ies/conic/program.hpp"

#include <cmath>
#include <ostream>

namespace ies::conic {

int ConicProgram::add_var(std::string name, VarKind kind, double lo, double hi) {
  if (kind == VarKind::Binary) {
    lo = 0.0;
    hi = 1.0;
  }
  if (lo > hi) throw SolverError(format_msg("variable ", name, ": lower bound exceeds upper"));
  vars_.push_back({std::move(name), kind, lo, hi});
  return static_cast<int>(vars_.size()) - 1;
}

void ConicProgram::add_linear(std::string name, Sense sense, double rhs,
                              std::vector<LinTerm> terms) {
  lin_.push_back({std::move(name), sense, rhs, std::move(terms)});
}

void ConicProgram::add_soc(SocConstraint soc) {
  if (soc.norm_rows.size() != soc.norm_offsets.size())
    throw SolverError(format_msg("cone ", soc.name, ": row/offset size mismatch"));
  socs_.push_back(std::move(soc));
}

void ConicProgram::add_objective_term(int var, double coef) {
  if (coef != 0.0) obj_.push_back({var, coef});
}

void ConicProgram::add_complement_pair(int a, int b) {
  pairs_.emplace_back(a, b);
  add_linear(format_msg("pair[", vars_[a].name, ",", vars_[b].name, "]"), Sense::EQ, 1.0,
             {{a, 1.0}, {b, 1.0}});
}

std::vector<int> ConicProgram::binary_vars() const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(vars_.size()); ++i)
    if (vars_[i].kind == VarKind::Binary) out.push_back(i);
  return out;
}

double ConicProgram::objective_value(std::span<const double> x) const {
  double v = obj_constant_;
  for (const auto& t : obj_) v += t.coef * x[t.var];
  return v;
}

namespace {
double eval_terms(const std::vector<LinTerm>& terms, std::span<const double> x) {
  double v = 0.0;
  for (const auto& t : terms) v += t.coef * x[t.var];
  return v;
}
}  // namespace

std::vector<ConicProgram::Violation> ConicProgram::check_point(std::span<const double> x,
                                                               double tol,
                                                               double int_tol) const {
  // tolerances scale with the magnitudes involved, so rows written in large
  // physical units are judged consistently with per-unit rows
  std::vector<Violation> out;
  for (int i = 0; i < static_cast<int>(vars_.size()); ++i) {
    const auto& v = vars_[i];
    double scale = std::max({1.0, std::isfinite(v.lo) ? std::fabs(v.lo) : 0.0,
                             std::isfinite(v.hi) ? std::fabs(v.hi) : 0.0});
    if (x[i] < v.lo - tol * scale)
      out.push_back({format_msg(v.name, " below lower bound"), v.lo - x[i]});
    if (x[i] > v.hi + tol * scale)
      out.push_back({format_msg(v.name, " above upper bound"), x[i] - v.hi});
    if (v.kind == VarKind::Binary) {
      double frac = std::fabs(x[i] - std::round(x[i]));
      if (frac > int_tol) out.push_back({format_msg(v.name, " not integral"), frac});
    }
  }
  for (const auto& row : lin_) {
    double lhs = 0.0, scale = std::max(1.0, std::fabs(row.rhs));
    for (const auto& t : row.terms) {
      double c = t.coef * x[t.var];
      lhs += c;
      scale = std::max(scale, std::fabs(c));
    }
    double gap = lhs - row.rhs;
    double lim = tol * scale;
    bool bad = (row.sense == Sense::LE && gap > lim) || (row.sense == Sense::GE && gap < -lim) ||
               (row.sense == Sense::EQ && std::fabs(gap) > lim);
    if (bad) out.push_back({format_msg("row ", row.name), std::fabs(gap)});
  }
  for (const auto& soc : socs_) {
    double nn = 0.0;
    for (std::size_t r = 0; r < soc.norm_rows.size(); ++r) {
      double v = eval_terms(soc.norm_rows[r], x) + soc.norm_offsets[r];
      nn += v * v;
    }
    double rhs = eval_terms(soc.rhs_terms, x) + soc.rhs_offset;
    double scale = std::max({1.0, std::fabs(rhs), std::sqrt(nn)});
    if (std::sqrt(nn) > rhs + tol * scale)
      out.push_back({format_msg("cone ", soc.name), std::sqrt(nn) - rhs});
  }
  return out;
}

void ConicProgram::validate() const {
  const int n = static_cast<int>(vars_.size());
  auto check_terms = [&](const std::vector<LinTerm>& terms, const std::string& where) {
    for (const auto& t : terms) {
      if (t.var < 0 || t.var >= n)
        throw SolverError(format_msg(where, ": references unknown variable ", t.var));
      if (!std::isfinite(t.coef))
        throw SolverError(format_msg(where, ": non-finite coefficient"));
    }
  };
  for (const auto& v : vars_) {
    if (v.kind == VarKind::Binary && (v.lo < 0.0 || v.hi > 1.0))
      throw SolverError(format_msg("binary ", v.name, " must have bounds within [0,1]"));
  }
  for (const auto& row : lin_) check_terms(row.terms, "row " + row.name);
  for (const auto& soc : socs_) {
    for (const auto& r : soc.norm_rows) check_terms(r, "cone " + soc.name);
    check_terms(soc.rhs_terms, "cone " + soc.name);
  }
  check_terms(obj_, "objective");
}

void ConicProgram::write_text(std::ostream& os) const {
  os << "conic-program vars=" << vars_.size() << " rows=" << lin_.size()
     << " cones=" << socs_.size() << "\n";
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    const auto& v = vars_[i];
    os << "var " << i << " " << v.name << " "
       << (v.kind == VarKind::Binary ? "bin" : "cont") << " " << fmt_double(v.lo) << " "
       << fmt_double(v.hi) << "\n";
  }
  os << "min";
  for (const auto& t : obj_) os << " " << fmt_double(t.coef) << "*x" << t.var;
  if (obj_constant_ != 0.0) os << " + " << fmt_double(obj_constant_);
  os << "\n";
  for (const auto& row : lin_) {
    os << "row " << row.name << ":";
    for (const auto& t : row.terms) os << " " << fmt_double(t.coef) << "*x" << t.var;
    os << (row.sense == Sense::LE ? " <= " : row.sense == Sense::GE ? " >= " : " == ")
       << fmt_double(row.rhs) << "\n";
  }
  for (const auto& soc : socs_) {
    os << "soc " << soc.name << ": ||";
    for (std::size_t r = 0; r < soc.norm_rows.size(); ++r) {
      if (r) os << " ; ";
      for (const auto& t : soc.norm_rows[r]) os << fmt_double(t.coef) << "*x" << t.var << " ";
      os << "+ " << fmt_double(soc.norm_offsets[r]);
    }
    os << "|| <= ";
    for (const auto& t : soc.rhs_terms) os << fmt_double(t.coef) << "*x" << t.var << " ";
    os << "+ " << fmt_double(soc.rhs_offset) << "\n";
  }
}

}  // namespace ies::conic
