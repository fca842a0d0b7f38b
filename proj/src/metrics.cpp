#include "codesift/metrics.hpp"

#include <cmath>
#include <numbers>
#include <set>

#include "codesift/errors.hpp"
#include "codesift/syntax.hpp"

namespace codesift {

double dcg(const std::vector<int>& labels) {
  double sum = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    sum += labels[i] / std::log2(static_cast<double>(i) + 2.0);
  }
  return sum;
}

double idcg(std::size_t k) { return dcg(std::vector<int>(k, kMaxRelevance)); }

double ndcg_at_k(const RelevanceVector& rel) {
  rel.validate();
  if (rel.k() == 0) throw InvalidValueError("ndcg needs k >= 1");
  return dcg(rel.labels) / idcg(rel.k());
}

int relevance_of(const QualityAssessment& a, const ManualLabels* labels) {
  if (!a.syntax_ok) return 0;
  if (!a.findings.empty() || a.score < 1.0) return 1;
  if (labels) {
    auto it = labels->find(a.suggestion_position);
    if (it != labels->end()) return it->second;
  }
  throw MissingLabelError("no manual label for clean snippet at position " +
                          std::to_string(a.suggestion_position));
}

namespace {

std::map<int, int> relevance_by_position(const RankedInventory& ranked,
                                         const ManualLabels* labels) {
  std::map<int, int> rel;
  for (const auto& e : ranked.entries) {
    rel[e.suggestion.position] = relevance_of(e.assessment, labels);
  }
  if (labels) {
    for (const auto& [pos, value] : *labels) {
      if (value != 2 && value != 3) {
        throw IllegalLabelError("label " + std::to_string(value) + " at position " +
                                std::to_string(pos) + " is not 2 or 3");
      }
      auto it = rel.find(pos);
      if (it == rel.end() || it->second < 2) {
        throw IllegalLabelError("position " + std::to_string(pos) +
                                " is not a compilable smell-free snippet");
      }
    }
  }
  return rel;
}

}  // namespace

RelevanceVector assign_relevance(const RankedInventory& ranked, const ManualLabels* labels,
                                 std::size_t k) {
  const auto rel = relevance_by_position(ranked, labels);
  RelevanceVector out;
  for (const auto& e : ranked.entries) {
    if (out.labels.size() == k) break;
    out.labels.push_back(rel.at(e.suggestion.position));
  }
  out.labels.resize(k, 0);
  return out;
}

RelevanceVector model_order_relevance(const RankedInventory& ranked, const ManualLabels* labels,
                                      std::size_t k) {
  const auto rel = relevance_by_position(ranked, labels);
  RelevanceVector out;
  for (std::size_t pos = 1; pos <= k; ++pos) {
    auto it = rel.find(static_cast<int>(pos));
    out.labels.push_back(it == rel.end() ? 0 : it->second);
  }
  return out;
}

double cohen_kappa(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) {
    throw LengthMismatchError("rater vectors differ in length: " + std::to_string(a.size()) +
                              " vs " + std::to_string(b.size()));
  }
  if (a.empty()) throw InvalidValueError("kappa needs at least one rating");
  const double n = static_cast<double>(a.size());
  std::map<int, double> ca;
  std::map<int, double> cb;
  double agree = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ca[a[i]] += 1.0;
    cb[b[i]] += 1.0;
    if (a[i] == b[i]) agree += 1.0;
  }
  const double po = agree / n;
  double pe = 0.0;
  for (const auto& [label, count] : ca) {
    auto it = cb.find(label);
    if (it != cb.end()) pe += (count / n) * (it->second / n);
  }
  if (pe == 1.0) return 1.0;
  return (po - pe) / (1.0 - pe);
}

namespace {

double t_pdf(double x, double v) {
  const double log_norm =
      std::lgamma((v + 1.0) / 2.0) - std::lgamma(v / 2.0) - 0.5 * std::log(v * std::numbers::pi);
  return std::exp(log_norm - (v + 1.0) / 2.0 * std::log1p(x * x / v));
}

double simpson(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <class F>
double adaptive_simpson(F f, double a, double b, double fa, double fm, double fb, double whole,
                        double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(a, m, fa, flm, fm);
  const double right = simpson(m, b, fm, frm, fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

// Integral of the t density over [0, x] for x >= 0. The substitution
// x = tan(theta) keeps the heavy tails on a finite interval.
double t_mass_from_zero(double x, double v) {
  if (x <= 0.0) return 0.0;
  auto g = [v](double theta) {
    const double c = std::cos(theta);
    return t_pdf(std::tan(theta), v) / (c * c);
  };
  const double b = std::atan(x);
  const double fa = g(0.0);
  const double fm = g(b / 2.0);
  const double fb = g(b);
  return adaptive_simpson(g, 0.0, b, fa, fm, fb, simpson(0.0, b, fa, fm, fb), 1e-13, 40);
}

}  // namespace

double student_t_cdf(double t, double df) {
  if (!(df > 0.0)) throw InvalidValueError("degrees of freedom must be positive");
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  const double half = t_mass_from_zero(std::fabs(t), df);
  return t >= 0 ? 0.5 + half : 0.5 - half;
}

TTestResult paired_t_test(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) {
    throw LengthMismatchError("samples differ in length: " + std::to_string(x.size()) + " vs " +
                              std::to_string(y.size()));
  }
  const std::size_t n = x.size();
  if (n < 2) throw DegenerateSampleError("paired t-test needs at least two pairs");
  std::vector<double> d(n);
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = x[i] - y[i];
    mean += d[i];
  }
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : d) ss += (v - mean) * (v - mean);
  const double var = ss / static_cast<double>(n - 1);
  if (!(var > 0.0)) throw DegenerateSampleError("differences have zero variance");
  TTestResult r;
  r.t = mean / std::sqrt(var / static_cast<double>(n));
  const double df = static_cast<double>(n - 1);
  r.p = std::clamp(1.0 - 2.0 * t_mass_from_zero(std::fabs(r.t), df), 0.0, 1.0);
  return r;
}

CompilabilityCounts& CompilabilityCounts::operator+=(const CompilabilityCounts& o) {
  total += o.total;
  raw_ok += o.raw_ok;
  after_ok += o.after_ok;
  prompts += o.prompts;
  prompts_with_one_plus += o.prompts_with_one_plus;
  return *this;
}

CompilabilityCounts count_compilability(const SuggestionInventory& before,
                                        const EligibleSet& after) {
  if (before.prompt.id != after.prompt.id) {
    throw AlignmentError("inventory for '" + before.prompt.id + "' paired with eligible set for '" +
                         after.prompt.id + "'");
  }
  CompilabilityCounts c;
  c.total = static_cast<long>(before.n());
  for (const auto& s : before.suggestions) {
    if (check_syntax(s.text, s.language).ok) ++c.raw_ok;
  }
  c.after_ok = static_cast<long>(after.x());
  c.prompts = 1;
  c.prompts_with_one_plus = after.x() >= 1 ? 1 : 0;
  return c;
}

CompilabilityStats compilability_stats(const CompilabilityCounts& c) {
  CompilabilityStats s;
  if (c.total > 0) {
    s.pct_before = 100.0 * static_cast<double>(c.raw_ok) / static_cast<double>(c.total);
    s.pct_after = 100.0 * static_cast<double>(c.after_ok) / static_cast<double>(c.total);
  }
  s.pct_increase = s.pct_after - s.pct_before;
  if (c.prompts > 0) {
    s.prompts_with_one_plus =
        100.0 * static_cast<double>(c.prompts_with_one_plus) / static_cast<double>(c.prompts);
  }
  return s;
}

CompilabilityStats compilability_stats(const std::vector<SuggestionInventory>& before,
                                       const std::vector<EligibleSet>& after) {
  if (before.size() != after.size()) {
    throw AlignmentError(std::to_string(before.size()) + " inventories vs " +
                         std::to_string(after.size()) + " eligible sets");
  }
  CompilabilityCounts total;
  for (std::size_t i = 0; i < before.size(); ++i) total += count_compilability(before[i], after[i]);
  return compilability_stats(total);
}

}  // namespace codesift
