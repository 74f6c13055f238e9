#include "varicart/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "varicart/delimited.hpp"

namespace varicart {

CommonFlags common_flags(const Dataset& dataset) {
  CommonFlags f;
  f.reserve(dataset.size());
  for (const auto& i : dataset.instances()) f[i.id] = i.is_common;
  return f;
}

std::vector<char> flags_in_rank_order(const RankedList& ranked, const CommonFlags& is_common) {
  std::vector<char> flags(ranked.size());
  for (std::size_t k = 0; k < ranked.size(); ++k) {
    auto it = is_common.find(ranked.id(k));
    if (it == is_common.end()) throw DataError("no common flag for ranked id '" + ranked.id(k) + "'");
    flags[k] = it->second;
  }
  return flags;
}

std::optional<double> average_precision(const std::vector<char>& flags) {
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t k = 0; k < flags.size(); ++k) {
    if (!flags[k]) continue;
    ++hits;
    sum += static_cast<double>(hits) / static_cast<double>(k + 1);
  }
  if (hits == 0) return std::nullopt;
  return 100.0 * sum / static_cast<double>(hits);
}

std::optional<double> average_precision(const RankedList& ranked, const CommonFlags& is_common) {
  return average_precision(flags_in_rank_order(ranked, is_common));
}

AtN precision_recall_at(const RankedList& ranked, const CommonFlags& is_common, std::size_t n) {
  if (n < 1 || n > ranked.size())
    throw ConfigError("N=" + std::to_string(n) + " is outside [1, " + std::to_string(ranked.size()) + "]");
  const auto flags = flags_in_rank_order(ranked, is_common);
  const auto total = static_cast<std::size_t>(std::count(flags.begin(), flags.end(), 1));
  if (total == 0) throw DataError("ranking holds no common instances");
  const auto top = static_cast<std::size_t>(std::count(flags.begin(), flags.begin() + static_cast<std::ptrdiff_t>(n), 1));
  return {n, 100.0 * static_cast<double>(top) / static_cast<double>(n),
          100.0 * static_cast<double>(top) / static_cast<double>(total)};
}

std::vector<AtN> pr_series(const std::vector<char>& flags, std::size_t start, std::size_t step) {
  if (start < 1 || step < 1) throw ConfigError("series start and step must be >= 1");
  if (start > flags.size())
    throw ConfigError("series start " + std::to_string(start) + " exceeds ranking size " + std::to_string(flags.size()));
  std::vector<std::size_t> prefix(flags.size() + 1, 0);
  for (std::size_t k = 0; k < flags.size(); ++k) prefix[k + 1] = prefix[k] + (flags[k] ? 1 : 0);
  const std::size_t total = prefix.back();
  if (total == 0) throw DataError("ranking holds no common instances");
  std::vector<AtN> out;
  auto push = [&](std::size_t n) {
    out.push_back({n, 100.0 * static_cast<double>(prefix[n]) / static_cast<double>(n),
                   100.0 * static_cast<double>(prefix[n]) / static_cast<double>(total)});
  };
  std::size_t n = start;
  for (; n < flags.size(); n += step) push(n);
  push(flags.size());
  return out;
}

std::vector<AtN> pr_series(const RankedList& ranked, const CommonFlags& is_common, std::size_t start,
                           std::size_t step) {
  return pr_series(flags_in_rank_order(ranked, is_common), start, step);
}

std::string MeanStd::formatted() const { return format_fixed2(mean) + " \xC2\xB1 " + format_fixed2(std); }

EvalReport evaluate(const RankedList& ranked, const CommonFlags& is_common, const std::string& scorer,
                    std::uint64_t seed) {
  const auto flags = flags_in_rank_order(ranked, is_common);
  auto ap = average_precision(flags);
  if (!ap) throw DataError("average precision is undefined: no common instances");
  EvalReport r;
  r.scorer = scorer;
  r.aps = *ap;
  r.at_n = pr_series(flags, std::min<std::size_t>(10, flags.size()), 10);
  r.seeds_used = {seed};
  return r;
}

std::vector<EvalReport> evaluate_all(const std::vector<RankingJob>& jobs, const CommonFlags& is_common) {
  std::vector<EvalReport> out(jobs.size());
  std::vector<std::string> errors(jobs.size());
  const auto n = static_cast<std::ptrdiff_t>(jobs.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto& job = jobs[static_cast<std::size_t>(i)];
    try {
      out[static_cast<std::size_t>(i)] = evaluate(*job.ranked, is_common, job.scorer, job.seed);
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(i)] = e.what();
    }
  }
  for (const auto& e : errors)
    if (!e.empty()) throw DataError(e);
  return out;
}

namespace {

MeanStd mean_std(const std::vector<double>& v) {
  MeanStd m;
  for (double x : v) m.mean += x;
  m.mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - m.mean) * (x - m.mean);
  m.std = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
  return m;
}

}  // namespace

EvalReport aggregate_over_seeds(const std::vector<EvalReport>& reports) {
  if (reports.size() < 2) throw ConfigError("aggregation needs at least two per-seed reports");
  const auto& first = reports.front();
  for (const auto& r : reports) {
    if (r.scorer != first.scorer) throw DataError("cannot aggregate reports of different scorers");
    if (r.at_n.size() != first.at_n.size()) throw DataError("per-seed reports use different N grids");
    for (std::size_t k = 0; k < r.at_n.size(); ++k)
      if (r.at_n[k].n != first.at_n[k].n) throw DataError("per-seed reports use different N grids");
  }
  EvalReport out;
  out.scorer = first.scorer;
  AggregatedMetrics agg;
  std::vector<double> v;
  for (const auto& r : reports) v.push_back(r.aps);
  agg.aps = mean_std(v);
  out.aps = agg.aps.mean;
  for (std::size_t k = 0; k < first.at_n.size(); ++k) {
    std::vector<double> p, rc;
    for (const auto& r : reports) {
      p.push_back(r.at_n[k].precision);
      rc.push_back(r.at_n[k].recall);
    }
    agg.precision.push_back(mean_std(p));
    agg.recall.push_back(mean_std(rc));
    out.at_n.push_back({first.at_n[k].n, agg.precision.back().mean, agg.recall.back().mean});
  }
  for (const auto& r : reports) out.seeds_used.insert(out.seeds_used.end(), r.seeds_used.begin(), r.seeds_used.end());
  out.aggregated = std::move(agg);
  return out;
}

namespace {

std::string seeds_text(const std::vector<std::uint64_t>& seeds) {
  std::string s;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (i) s.push_back(' ');
    s += std::to_string(seeds[i]);
  }
  return s;
}

}  // namespace

void write_report_csv(std::ostream& out, const std::vector<EvalReport>& reports) {
  write_row(out, {"scorer", "seeds", "n", "precision", "precision_std", "recall", "recall_std", "aps", "aps_std"}, ',');
  for (const auto& r : reports) {
    for (std::size_t k = 0; k < r.at_n.size(); ++k) {
      const auto& a = r.at_n[k];
      std::string ps, rs, as;
      if (r.aggregated) {
        ps = format_fixed2(r.aggregated->precision[k].std);
        rs = format_fixed2(r.aggregated->recall[k].std);
        as = format_fixed2(r.aggregated->aps.std);
      }
      write_row(out,
                {r.scorer, seeds_text(r.seeds_used), std::to_string(a.n), format_fixed2(a.precision), ps,
                 format_fixed2(a.recall), rs, format_fixed2(r.aps), as},
                ',');
    }
  }
}

void write_pr_series_csv(std::ostream& out, const EvalReport& report) {
  write_row(out, {"n", "precision", "recall"}, ',');
  for (const auto& a : report.at_n)
    write_row(out, {std::to_string(a.n), format_double(a.precision), format_double(a.recall)}, ',');
}

void write_report_table(std::ostream& out, const std::vector<EvalReport>& reports,
                        const std::vector<std::size_t>& cutoffs) {
  std::vector<std::string> header = {"Model", "APS"};
  for (auto n : cutoffs) {
    header.push_back("Prec-" + std::to_string(n));
    header.push_back("Recall-" + std::to_string(n));
  }
  std::vector<std::vector<std::string>> rows = {header};
  for (const auto& r : reports) {
    std::vector<std::string> row = {r.scorer, r.aggregated ? r.aggregated->aps.formatted() : format_fixed2(r.aps)};
    for (auto n : cutoffs) {
      auto it = std::find_if(r.at_n.begin(), r.at_n.end(), [n](const AtN& a) { return a.n == n; });
      if (it == r.at_n.end()) {
        row.push_back("-");
        row.push_back("-");
        continue;
      }
      const auto k = static_cast<std::size_t>(it - r.at_n.begin());
      if (r.aggregated) {
        row.push_back(r.aggregated->precision[k].formatted());
        row.push_back(r.aggregated->recall[k].formatted());
      } else {
        row.push_back(format_fixed2(it->precision));
        row.push_back(format_fixed2(it->recall));
      }
    }
    rows.push_back(std::move(row));
  }
  // Column widths in code points so "±" lines up.
  auto width = [](const std::string& s) {
    std::size_t w = 0;
    for (unsigned char c : s) w += (c & 0xC0) != 0x80;
    return w;
  };
  std::vector<std::size_t> widths(header.size(), 0);
  for (const auto& row : rows)
    for (std::size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], width(row[c]));
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << " | ";
      out << row[c] << std::string(widths[c] - width(row[c]), ' ');
    }
    out << '\n';
  }
}

}  // namespace varicart
