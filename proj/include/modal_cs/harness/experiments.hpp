#pragma once

// Experiment protocols and their serialized outputs.

#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "modal_cs/baselines.hpp"
#include "modal_cs/bounds.hpp"
#include "modal_cs/error.hpp"
#include "modal_cs/harness/config.hpp"
#include "modal_cs/harness/csv.hpp"
#include "modal_cs/harness/parallel.hpp"
#include "modal_cs/linalg.hpp"
#include "modal_cs/mdof.hpp"
#include "modal_cs/random.hpp"
#include "modal_cs/sampling.hpp"
#include "modal_cs/svd_estimator.hpp"

namespace modal_cs {

/// One plot: first column is x, the rest are curves (or marker columns).
struct Figure {
  std::string name;
  std::string title;
  std::string x_label;
  std::string y_label;
  Table data;
};

struct ResultTable {
  std::string experiment;
  Json config;
  Table summary;
  std::vector<Figure> figures;
};

/// Writes figures/<name>.csv for every non-empty figure and manifest.json
/// listing them with axes and legends, plus the resolved config.
inline void emit_plot_data(const ResultTable& table, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir / "figures", ec);
  if (ec) throw Error(ErrorKind::kIoError, "cannot create '" + (dir / "figures").string() + "': " + ec.message());
  Json figs = Json::array();
  for (const auto& f : table.figures) {
    if (f.data.empty()) continue;
    const std::string file = "figures/" + f.name + ".csv";
    write_text_file((dir / file).string(), f.data.to_string());
    Json curves = Json::array();
    for (std::size_t i = 1; i < f.data.columns().size(); ++i) curves.push_back(f.data.columns()[i]);
    figs.push_back({{"name", f.name},
                    {"file", file},
                    {"title", f.title},
                    {"x", {{"column", f.data.columns().front()}, {"label", f.x_label}}},
                    {"y", {{"label", f.y_label}}},
                    {"curves", curves}});
  }
  const Json manifest = {{"experiment", table.experiment},
                         {"summary", "results.csv"},
                         {"config", table.config},
                         {"figures", figs}};
  write_text_file((dir / "manifest.json").string(), manifest.dump(2) + "\n");
}

inline void write_results(const ResultTable& table, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::kIoError, "cannot create '" + dir.string() + "': " + ec.message());
  write_text_file((dir / "results.csv").string(), table.summary.to_string());
  emit_plot_data(table, dir);
}

namespace detail {

struct RunOutcome {
  RealVector errors;  ///< list order
  RealVector bounds;  ///< list order, at eps = gram deviation
  double gram = 0.0;
};

inline std::vector<double> magnitudes(const ModalBasis& b) {
  std::vector<double> m;
  for (Index i = 0; i < b.size(); ++i) m.push_back(std::abs(b.amplitudes()(i)));
  return m;
}

template <typename V>
RealVector to_list_order(const V& basis_ordered, const std::vector<Index>& order) {
  RealVector out(basis_ordered.size());
  for (std::size_t j = 0; j < order.size(); ++j) out(order[j]) = basis_ordered(static_cast<Index>(j));
  return out;
}

inline RealVector error_bounds(const ModalBasis& truth, double eps) {
  const auto mags = magnitudes(truth);
  RealVector b(truth.size());
  for (Index n = 0; n < truth.size(); ++n) {
    if (eps == 0.0) {
      b(n) = 0.0;
    } else if (eps < 1.0) {
      b(n) = mode_error_bound(mags, eps, n);
    } else {
      b(n) = std::numbers::sqrt2;
    }
  }
  return b;
}

inline RunOutcome run_schedule(const OrderedBasis& truth, const SampleSchedule& schedule) {
  const ModalBasis& b = truth.basis;
  RunOutcome out;
  const auto est = estimate_modes(build_data_matrix(b, schedule));
  out.errors = to_list_order(align_and_error(est, b), truth.order);
  out.gram = gram_deviation(build_steering(b.frequencies(), schedule));
  out.bounds = to_list_order(error_bounds(b, out.gram), truth.order);
  return out;
}

inline RunOutcome mean_outcome(const std::vector<RunOutcome>& runs, double* mean_max) {
  RunOutcome m;
  m.errors = RealVector::Zero(runs.front().errors.size());
  m.bounds = RealVector::Zero(runs.front().bounds.size());
  double mx = 0.0;
  for (const auto& r : runs) {
    m.errors += r.errors;
    m.bounds += r.bounds;
    m.gram += r.gram;
    mx += r.errors.maxCoeff();
  }
  const auto k = static_cast<double>(runs.size());
  m.errors /= k;
  m.bounds /= k;
  m.gram /= k;
  if (mean_max) *mean_max = mx / k;
  return m;
}

inline std::vector<std::string> numbered(const std::string& prefix, Index n) {
  std::vector<std::string> v;
  for (Index i = 1; i <= n; ++i) v.push_back(prefix + std::to_string(i));
  return v;
}

inline std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

inline void append(std::vector<Cell>& row, const RealVector& v) {
  for (Index i = 0; i < v.size(); ++i) row.emplace_back(v(i));
}

inline JlKind jl_kind(const std::string& s) {
  return s == "bernoulli" ? JlKind::kBernoulli : JlKind::kGaussian;
}

inline ResultTable run_tmax_sweep(const Json& cfg) {
  ConfigView v(cfg);
  const auto truth = build_truth(cfg);
  const Index n = truth.basis.size();
  const double ts = v.positive("/sampling_interval");
  const double t_end = v.non_negative("/t_max_end");
  const Index trials = v.integer("/trials", 1);
  const std::uint64_t seed = v.seed("/seed");
  // Grid points t_max = k T_s hold k + 1 samples. The sweep starts at the
  // first point with at least as many samples as modes.
  const Index first = std::max<Index>(1, n - 1);
  const Index last = t_end >= ts ? uniform_sample_count(t_end, ts) - 1 : 0;
  const Index points = std::max<Index>(0, last - first + 1);

  const auto per_point = static_cast<std::size_t>(trials + 1);
  std::vector<RunOutcome> slots(static_cast<std::size_t>(points) * per_point);
  parallel_for(slots.size(), [&](std::size_t i) {
    const auto p = static_cast<Index>(i / per_point);
    const auto j = static_cast<Index>(i % per_point);
    const Index samples = first + p + 1;
    const auto uni = uniform_schedule(ts, samples);
    if (j == 0) {
      slots[i] = run_schedule(truth, uni);
    } else {
      const auto s = random_schedule(uni.t_max(), samples,
                                     derive_seed(derive_seed(seed, static_cast<std::uint64_t>(p)),
                                                 static_cast<std::uint64_t>(j - 1)));
      slots[i] = run_schedule(truth, s);
    }
  });

  ResultTable rt;
  rt.config = cfg;
  rt.summary = Table(concat(concat(concat({"scheme", "t_max", "samples", "trials"}, numbered("err_", n)),
                                   {"max_err", "gram_deviation"}),
                            numbered("bound_", n)));
  std::vector<Table> mode_figs(static_cast<std::size_t>(n), Table({"t_max", "err_uniform", "err_random"}));
  for (Index p = 0; p < points; ++p) {
    const Index samples = first + p + 1;
    const double t_max = uniform_schedule(ts, samples).t_max();
    const auto base = static_cast<std::size_t>(p) * per_point;
    const RunOutcome& u = slots[base];
    std::vector<RunOutcome> rnd(slots.begin() + static_cast<std::ptrdiff_t>(base + 1),
                                slots.begin() + static_cast<std::ptrdiff_t>(base + per_point));
    double rnd_max = 0.0;
    const RunOutcome r = mean_outcome(rnd, &rnd_max);

    std::vector<Cell> row = {std::string("uniform"), t_max, static_cast<long long>(samples), 1LL};
    append(row, u.errors);
    row.emplace_back(u.errors.maxCoeff());
    row.emplace_back(u.gram);
    append(row, u.bounds);
    rt.summary.add_row(row);

    row = {std::string("random"), t_max, static_cast<long long>(samples), static_cast<long long>(trials)};
    append(row, r.errors);
    row.emplace_back(rnd_max);
    row.emplace_back(r.gram);
    append(row, r.bounds);
    rt.summary.add_row(row);

    for (Index k = 0; k < n; ++k) {
      mode_figs[static_cast<std::size_t>(k)].add_row({t_max, u.errors(k), r.errors(k)});
    }
  }
  for (Index k = 0; k < n; ++k) {
    rt.figures.push_back({"mode_" + std::to_string(k + 1),
                          "Mode " + std::to_string(k + 1) + " error vs. t_max", "t_max (s)",
                          "aligned l2 error", mode_figs[static_cast<std::size_t>(k)]});
  }
  return rt;
}

inline ResultTable run_sample_sweep(const Json& cfg) {
  ConfigView v(cfg);
  const auto truth = build_truth(cfg);
  const Index n = truth.basis.size();
  const double ts = v.positive("/sampling_interval");
  const double offset = v.non_negative("/random_offset");
  const Index trials = v.integer("/trials", 1);
  const std::uint64_t seed = v.seed("/seed");
  std::vector<Index> counts;
  for (std::size_t i = 0; i < cfg["sample_counts"].size(); ++i) {
    counts.push_back(v.integer("/sample_counts/" + std::to_string(i), 2));
  }

  const auto per_point = static_cast<std::size_t>(2 * trials + 1);
  std::vector<RunOutcome> slots(counts.size() * per_point);
  parallel_for(slots.size(), [&](std::size_t i) {
    const std::size_t p = i / per_point;
    const auto j = static_cast<Index>(i % per_point);
    const Index samples = counts[p];
    const auto uni = uniform_schedule(ts, samples);
    if (j == 0) {
      slots[i] = run_schedule(truth, uni);
      return;
    }
    const bool extended = j > trials;
    const Index trial = extended ? j - 1 - trials : j - 1;
    const std::uint64_t s = derive_seed(derive_seed(derive_seed(seed, p), extended ? 1 : 0),
                                        static_cast<std::uint64_t>(trial));
    slots[i] = run_schedule(truth, random_schedule(uni.t_max() + (extended ? offset : 0.0), samples, s));
  });

  ResultTable rt;
  rt.config = cfg;
  rt.summary = Table(concat(concat({"scheme", "samples", "t_max", "trials"}, numbered("err_", n)),
                            {"max_err", "gram_deviation"}));
  Table max_fig({"samples", "uniform", "random_matched", "random_extended"});
  std::vector<Table> mode_figs(static_cast<std::size_t>(n),
                               Table({"samples", "uniform", "random_matched", "random_extended"}));
  for (std::size_t p = 0; p < counts.size(); ++p) {
    const Index samples = counts[p];
    const double t_u = uniform_schedule(ts, samples).t_max();
    const auto base = p * per_point;
    const RunOutcome& u = slots[base];
    auto first = slots.begin() + static_cast<std::ptrdiff_t>(base + 1);
    std::vector<RunOutcome> matched(first, first + trials);
    std::vector<RunOutcome> ext(first + trials, first + 2 * trials);
    double m_max = 0.0;
    double e_max = 0.0;
    const RunOutcome rm = mean_outcome(matched, &m_max);
    const RunOutcome re = mean_outcome(ext, &e_max);

    auto add = [&](const char* scheme, double t, long long k, const RunOutcome& o, double mx) {
      std::vector<Cell> row = {std::string(scheme), static_cast<long long>(samples), t, k};
      append(row, o.errors);
      row.emplace_back(mx);
      row.emplace_back(o.gram);
      rt.summary.add_row(row);
    };
    add("uniform", t_u, 1, u, u.errors.maxCoeff());
    add("random_matched", t_u, trials, rm, m_max);
    add("random_extended", t_u + offset, trials, re, e_max);
    max_fig.add_row({static_cast<long long>(samples), u.errors.maxCoeff(), m_max, e_max});
    for (Index k = 0; k < n; ++k) {
      mode_figs[static_cast<std::size_t>(k)].add_row(
          {static_cast<long long>(samples), u.errors(k), rm.errors(k), re.errors(k)});
    }
  }
  rt.figures.push_back({"max_error", "Maximum mode error vs. sample count", "M", "aligned l2 error", max_fig});
  for (Index k = 0; k < n; ++k) {
    rt.figures.push_back({"mode_" + std::to_string(k + 1),
                          "Mode " + std::to_string(k + 1) + " error vs. sample count", "M",
                          "aligned l2 error", mode_figs[static_cast<std::size_t>(k)]});
  }
  return rt;
}

inline ResultTable run_compression(const Json& cfg) {
  ConfigView v(cfg);
  const auto truth = build_truth(cfg);
  const ModalBasis& b = truth.basis;
  const Index n = b.size();
  const double coarse = v.positive("/sub_nyquist_interval");
  const double fine = v.positive("/fine_interval");
  const double t_max = v.positive("/t_max");
  const Index mc = v.integer("/compressed_dim", 1);
  const Index trials = v.integer("/trials", 1);
  const std::uint64_t seed = v.seed("/seed");
  const JlKind kind = jl_kind(v.string("/jl_kind"));

  const auto coarse_s = uniform_schedule(coarse, uniform_sample_count(t_max, coarse));
  const auto fine_s = uniform_schedule(fine, uniform_sample_count(t_max, fine));
  if (mc > fine_s.size()) config_error("/compressed_dim", "exceeds the fine-grid sample count");
  if (n > coarse_s.size() || n > mc) config_error("/t_max", "too few samples for the number of modes");

  const RunOutcome u = run_schedule(truth, coarse_s);
  const DataMatrix v_fine = build_data_matrix(b, fine_s);
  const double fine_gram = gram_deviation(build_steering(b.frequencies(), fine_s));

  std::vector<RealVector> comp(static_cast<std::size_t>(trials));
  parallel_for(comp.size(), [&](std::size_t j) {
    const auto phi = draw_jl_matrix(fine_s.size(), mc, kind, derive_seed(seed, j));
    const auto est = estimate_modes(compress(v_fine, phi));
    comp[j] = to_list_order(align_and_error(est, b), truth.order);
  });

  ResultTable rt;
  rt.config = cfg;
  rt.summary = Table(concat(concat({"scheme", "trial", "sampling_interval", "samples", "columns"},
                                   numbered("err_", n)),
                            {"max_err", "gram_deviation"}));
  std::vector<Cell> row = {std::string("uniform_sub_nyquist"), std::string(), coarse,
                           static_cast<long long>(coarse_s.size()),
                           static_cast<long long>(coarse_s.size())};
  append(row, u.errors);
  row.emplace_back(u.errors.maxCoeff());
  row.emplace_back(u.gram);
  rt.summary.add_row(row);

  RealVector mean = RealVector::Zero(n);
  double mean_max = 0.0;
  for (Index j = 0; j < trials; ++j) {
    const RealVector& e = comp[static_cast<std::size_t>(j)];
    row = {std::string("compressed"), static_cast<long long>(j), fine,
           static_cast<long long>(fine_s.size()), static_cast<long long>(mc)};
    append(row, e);
    row.emplace_back(e.maxCoeff());
    row.emplace_back(fine_gram);
    rt.summary.add_row(row);
    mean += e;
    mean_max += e.maxCoeff();
  }
  mean /= static_cast<double>(trials);
  mean_max /= static_cast<double>(trials);
  row = {std::string("compressed_mean"), std::string(), fine, static_cast<long long>(fine_s.size()),
         static_cast<long long>(mc)};
  append(row, mean);
  row.emplace_back(mean_max);
  row.emplace_back(fine_gram);
  rt.summary.add_row(row);

  Table fig({"mode", "uniform_sub_nyquist", "compressed_mean"});
  for (Index k = 0; k < n; ++k) fig.add_row({static_cast<long long>(k + 1), u.errors(k), mean(k)});
  rt.figures.push_back({"errors_by_mode", "Sub-Nyquist uniform vs. compressed", "mode",
                        "aligned l2 error", fig});
  return rt;
}

inline ResultTable run_frequency(const Json& cfg) {
  ConfigView v(cfg);
  const auto truth = build_truth(cfg);
  const ModalBasis& b = truth.basis;
  const Index n = b.size();
  const double ts = v.positive("/sampling_interval");
  const double t_max = v.positive("/t_max");
  const Index pad = v.integer("/zero_pad", 1);
  const auto sched = uniform_schedule(ts, uniform_sample_count(t_max, ts));
  if (n > sched.size()) config_error("/t_max", "too few samples for the number of modes");

  const auto est = estimate_modes(build_data_matrix(b, sched));
  const auto spectra = row_spectra(est, ts, pad);
  const auto rank = amplitude_rank_order(b);
  const RealVector shape_err = to_list_order(align_and_error(est, b), truth.order);
  const double tol = 2.0 * std::numbers::pi / sched.t_max();

  // est row j belongs to basis mode rank[j], which is list mode order[rank[j]].
  std::vector<Index> row_of_list(static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j) {
    row_of_list[static_cast<std::size_t>(truth.order[static_cast<std::size_t>(rank[static_cast<std::size_t>(j)])])] = j;
  }

  ResultTable rt;
  rt.config = cfg;
  rt.summary = Table({"mode", "true_frequency", "estimated_frequency", "true_over_pi", "estimated_over_pi",
                      "abs_error", "tolerance", "within_tolerance", "singular_value", "shape_error"});
  const double pi = std::numbers::pi;
  for (Index k = 0; k < n; ++k) {
    const Index j = row_of_list[static_cast<std::size_t>(k)];
    const Index bmode = rank[static_cast<std::size_t>(j)];
    const double f = b.frequencies()(bmode);
    const double fh = spectra.peak_frequencies(j);
    rt.summary.add_row({static_cast<long long>(k + 1), f, fh, f / pi, fh / pi, std::abs(fh - f), tol,
                        static_cast<long long>(std::abs(fh - f) <= tol), est.singular_values(j),
                        shape_err(k)});
    Table fig({"frequency", "magnitude", "peak"});
    const RealVector& mag = spectra.magnitudes[static_cast<std::size_t>(j)];
    for (Index q = 0; q < mag.size(); ++q) {
      fig.add_row({spectra.grid(q), mag(q), static_cast<long long>(q == spectra.peak_bins[static_cast<std::size_t>(j)])});
    }
    rt.figures.push_back({"spectrum_mode_" + std::to_string(k + 1),
                          "FFT magnitude of right singular vector, mode " + std::to_string(k + 1),
                          "frequency (rad/s)", "|FFT|", std::move(fig)});
  }
  return rt;
}

/// Synthetic stand-in for a multi-sensor field record: a fixed-free chain
/// with a few strongly excited low modes, weak background modes, and white
/// measurement noise. Returns the sensor matrix and the dominant mode shapes.
struct SyntheticRecord {
  RealMatrix samples;
  RealMatrix dominant_shapes;
  RealVector dominant_frequencies;
};

inline SyntheticRecord synthesize_record(const Json& cfg) {
  ConfigView v(cfg);
  const Index dof = v.integer("/synthetic/dof", 2);
  const Index m = v.integer("/synthetic/samples", 2);
  const double ts = v.positive("/sampling_interval");
  const auto dom = v.numbers("/synthetic/dominant_amplitudes");
  const double bg = v.non_negative("/synthetic/background_amplitude");
  const double noise = v.non_negative("/synthetic/noise_std");
  const std::uint64_t seed = v.seed("/seed");
  if (static_cast<Index>(dom.size()) > dof) {
    config_error("/synthetic/dominant_amplitudes", "more dominant modes than DOFs");
  }

  const ModalBasis modes = solve_modes(MdofSystem::unit_mass(chain_stiffness(dof, v.positive("/synthetic/spring"))));
  if (modes.frequencies()(0) >= std::numbers::pi / ts) {
    config_error("/sampling_interval", "highest synthetic mode is above the Nyquist frequency");
  }
  CounterRng rng(derive_seed(seed, 1));
  ComplexVector amps(dof);
  const auto nd = static_cast<Index>(dom.size());
  SyntheticRecord rec;
  rec.dominant_shapes.resize(dof, nd);
  rec.dominant_frequencies.resize(nd);
  for (Index i = 0; i < dof; ++i) {
    const Index from_low = dof - 1 - i;  // 0 = lowest frequency
    const double mag = from_low < nd ? dom[static_cast<std::size_t>(from_low)] : bg;
    amps(i) = std::polar(mag / 2.0, 2.0 * std::numbers::pi * rng.uniform01());
    if (from_low < nd) {
      rec.dominant_shapes.col(from_low) = modes.mode_shapes().col(i);
      rec.dominant_frequencies(from_low) = modes.frequencies()(i);
    }
  }
  const ModalBasis excited = modes.with_amplitudes(amps);
  CounterRng noise_rng(derive_seed(seed, 2));
  rec.samples.resize(dof, m);
  for (Index j = 0; j < m; ++j) {
    rec.samples.col(j) = evaluate_displacement(excited, static_cast<double>(j) * ts);
    for (Index i = 0; i < dof; ++i) rec.samples(i, j) += noise * noise_rng.normal();
  }
  return rec;
}

inline RealVector matched_errors(const ComplexMatrix& candidates, const ComplexMatrix& refs) {
  const auto match = match_by_correlation(candidates, refs);
  RealVector e(refs.cols());
  for (Index j = 0; j < refs.cols(); ++j) {
    e(j) = aligned_error(refs.col(j), candidates.col(match[static_cast<std::size_t>(j)]));
  }
  return e;
}

inline ResultTable run_realdata(const Json& cfg, bool header_flag) {
  ConfigView v(cfg);
  const double ts = v.positive("/sampling_interval");
  const Index mc = v.integer("/compressed_dim", 1);
  const Index nb = v.integer("/benchmark_modes", 1);
  const std::uint64_t seed = v.seed("/seed");
  const JlKind kind = jl_kind(v.string("/jl_kind"));
  WelchOptions welch;
  welch.segment_len = v.integer("/welch/segment_len", 0);
  welch.overlap = v.number("/welch/overlap");
  welch.window = v.string("/welch/window") == "rectangular" ? Window::kRectangular : Window::kHann;
  SparseOptions sparse;
  sparse.max_iter = v.integer("/sparse/max_iter", 1);
  sparse.tol = v.positive("/sparse/tol");

  RealMatrix u;
  std::optional<SyntheticRecord> rec;
  if (v.has("/data_csv")) {
    u = load_sensor_csv(v.string("/data_csv"), header_flag || v.boolean("/header"));
  } else {
    rec = synthesize_record(cfg);
    u = rec->samples;
  }
  const Index n = u.rows();
  const Index m = u.cols();
  if (nb > n) config_error("/benchmark_modes", "more benchmark modes than sensors");
  if (mc > m) config_error("/compressed_dim", "exceeds the sample count");
  if (n > mc) config_error("/compressed_dim", "must be at least the sensor count");

  const auto bench_csd = welch_csd(u, welch, ts);
  const auto bench = fdd_peaks(bench_csd, nb);

  const auto phi = draw_jl_matrix(m, mc, kind, derive_seed(seed, 0));
  const RealMatrix y = u * phi.entries();
  Eigen::JacobiSVD<RealMatrix> svd(y, Eigen::ComputeThinU);
  const Index cand = std::min<Index>(2 * nb, n);
  ComplexMatrix svd_shapes = svd.matrixU().leftCols(cand).cast<Complex>();
  const RealVector svd_err = matched_errors(svd_shapes, bench.mode_shapes);

  // CS+FDD: reconstruct every sensor from its compressed row, then FDD.
  RealMatrix recon(n, m);
  std::vector<char> converged(static_cast<std::size_t>(n), 0);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t r) {
    const ComplexVector yr = y.row(static_cast<Index>(r)).transpose().cast<Complex>();
    const auto res = sparse_reconstruct(yr, phi, sparse);
    recon.row(static_cast<Index>(r)) = res.signal.real().transpose();
    converged[r] = res.converged ? 1 : 0;
  });
  double conv_frac = 0.0;
  for (char c : converged) conv_frac += c;
  conv_frac /= static_cast<double>(n);
  const auto cs_csd = welch_csd(recon, welch, ts);
  RealVector cs_err = RealVector::Constant(nb, std::numbers::sqrt2);
  RealVector cs_freq = RealVector::Constant(nb, std::numeric_limits<double>::quiet_NaN());
  FddResult cs;
  bool cs_ok = true;
  try {
    cs = fdd_peaks(cs_csd, nb);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kInsufficientPeaks) throw;
    cs_ok = false;
  }
  if (cs_ok) {
    const auto match = match_by_correlation(cs.mode_shapes, bench.mode_shapes);
    for (Index j = 0; j < nb; ++j) {
      const Index c = match[static_cast<std::size_t>(j)];
      cs_err(j) = aligned_error(bench.mode_shapes.col(j), cs.mode_shapes.col(c));
      cs_freq(j) = cs.frequencies(c);
    }
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  RealVector bench_truth = RealVector::Constant(nb, nan);
  RealVector svd_truth = RealVector::Constant(nb, nan);
  RealVector cs_truth = RealVector::Constant(nb, nan);
  if (rec) {
    // Truth errors for each benchmark mode, via the truth shape it matches.
    const ComplexMatrix truth = rec->dominant_shapes.cast<Complex>();
    if (truth.cols() >= nb) {
      const auto tm = match_by_correlation(truth, bench.mode_shapes);
      for (Index j = 0; j < nb; ++j) {
        const ComplexVector t = truth.col(tm[static_cast<std::size_t>(j)]);
        bench_truth(j) = aligned_error(t, bench.mode_shapes.col(j));
        ComplexMatrix one = t;
        svd_truth(j) = matched_errors(svd_shapes, one)(0);
        if (cs_ok) cs_truth(j) = matched_errors(cs.mode_shapes, one)(0);
      }
    }
  }

  ResultTable rt;
  rt.config = cfg;
  rt.summary = Table({"method", "mode", "frequency", "err_vs_benchmark", "err_vs_truth", "converged_fraction"});
  for (Index j = 0; j < nb; ++j) {
    rt.summary.add_row({std::string("fdd_benchmark"), static_cast<long long>(j + 1), bench.frequencies(j), 0.0,
                        bench_truth(j), nan});
  }
  for (Index j = 0; j < nb; ++j) {
    rt.summary.add_row({std::string("svd_compressed"), static_cast<long long>(j + 1), nan, svd_err(j),
                        svd_truth(j), nan});
  }
  for (Index j = 0; j < nb; ++j) {
    rt.summary.add_row({std::string("cs_fdd"), static_cast<long long>(j + 1), cs_freq(j), cs_err(j),
                        cs_truth(j), conv_frac});
  }

  Table spec({"frequency", "benchmark_s1", "cs_fdd_s1"});
  const auto cs_first = cs_ok ? cs.first_singular : csd_first_singular(cs_csd);
  for (Index k = 0; k < bench_csd.bins(); ++k) {
    spec.add_row({bench_csd.frequencies(k), bench.first_singular(k), cs_first(k)});
  }
  rt.figures.push_back({"first_singular_value", "First singular value of the CSD", "frequency (rad/s)",
                        "s1", std::move(spec)});
  Table errs({"mode", "svd_compressed", "cs_fdd"});
  for (Index j = 0; j < nb; ++j) errs.add_row({static_cast<long long>(j + 1), svd_err(j), cs_err(j)});
  rt.figures.push_back({"mode_errors", "Error against the FDD benchmark", "benchmark mode",
                        "aligned l2 error", std::move(errs)});
  return rt;
}

}  // namespace detail

/// Runs experiment `cfg["experiment"]` on a config produced by resolve_config.
inline ResultTable run_experiment(const Json& cfg, bool header_flag = false) {
  const std::string id = cfg.at("experiment").get<std::string>();
  ResultTable rt;
  if (id == "exp1" || id == "exp2") {
    rt = detail::run_tmax_sweep(cfg);
  } else if (id == "exp3") {
    rt = detail::run_sample_sweep(cfg);
  } else if (id == "exp4") {
    rt = detail::run_compression(cfg);
  } else if (id == "exp5") {
    rt = detail::run_frequency(cfg);
  } else if (id == "realdata") {
    rt = detail::run_realdata(cfg, header_flag);
  } else {
    config_error("/experiment", "unknown experiment '" + id + "'");
  }
  rt.experiment = id;
  return rt;
}

}  // namespace modal_cs
