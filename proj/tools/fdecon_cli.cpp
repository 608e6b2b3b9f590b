// fdecon: command-line front end over the C API.
//
//   fdecon deconvolve --input y.fdg --kernel g.fdg --out fhat.fdg
//   fdecon simulate   --M 128 --sigma 1 --f1 bumps --f2 blip --out y.fdg
//   fdecon table1     --runs 25 --seed 7 --out table1.csv
//   fdecon rates      --s1 2 --s2 1 --nu 1 --p 2
//   fdecon compare    --s1 10 --s2 0.6 --nu 0 --M 4 --N 65536
//   fdecon nu-estimate --kernel g.fdg
//   fdecon replay     run.manifest
//
// Exit codes: 0 success, 1 usage error, 2 data or numerical error.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fdecon/fdecon.h"

namespace {

struct Failure {
  int exit_code;
  std::string message;
};

void check(fdecon_status s) {
  if (s == FDECON_OK) return;
  const int code = (s == FDECON_E_CONFIG || s == FDECON_E_ARGUMENT) ? 1 : 2;
  throw Failure{code, std::string(fdecon_status_name(s)) + ": " + fdecon_last_error()};
}

[[noreturn]] void usage(const std::string& msg) { throw Failure{1, msg}; }

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using GridPtr = std::unique_ptr<fdecon_grid, Deleter<fdecon_grid, fdecon_grid_free>>;
using KernelPtr = std::unique_ptr<fdecon_kernel, Deleter<fdecon_kernel, fdecon_kernel_free>>;
using ResultPtr = std::unique_ptr<fdecon_result, Deleter<fdecon_result, fdecon_result_free>>;
using TablePtr = std::unique_ptr<fdecon_table, Deleter<fdecon_table, fdecon_table_free>>;

std::string text(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}
std::string text(const std::string& s) { return s; }
template <class T>
std::string text(const T& v) {
  if constexpr (std::is_arithmetic_v<T>) {
    return std::to_string(v);
  } else {
    std::string out;
    for (const auto& x : v) out += (out.empty() ? "" : " ") + text(x);
    return out;
  }
}

// Options of one subcommand, remembered so the manifest can echo every
// resolved value, defaults included.
class Flags {
 public:
  explicit Flags(CLI::App* app) : app_(app) {}

  template <class T>
  CLI::Option* add(const std::string& name, T& var, const std::string& help) {
    items_.emplace_back(name, [&var] { return text(var); });
    auto* opt = app_->add_option("--" + name, var, help)->capture_default_str();
    if (opt->get_default_str().empty() || opt->get_default_str() == "{}") opt->default_str("none");
    return opt;
  }

  std::vector<std::pair<std::string, std::string>> values() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& [k, f] : items_) out.emplace_back(k, f());
    return out;
  }

  CLI::App* app() const { return app_; }

 private:
  CLI::App* app_;
  std::vector<std::pair<std::string, std::function<std::string()>>> items_;
};

class Manifest {
 public:
  Manifest(std::string command, const Flags& flags) : command_(std::move(command)), options_(flags.values()) {}

  void derived(const std::string& key, const std::string& value) { derived_.emplace_back(key, value); }
  void derived(const std::string& key, double value) { derived(key, text(value)); }

  void write(const std::string& path) const {
    std::ofstream os(path);
    os << "command=" << command_ << '\n';
    for (const auto& [k, v] : options_) os << k << '=' << v << '\n';
    os << "resolved.version=" << fdecon_version() << '\n';
    for (const auto& [k, v] : derived_) os << "resolved." << k << '=' << v << '\n';
    if (!os) throw Failure{2, "cannot write manifest " + path};
  }

 private:
  std::string command_;
  std::vector<std::pair<std::string, std::string>> options_;
  std::vector<std::pair<std::string, std::string>> derived_;
};

int parse_mode(const std::string& s) {
  if (s == "functional") return FDECON_FUNCTIONAL;
  if (s == "separate") return FDECON_SEPARATE;
  usage("--mode must be functional or separate, got '" + s + "'");
}

int parse_exemption(const std::string& s) {
  if (s == "joint") return FDECON_EXEMPT_JOINT;
  if (s == "time") return FDECON_EXEMPT_TIME;
  usage("--exemption must be joint or time, got '" + s + "'");
}

double auto_or_double(const std::string& s, const std::string& flag) {
  if (s == "auto") return NAN;
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  usage("--" + flag + " expects a number or 'auto', got '" + s + "'");
}

int auto_or_int(const std::string& s, const std::string& flag) {
  if (s == "auto") return -1;
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used == s.size() && v >= 0) return v;
  } catch (const std::exception&) {
  }
  usage("--" + flag + " expects a non-negative integer or 'auto', got '" + s + "'");
}

int parse_function(const std::string& s) {
  int f = 0;
  check(fdecon_function_parse(s.c_str(), &f));
  return f;
}

// Estimator flags shared by deconvolve, simulate and table1.
struct EstimatorFlags {
  std::string mode = "functional";
  std::string exemption = "joint";
  std::string nu = "auto";
  int nu_lo = 0, nu_hi = 0;
  std::string cbeta = "auto";
  int m0 = 3, m0_prime = 3;
  std::string finest = "auto", finest_prime = "auto";

  void add(Flags& f, bool with_mode) {
    if (with_mode) f.add("mode", mode, "functional (joint hyperbolic estimator) or separate (one estimator per profile)");
    f.add("exemption", exemption, "coefficients exempt from thresholding: joint (scaling in t and u) or time");
    f.add("nu", nu, "degree of ill-posedness, or auto to fit it on the kernel spectrum");
    f.add("nu-lo", nu_lo, "lowest frequency of the nu fit (0: N/16)");
    f.add("nu-hi", nu_hi, "highest frequency of the nu fit (0: N/4)");
    f.add("cbeta", cbeta, "threshold constant C_beta, or auto for 4 (2 pi/3)^nu / sqrt(c1)");
    f.add("m0", m0, "coarsest Meyer level along t");
    f.add("m0-prime", m0_prime, "coarsest Daubechies level along u");
    f.add("J", finest, "finest t resolution J, or auto from the noise level");
    f.add("Jprime", finest_prime, "finest u resolution J', or auto from the noise level");
  }

  fdecon_options options() const {
    fdecon_options o;
    fdecon_options_default(&o);
    o.mode = parse_mode(mode);
    o.exemption = parse_exemption(exemption);
    o.nu = auto_or_double(nu, "nu");
    o.nu_lo = nu_lo;
    o.nu_hi = nu_hi;
    o.c_beta = auto_or_double(cbeta, "cbeta");
    o.m0 = m0;
    o.m0_prime = m0_prime;
    o.finest = auto_or_int(finest, "J");
    o.finest_prime = auto_or_int(finest_prime, "Jprime");
    return o;
  }
};

std::string or_default(const std::string& given, const std::string& fallback) { return given.empty() ? fallback : given; }

// ---- deconvolve -----------------------------------------------------------

struct DeconvolveCmd {
  std::string input, kernel, out, coeffs, manifest;
  std::string sigma = "auto";
  EstimatorFlags est;

  void attach(Flags& f) {
    f.add("input", input, "observations y(u_l, t_i) (FDG1 or CSV)")->required();
    f.add("kernel", kernel, "kernel samples g(u_l, t_i) on the same grid (FDG1 or CSV)")->required();
    f.add("out", out, "reconstruction f-hat; .csv selects CSV, anything else FDG1")->required();
    f.add("coeffs", coeffs, "coefficient dump (default: OUT.coeffs.csv)");
    f.add("manifest", manifest, "manifest path (default: OUT.manifest)");
    f.add("sigma", sigma, "noise level, or auto to use the value stored in the input file");
    est.add(f, true);
  }

  void run(const Flags& f) {
    fdecon_grid* raw = nullptr;
    check(fdecon_grid_read(input.c_str(), &raw));
    GridPtr data(raw);
    if (const double s = auto_or_double(sigma, "sigma"); !std::isnan(s)) check(fdecon_grid_set_sigma(data.get(), s));
    check(fdecon_grid_read(kernel.c_str(), &raw));
    GridPtr kgrid(raw);
    fdecon_kernel* kraw = nullptr;
    check(fdecon_kernel_from_grid(kgrid.get(), &kraw));
    KernelPtr k(kraw);

    const fdecon_options opts = est.options();
    fdecon_result* rraw = nullptr;
    check(fdecon_deconvolve(data.get(), k.get(), &opts, &rraw));
    ResultPtr res(rraw);
    check(fdecon_grid_write(fdecon_result_estimate(res.get()), out.c_str()));
    const std::string coeff_path = or_default(coeffs, out + ".coeffs.csv");
    check(fdecon_result_write_coeffs(res.get(), coeff_path.c_str()));

    fdecon_resolved info;
    check(fdecon_result_info(res.get(), &info));
    Manifest m("deconvolve", f);
    m.derived("sigma", fdecon_grid_sigma(data.get()));
    m.derived("nu", info.nu);
    m.derived("c1", info.c1);
    m.derived("c2", info.c2);
    m.derived("cbeta", info.c_beta);
    m.derived("cbeta_theory", info.c_beta_theory);
    m.derived("epsilon", info.epsilon);
    m.derived("J", std::to_string(info.finest));
    m.derived("Jprime", std::to_string(info.finest_prime));
    m.derived("degenerate", std::to_string(info.degenerate));
    m.derived("coefficients", std::to_string(info.coefficients));
    m.derived("kept", std::to_string(info.kept));
    m.derived("coeffs_path", coeff_path);
    m.write(or_default(manifest, out + ".manifest"));

    std::printf("nu=%.6g cbeta=%.6g J=%d Jprime=%d kept=%zu/%zu\n", info.nu, info.c_beta, info.finest,
                info.finest_prime, info.kept, info.coefficients);
    if (info.degenerate) std::printf("warning: noise level eps >= 1, only the coarsest levels were used\n");
  }
};

// ---- simulate -------------------------------------------------------------

struct SimulateCmd {
  std::size_t m = 256, n = 512, replicate = 0, runs = 0;
  double sigma = 0.5;
  std::string f1 = "quadratic", f2 = "blip";
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::string out, truth, kernel_out, kernel, manifest, mise_out, per_run_out, sweep_out;
  std::vector<std::size_t> sweep_m;
  EstimatorFlags est;

  void attach(Flags& f) {
    f.add("M", m, "number of profiles");
    f.add("N", n, "samples per profile");
    f.add("sigma", sigma, "noise standard deviation");
    f.add("f1", f1, "test function along u: blip, bumps or quadratic");
    f.add("f2", f2, "test function along t: blip, bumps or quadratic");
    f.add("seed", seed, "random seed");
    f.add("replicate", replicate, "replicate index of the written data set");
    f.add("out", out, "noisy observations (FDG1 or .csv)")->required();
    f.add("truth", truth, "also write the noiseless f(u_l, t_i)");
    f.add("kernel", kernel, "kernel grid to use instead of the built-in kernel");
    f.add("kernel-out", kernel_out, "also write the kernel samples used");
    f.add("runs", runs, "replicates for a MISE evaluation of both modes (0: none)");
    f.add("mise-out", mise_out, "CSV for the MISE evaluation (default: OUT.mise.csv)");
    f.add("per-run", per_run_out, "CSV of every replicate's MISE (mode,run,mise)");
    f.add("sweep-m", sweep_m, "profile counts for a MISE-vs-MN sweep (needs --runs)");
    f.add("sweep-out", sweep_out, "prefix of the two-column sweep files (default: OUT.sweep)");
    f.add("threads", threads, "worker threads for replicates (0: all cores)");
    f.add("manifest", manifest, "manifest path (default: OUT.manifest)");
    est.add(f, false);
  }

  fdecon_sim_options sim(std::size_t profiles, const fdecon_grid* k) const {
    fdecon_sim_options o;
    fdecon_sim_options_default(&o);
    o.m = profiles;
    o.n = n;
    o.sigma = sigma;
    o.f1 = parse_function(f1);
    o.f2 = parse_function(f2);
    o.runs = runs > 0 ? runs : 1;
    o.seed = seed;
    o.threads = threads;
    o.kernel = k;
    return o;
  }

  std::pair<fdecon_mise, fdecon_mise> both_modes(const fdecon_sim_options& o,
                                                 std::vector<double>* per_run = nullptr) const {
    fdecon_options e[2] = {est.options(), est.options()};
    e[0].mode = FDECON_FUNCTIONAL;
    e[1].mode = FDECON_SEPARATE;
    fdecon_mise res[2];
    if (per_run) per_run->assign(2 * o.runs, 0.0);
    check(fdecon_run_mise(&o, e, 2, res, per_run ? per_run->data() : nullptr));
    return {res[0], res[1]};
  }

  void run(const Flags& f) {
    GridPtr kgrid;
    if (!kernel.empty()) {
      fdecon_grid* raw = nullptr;
      check(fdecon_grid_read(kernel.c_str(), &raw));
      kgrid.reset(raw);
    }
    const fdecon_sim_options o = sim(m, kgrid.get());
    fdecon_grid *data = nullptr, *tr = nullptr;
    check(fdecon_simulate(&o, replicate, &data, truth.empty() ? nullptr : &tr));
    GridPtr d(data), t(tr);
    check(fdecon_grid_write(d.get(), out.c_str()));
    if (t) check(fdecon_grid_write(t.get(), truth.c_str()));
    if (!kernel_out.empty()) {
      if (kgrid) {
        check(fdecon_grid_write(kgrid.get(), kernel_out.c_str()));
      } else {
        fdecon_grid* raw = nullptr;
        check(fdecon_paper_kernel_grid(m, n, &raw));
        GridPtr kg(raw);
        check(fdecon_grid_write(kg.get(), kernel_out.c_str()));
      }
    }

    Manifest man("simulate", f);
    if (runs > 0) {
      std::vector<double> per_run;
      const auto [fm, sm] = both_modes(o, per_run_out.empty() ? nullptr : &per_run);
      if (!per_run_out.empty()) {
        std::ofstream pr(per_run_out);
        pr.precision(10);
        pr << "mode,run,mise\n";
        for (std::size_t i = 0; i < per_run.size(); ++i)
          pr << (i < o.runs ? "functional" : "separate") << ',' << i % o.runs << ',' << per_run[i] << '\n';
        if (!pr) throw Failure{2, "cannot write " + per_run_out};
      }
      const std::string path = or_default(mise_out, out + ".mise.csv");
      std::ofstream os(path);
      os.precision(10);
      os << "f1,f2,M,sigma,mode,mean_mise,sd_mise,runs,seed\n";
      for (const auto& r : {fm, sm})
        os << f1 << ',' << f2 << ',' << m << ',' << sigma << ',' << (r.mode == FDECON_SEPARATE ? "separate" : "functional")
           << ',' << r.mean_mise << ',' << r.sd_mise << ',' << r.runs << ',' << seed << '\n';
      if (!os) throw Failure{2, "cannot write " + path};
      std::printf("functional mean_mise=%.6g sd=%.3g | separate mean_mise=%.6g sd=%.3g (%zu runs)\n", fm.mean_mise,
                  fm.sd_mise, sm.mean_mise, sm.sd_mise, runs);
      man.derived("functional_mean_mise", fm.mean_mise);
      man.derived("separate_mean_mise", sm.mean_mise);
    }
    if (!sweep_m.empty()) {
      if (runs == 0) usage("--sweep-m needs --runs > 0");
      if (kgrid) usage("--sweep-m uses the built-in kernel; drop --kernel");
      const std::string prefix = or_default(sweep_out, out + ".sweep");
      std::ofstream fo(prefix + ".functional.dat"), so(prefix + ".separate.dat");
      fo.precision(10);
      so.precision(10);
      fo << "# MN mean_mise\n";
      so << "# MN mean_mise\n";
      for (std::size_t mm : sweep_m) {
        const auto [fm, sm] = both_modes(sim(mm, nullptr));
        fo << mm * n << ' ' << fm.mean_mise << '\n';
        so << mm * n << ' ' << sm.mean_mise << '\n';
        std::printf("M=%zu functional=%.6g separate=%.6g\n", mm, fm.mean_mise, sm.mean_mise);
      }
      if (!fo || !so) throw Failure{2, "cannot write sweep files " + prefix + ".*.dat"};
    }
    man.write(or_default(manifest, out + ".manifest"));
  }
};

// ---- table1 ---------------------------------------------------------------

struct Table1Cmd {
  std::size_t runs = 100;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::string out, manifest;
  EstimatorFlags est;

  void attach(Flags& f) {
    f.add("runs", runs, "replicates per cell");
    f.add("seed", seed, "random seed shared by every cell");
    f.add("threads", threads, "worker threads for replicates (0: all cores)");
    f.add("out", out, "CSV output")->required();
    f.add("manifest", manifest, "manifest path (default: OUT.manifest)");
    est.add(f, false);
  }

  void run(const Flags& f) {
    fdecon_options fo = est.options(), so = est.options();
    fo.mode = FDECON_FUNCTIONAL;
    so.mode = FDECON_SEPARATE;
    fdecon_table* raw = nullptr;
    check(fdecon_table1(runs, seed, threads, &fo, &so, &raw));
    TablePtr table(raw);
    check(fdecon_table_write_csv(table.get(), seed, out.c_str()));

    // Cells come in (functional, separate) pairs.
    int matched = 0, total = 0;
    std::printf("%-10s %-10s %4s %5s %14s %14s  expected\n", "f1", "f2", "M", "sigma", "functional", "separate");
    for (std::size_t i = 0; i + 1 < fdecon_table_size(table.get()); i += 2) {
      fdecon_table_row a, b;
      check(fdecon_table_row_at(table.get(), i, &a));
      check(fdecon_table_row_at(table.get(), i + 1, &b));
      const bool want_functional = a.m >= 256;
      const bool ok = want_functional ? a.mise.mean_mise < b.mise.mean_mise : b.mise.mean_mise < a.mise.mean_mise;
      matched += ok;
      ++total;
      std::printf("%-10s %-10s %4zu %5.2f %14.6g %14.6g  %s %s\n", fdecon_function_name(a.f1),
                  fdecon_function_name(a.f2), a.m, a.sigma, a.mise.mean_mise, b.mise.mean_mise,
                  want_functional ? "F<S" : "S<F", ok ? "ok" : "MISMATCH");
    }
    std::printf("orderings matched: %d/%d\n", matched, total);
    Manifest m("table1", f);
    m.derived("cells", std::to_string(fdecon_table_size(table.get())));
    m.derived("orderings_matched", std::to_string(matched) + "/" + std::to_string(total));
    m.write(or_default(manifest, out + ".manifest"));
  }
};

// ---- rates / compare ------------------------------------------------------

std::string verdict_json(double s1, double s2, double nu, double m, double n) {
  fdecon_comparison c;
  check(fdecon_compare(s1, s2, nu, m, n, &c));
  std::ostringstream os;
  os.precision(12);
  os << "\"verdict\": \"" << fdecon_verdict_name(c.verdict) << "\", \"surrogate\": ";
  if (std::isnan(c.surrogate))
    os << "null";
  else
    os << c.surrogate;
  os << ", \"note\": \"asymptotic surrogate\"";
  return os.str();
}

struct RatesCmd {
  std::string s1 = "1", nu = "1", p = "2", q = "2";
  std::vector<std::string> s2{"1"};
  double m = 0, n = 0;
  std::string manifest;

  void attach(Flags& f) {
    f.add("s1", s1, "smoothness along t (decimal or a/b)");
    f.add("s2", s2, "smoothness along each spatial axis (decimal or a/b)");
    f.add("nu", nu, "degree of ill-posedness");
    f.add("p", p, "Besov p in [1, inf]");
    f.add("q", q, "Besov q in [1, inf] (does not enter the exponent)");
    f.add("M", m, "profiles for the functional-vs-separate verdict (0: skip)");
    f.add("N", n, "samples per profile for the verdict (0: skip)");
    f.add("manifest", manifest, "optional manifest path");
  }

  void run(const Flags& f) {
    std::vector<const char*> s2c;
    for (const auto& s : s2) s2c.push_back(s.c_str());
    fdecon_rate r;
    if (fdecon_rate_exponent_exact(s1.c_str(), s2c.data(), s2c.size(), p.c_str(), nu.c_str(), &r) != FDECON_OK) {
      std::vector<double> s2d;
      for (const auto& s : s2) s2d.push_back(auto_or_double(s, "s2"));
      const double pd = (p == "inf") ? INFINITY : auto_or_double(p, "p");
      check(fdecon_rate_exponent(auto_or_double(s1, "s1"), s2d.data(), s2d.size(), pd, auto_or_double(nu, "nu"), &r));
    }
    const std::string d = r.exact ? (r.d_den == 1 ? std::to_string(r.d_num)
                                                  : std::to_string(r.d_num) + "/" + std::to_string(r.d_den))
                                  : text(r.d);
    std::printf("d = %s\nregime %s\n", d.c_str(), fdecon_regime_name(r.regime));
    std::ostringstream js;
    js.precision(15);
    js << "{\"d\": " << r.d << ", \"d_exact\": " << (r.exact ? "\"" + d + "\"" : std::string("null"))
       << ", \"d1\": " << r.d1 << ", \"regime\": \"" << fdecon_regime_name(r.regime) << "\"";
    if (r.regime_warning) js << ", \"warning\": \"outside min(s1, s2) >= max(1/p, 1/2)\"";
    if (m > 0 && n > 0) {
      if (s2.size() != 1) usage("--M/--N verdicts need exactly one --s2");
      js << ", " << verdict_json(auto_or_double(s1, "s1"), auto_or_double(s2[0], "s2"), auto_or_double(nu, "nu"), m, n);
    } else {
      js << ", \"verdict\": null, \"surrogate\": null";
    }
    js << "}";
    std::printf("%s\n", js.str().c_str());
    if (!manifest.empty()) {
      Manifest man("rates", f);
      man.derived("d", d);
      man.derived("d1", std::to_string(r.d1));
      man.derived("regime", fdecon_regime_name(r.regime));
      man.write(manifest);
    }
  }
};

struct CompareCmd {
  double s1 = 0, s2 = 0, nu = 0, m = 0, n = 0;
  std::string manifest;

  void attach(Flags& f) {
    f.add("s1", s1, "smoothness along t")->required();
    f.add("s2", s2, "smoothness along u")->required();
    f.add("nu", nu, "degree of ill-posedness")->required();
    f.add("M", m, "number of profiles")->required();
    f.add("N", n, "samples per profile")->required();
    f.add("manifest", manifest, "optional manifest path");
  }

  void run(const Flags& f) {
    std::printf("{%s}\n", verdict_json(s1, s2, nu, m, n).c_str());
    if (!manifest.empty()) Manifest("compare", f).write(manifest);
  }
};

// ---- nu-estimate ----------------------------------------------------------

struct NuCmd {
  std::string kernel, manifest;
  int lo = 0, hi = 0;

  void attach(Flags& f) {
    f.add("kernel", kernel, "kernel samples (FDG1 or CSV)")->required();
    f.add("lo", lo, "lowest frequency of the fit (0: N/16)");
    f.add("hi", hi, "highest frequency of the fit (0: N/4)");
    f.add("manifest", manifest, "optional manifest path");
  }

  void run(const Flags& f) {
    fdecon_grid* raw = nullptr;
    check(fdecon_grid_read(kernel.c_str(), &raw));
    GridPtr g(raw);
    fdecon_kernel* kraw = nullptr;
    check(fdecon_kernel_from_grid(g.get(), &kraw));
    KernelPtr k(kraw);
    double nu = 0, c1 = 0, c2 = 0;
    check(fdecon_kernel_estimate_nu(k.get(), lo, hi, &nu, &c1, &c2));
    std::printf("nu=%.10g c1=%.10g c2=%.10g\n", nu, c1, c2);
    if (!manifest.empty()) {
      Manifest m("nu-estimate", f);
      m.derived("nu", nu);
      m.derived("c1", c1);
      m.derived("c2", c2);
      m.write(manifest);
    }
  }
};

// Turns a manifest back into an argument vector: "command=X" becomes the
// subcommand and every key without a "resolved." prefix becomes "--key value".
std::vector<std::string> replay_args(const std::string& path) {
  std::ifstream is(path);
  if (!is) usage("cannot open manifest " + path);
  std::vector<std::string> args{"fdecon"};
  std::vector<std::string> rest;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) usage("malformed manifest line: " + line);
    const std::string key = line.substr(0, eq), value = line.substr(eq + 1);
    if (key == "command") {
      args.push_back(value);
    } else if (key.rfind("resolved.", 0) != 0) {
      if (value.empty()) continue;
      rest.push_back("--" + key);
      std::istringstream vs(value);
      for (std::string tok; vs >> tok;) rest.push_back(tok);
    }
  }
  if (args.size() != 2) usage("manifest " + path + " has no command line");
  args.insert(args.end(), rest.begin(), rest.end());
  return args;
}

int run(int argc, char** argv);

int run_args(const std::vector<std::string>& args) {
  std::vector<char*> ptrs;
  for (const auto& a : args) ptrs.push_back(const_cast<char*>(a.c_str()));
  return run(static_cast<int>(ptrs.size()), ptrs.data());
}

int run(int argc, char** argv) {
  CLI::App app{"Functional deconvolution with hyperbolic Meyer x Daubechies wavelets"};
  app.require_subcommand(1);
  app.set_version_flag("--version", fdecon_version());

  DeconvolveCmd dc;
  SimulateCmd sc;
  Table1Cmd tc;
  RatesCmd rc;
  CompareCmd cc;
  NuCmd nc;
  std::string replay_path;

  Flags fd(app.add_subcommand("deconvolve", "recover f(u, t) from noisy convolved profiles"));
  Flags fs(app.add_subcommand("simulate", "synthesize test data and optionally evaluate MISE"));
  Flags ft(app.add_subcommand("table1", "rerun the six-pair MISE table (N = 512)"));
  Flags fr(app.add_subcommand("rates", "minimax exponents d, d1 for a Besov ball"));
  Flags fc(app.add_subcommand("compare", "functional vs separate recovery verdict"));
  Flags fn(app.add_subcommand("nu-estimate", "fit the degree of ill-posedness of a kernel"));
  auto* rp = app.add_subcommand("replay", "rerun the command recorded in a manifest");
  rp->add_option("manifest", replay_path, "manifest written by a previous run")->required();
  dc.attach(fd);
  sc.attach(fs);
  tc.attach(ft);
  rc.attach(fr);
  cc.attach(fc);
  nc.attach(fn);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (fd.app()->parsed()) dc.run(fd);
  if (fs.app()->parsed()) sc.run(fs);
  if (ft.app()->parsed()) tc.run(ft);
  if (fr.app()->parsed()) rc.run(fr);
  if (fc.app()->parsed()) cc.run(fc);
  if (fn.app()->parsed()) nc.run(fn);
  if (rp->parsed()) return run_args(replay_args(replay_path));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const Failure& f) {
    std::fprintf(stderr, "fdecon: %s\n", f.message.c_str());
    return f.exit_code;
  }
}
