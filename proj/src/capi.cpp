// C ABI shim over the C++ core: opaque handles, status codes, thread-local
// error text. Every entry point traps exceptions at the boundary.

#include "bigjump/bigjump.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <ios>
#include <new>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "bounds.hpp"
#include "compound_poisson.hpp"
#include "conditional.hpp"
#include "convolution.hpp"
#include "experiment.hpp"
#include "rng.hpp"
#include "scales.hpp"
#include "tail_model.hpp"

struct bj_model {
  bigjump::TailModel m;
};

struct bj_rng {
  std::mt19937_64 g;
};

struct bj_sampler {
  bigjump::ConditionalSampler s;
  bigjump::ConditionalSpec spec;
};

namespace {

thread_local std::string g_last_error;

void set_error(const char* msg) { g_last_error = msg == nullptr ? "" : msg; }

int classify(const std::exception& e) {
  if (dynamic_cast<const bigjump::SchemaError*>(&e) != nullptr) return BJ_EINVAL;
  if (dynamic_cast<const std::invalid_argument*>(&e) != nullptr) return BJ_EINVAL;
  if (dynamic_cast<const std::domain_error*>(&e) != nullptr) return BJ_EDOMAIN;
  if (dynamic_cast<const std::length_error*>(&e) != nullptr) return BJ_ERANGE;
  if (dynamic_cast<const std::bad_alloc*>(&e) != nullptr) return BJ_ERANGE;
  if (dynamic_cast<const std::range_error*>(&e) != nullptr) return BJ_ERANGE;
  if (dynamic_cast<const std::overflow_error*>(&e) != nullptr) return BJ_ERANGE;
  if (dynamic_cast<const std::ios_base::failure*>(&e) != nullptr) return BJ_EIO;
  return BJ_EINTERNAL;
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    set_error("");
    return fn();
  } catch (const std::exception& e) {
    set_error(e.what());
    return classify(e);
  } catch (...) {
    set_error("unknown failure");
    return BJ_EINTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

int require(bool ok, const char* msg) {
  if (!ok) {
    set_error(msg);
    return BJ_EINVAL;
  }
  return BJ_OK;
}

bigjump::ConditionalSpec build_spec(const bj_model* m, long long n, long long x,
                                    long long x_minus,
                                    bigjump::CondKind kind) {
  bigjump::ConditionalSpec spec;
  spec.model = m->m;
  spec.n = n;
  spec.x = x;
  spec.x_minus = x_minus;
  spec.kind = kind;
  bigjump::validate_spec(spec);
  return spec;
}

}  // namespace

extern "C" {

const char* bj_version(void) { return bigjump::kHarnessVersion; }

const char* bj_last_error(void) { return g_last_error.c_str(); }

void bj_string_free(char* s) { std::free(s); }

bj_model* bj_model_zeta(double alpha) {
  try {
    set_error("");
    return new bj_model{bigjump::TailModel::zeta(alpha)};
  } catch (const std::exception& e) {
    set_error(e.what());
    return nullptr;
  }
}

bj_model* bj_model_from_json(const char* json_text) {
  try {
    set_error("");
    if (json_text == nullptr) {
      set_error("json_text is null");
      return nullptr;
    }
    return new bj_model{bigjump::TailModel::from_json(json_text)};
  } catch (const std::exception& e) {
    set_error(e.what());
    return nullptr;
  }
}

void bj_model_free(bj_model* m) { delete m; }

int bj_model_to_json(const bj_model* m, char** json_out) {
  if (int rc = require(m != nullptr && json_out != nullptr, "null argument"))
    return rc;
  return guarded([&] {
    *json_out = dup_string(m->m.to_json());
    return BJ_OK;
  });
}

int bj_model_log_pmf(const bj_model* m, long long k, double* out) {
  if (int rc = require(m != nullptr && out != nullptr, "null argument"))
    return rc;
  return guarded([&] {
    *out = m->m.log_pmf(k);
    return BJ_OK;
  });
}

int bj_model_log_survival(const bj_model* m, double x, double* out) {
  if (int rc = require(m != nullptr && out != nullptr, "null argument"))
    return rc;
  return guarded([&] {
    *out = m->m.log_survival(x);
    return BJ_OK;
  });
}

int bj_model_mean(const bj_model* m, double* out) {
  if (int rc = require(m != nullptr && out != nullptr, "null argument"))
    return rc;
  return guarded([&] {
    *out = m->m.mean();
    return BJ_OK;
  });
}

int bj_scale_an(const bj_model* m, long long n, double* out) {
  if (int rc = require(m != nullptr && out != nullptr, "null argument"))
    return rc;
  return guarded([&] {
    *out = bigjump::scale_an(m->m, n);
    return BJ_OK;
  });
}

int bj_scale_bn(const bj_model* m, long long n, double* out) {
  if (int rc = require(m != nullptr && out != nullptr, "null argument"))
    return rc;
  return guarded([&] {
    *out = bigjump::scale_bn(m->m, n);
    return BJ_OK;
  });
}

int bj_sum_log_pmf(const bj_model* m, long long n, long long x,
                   long long window, double* out) {
  if (int rc = require(m != nullptr && out != nullptr, "null argument"))
    return rc;
  return guarded([&] {
    auto law = bigjump::sum_pmf_recentered(m->m, n, window);
    *out = law.at(x);
    return BJ_OK;
  });
}

int bj_sum_log_survival(const bj_model* m, long long n, long long x,
                        long long window, double* out) {
  if (int rc = require(m != nullptr && out != nullptr, "null argument"))
    return rc;
  return guarded([&] {
    auto law = bigjump::sum_pmf_recentered(m->m, n, window);
    *out = bigjump::log_survival_completed(m->m, n, law, x);
    return BJ_OK;
  });
}

int bj_bigjump_local_log(const bj_model* m, long long n, long long x,
                         double* out) {
  if (int rc = require(m != nullptr && out != nullptr, "null argument"))
    return rc;
  return guarded([&] {
    *out = bigjump::bigjump_local_log(m->m, n, x);
    return BJ_OK;
  });
}

int bj_bigjump_tail_log(const bj_model* m, long long n, long long x,
                        double* out) {
  if (int rc = require(m != nullptr && out != nullptr, "null argument"))
    return rc;
  return guarded([&] {
    *out = bigjump::bigjump_tail_log(m->m, n, x);
    return BJ_OK;
  });
}

int bj_error_bound_total(const bj_model* m, long long n, long long x,
                         double eps, double* total, double* leading) {
  if (int rc = require(m != nullptr && total != nullptr, "null argument"))
    return rc;
  return guarded([&] {
    auto rep = bigjump::error_bound_A(m->m, n, x, eps);
    *total = rep.total;
    if (leading != nullptr) *leading = rep.leading_term;
    return BJ_OK;
  });
}

int bj_regime_check(const bj_model* m, long long n, long long x, int* regime,
                    double* q_value) {
  if (int rc = require(m != nullptr && regime != nullptr, "null argument"))
    return rc;
  return guarded([&] {
    auto rep = bigjump::regime_check(m->m, n, x);
    switch (rep.regime) {
      case bigjump::Regime::BigJump: *regime = BJ_REGIME_BIG_JUMP; break;
      case bigjump::Regime::Gaussian: *regime = BJ_REGIME_GAUSSIAN; break;
      default: *regime = BJ_REGIME_INTERMEDIATE; break;
    }
    if (q_value != nullptr) *q_value = rep.q_value;
    return BJ_OK;
  });
}

int bj_fuk_nagaev_log_bound(const bj_model* m, long long n, long long x,
                            long long y, double c1, double c2, double c3,
                            double* out) {
  if (int rc = require(m != nullptr && out != nullptr, "null argument"))
    return rc;
  return guarded([&] {
    bigjump::FNConstants c;
    c.c1 = c1;
    c.c2 = c2;
    c.c3 = c3;
    *out = bigjump::fuk_nagaev_log_bound(m->m, n, x, y, c);
    return BJ_OK;
  });
}

int bj_tv_exact_thm2(const bj_model* m, long long n, long long x,
                     long long x_minus, long long window, long long k_cap,
                     double* tv, double* bound_max) {
  if (int rc = require(m != nullptr && tv != nullptr, "null argument"))
    return rc;
  return guarded([&] {
    auto spec = build_spec(m, n, x, x_minus, bigjump::CondKind::Exceed);
    auto rep = bigjump::tv_exact_thm2(spec, window, k_cap);
    *tv = rep.tv;
    if (bound_max != nullptr) *bound_max = rep.bound_max;
    return BJ_OK;
  });
}

int bj_tv_exact_thm3(const bj_model* m, long long n, long long x,
                     long long x_minus, long long window, double* tv,
                     double* bound_max) {
  if (int rc = require(m != nullptr && tv != nullptr, "null argument"))
    return rc;
  return guarded([&] {
    auto spec = build_spec(m, n, x, x_minus, bigjump::CondKind::Hit);
    auto rep = bigjump::tv_exact_thm3(spec, window);
    *tv = rep.tv;
    if (bound_max != nullptr) *bound_max = rep.bound_max;
    return BJ_OK;
  });
}

int bj_tv_mc_shifted(const bj_model* m, long long n, long long x,
                     long long x_minus, long long samples,
                     unsigned long long seed, long long wlo, long long whi,
                     double* tv, double* stderr_out) {
  if (int rc = require(m != nullptr && tv != nullptr, "null argument"))
    return rc;
  return guarded([&] {
    auto spec = build_spec(m, n, x, x_minus, bigjump::CondKind::Exceed);
    std::mt19937_64 rng(seed);
    auto rep = bigjump::tv_mc_shifted(spec, samples, rng, wlo, whi);
    *tv = rep.tv;
    if (stderr_out != nullptr)
      *stderr_out = rep.mc_stderr.has_value() ? *rep.mc_stderr : 0.0;
    return BJ_OK;
  });
}

bj_sampler* bj_sampler_new(const bj_model* m, long long n, long long x,
                           long long x_minus, int hit, long long wlo,
                           long long whi) {
  try {
    set_error("");
    if (m == nullptr) {
      set_error("null model");
      return nullptr;
    }
    auto spec = build_spec(
        m, n, x, x_minus,
        hit != 0 ? bigjump::CondKind::Hit : bigjump::CondKind::Exceed);
    return new bj_sampler{bigjump::ConditionalSampler(spec, wlo, whi), spec};
  } catch (const std::exception& e) {
    set_error(e.what());
    return nullptr;
  }
}

void bj_sampler_free(bj_sampler* s) { delete s; }

bj_rng* bj_rng_new(unsigned long long seed, unsigned long long stream) {
  try {
    return new bj_rng{bigjump::substream(seed, stream)};
  } catch (...) {
    set_error("rng allocation failed");
    return nullptr;
  }
}

void bj_rng_free(bj_rng* r) { delete r; }

namespace {

int draw_into(const bj_sampler* s, bj_rng* r, long long* out, size_t out_len,
              int which) {
  if (int rc = require(s != nullptr && r != nullptr && out != nullptr,
                       "null argument"))
    return rc;
  return guarded([&] {
    if (out_len < static_cast<size_t>(s->spec.n)) {
      set_error("output buffer shorter than n");
      return static_cast<int>(BJ_EINVAL);
    }
    std::vector<std::int64_t> draw;
    switch (which) {
      case 0: draw = s->s.sample_exact(r->g); break;
      case 1: draw = s->s.sample_limiting(r->g); break;
      default: draw = s->s.sample_xi_star(r->g); break;
    }
    for (size_t i = 0; i < draw.size(); ++i) out[i] = draw[i];
    return static_cast<int>(BJ_OK);
  });
}

}  // namespace

int bj_sampler_draw(const bj_sampler* s, bj_rng* r, long long* out,
                    size_t out_len) {
  return draw_into(s, r, out, out_len, 0);
}

int bj_sampler_draw_limiting(const bj_sampler* s, bj_rng* r, long long* out,
                             size_t out_len) {
  return draw_into(s, r, out, out_len, 1);
}

int bj_sampler_draw_xi_star(const bj_sampler* s, bj_rng* r, long long* out,
                            size_t out_len) {
  return draw_into(s, r, out, out_len, 2);
}

int bj_shift_t(long long* seq, size_t len) {
  if (int rc = require(seq != nullptr && len > 0, "empty sequence")) return rc;
  return guarded([&] {
    std::vector<std::int64_t> v(seq, seq + len);
    v = bigjump::shift_T(v);
    for (size_t i = 0; i < len; ++i) seq[i] = v[i];
    return BJ_OK;
  });
}

int bj_condensation_check(double lambda, long long n, double alpha,
                          long long window, long long terms_m, long long k,
                          double c, double* ratio, double* prediction) {
  if (int rc = require(ratio != nullptr, "null argument")) return rc;
  return guarded([&] {
    bigjump::CompoundPoissonSpec spec;
    spec.lambda = lambda;
    spec.n = n;
    spec.alpha = alpha;
    if (window > 0) spec.window = window;
    spec.terms_M = terms_m;
    auto rep = bigjump::condensation_check(spec, k, c);
    *ratio = rep.ratio;
    if (prediction != nullptr) *prediction = rep.err_prediction;
    return BJ_OK;
  });
}

int bj_run_experiment(const char* config_json, const char* format_override,
                      const char* out_path_override,
                      const unsigned long long* seed_override,
                      char** report_out) {
  if (int rc = require(config_json != nullptr, "null config")) return rc;
  return guarded([&] {
    auto config = bigjump::parse_config_text(config_json);
    if (format_override != nullptr && format_override[0] != '\0') {
      std::string f = format_override;
      if (f != "csv" && f != "json")
        throw bigjump::SchemaError("format must be csv or json");
      config.format = f;
    }
    if (out_path_override != nullptr && out_path_override[0] != '\0')
      config.output_path = out_path_override;
    if (seed_override != nullptr) {
      config.seed = *seed_override;
      config.has_seed = true;
    }
    auto rows = bigjump::run_experiment(config);
    std::string text = bigjump::emit_report(rows, config, config.output_path);
    if (report_out != nullptr) *report_out = dup_string(text);
    bool any_ok = rows.empty();
    for (const auto& row : rows)
      if (row.status.rfind("error", 0) != 0) any_ok = true;
    if (!any_ok) {
      set_error("every grid row failed");
      return static_cast<int>(BJ_EDOMAIN);
    }
    return static_cast<int>(BJ_OK);
  });
}

}  // extern "C"
