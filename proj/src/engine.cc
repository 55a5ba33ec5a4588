// Copyright 2026 The phidecoder Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "phidec/engine.h"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>

#include "phidec/phi_field.h"
#include "phidec/toom.h"

namespace phidec {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t verification_seed(std::uint64_t seed, std::uint64_t config_hash) {
  return splitmix64(splitmix64(seed ^ 0x5645524946590000ULL) ^ config_hash);
}

double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

SurvivalRecord base_record(Mode mode, const DecoderParams& params, double p,
                           double q, std::uint64_t seed) {
  SurvivalRecord r;
  r.mode = mode;
  r.L = params.L;
  r.p = p;
  r.q = q;
  r.alpha = params.field.kind == FieldModel::Kind::kExplicit
                ? params.field.alpha
                : 0.0;
  r.seed = seed;
  return r;
}

void check_probabilities(double p, double q) {
  NoiseParams{p, q}.validate();
}

SurvivalRecord run_sequences(Mode mode, const DecoderParams& params, double p,
                             double q, double cap, std::uint64_t seed) {
  params.validate();
  check_probabilities(p, q);
  const auto start = std::chrono::steady_clock::now();
  SimulationState state(params.L, params.field_height(), seed);
  Verifier verifier(params, seed);
  const int c = params.c();
  SurvivalRecord rec = base_record(mode, params, p, q, seed);
  rec.censored = true;
  rec.failure_time = cap;
  const auto steps = static_cast<std::uint64_t>(cap);
  for (std::uint64_t t = 1; t <= steps; ++t) {
    error_map(state, p);
    measure(state, q);
    decode_round(state, params, c);
    state.clock = static_cast<double>(t);
    if (t % params.verify_stride == 0 &&
        verifier.failed(state.config, state.true_syndrome())) {
      rec.censored = false;
      rec.failure_time = static_cast<double>(t);
      break;
    }
  }
  rec.wall_time = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - start)
                      .count();
  return rec;
}

}  // namespace

std::string_view mode_name(Mode mode) {
  switch (mode) {
    case Mode::kStatic:
      return "static";
    case Mode::kSynchronous:
      return "sync";
    case Mode::kAsynchronous:
      return "async";
    case Mode::kExplicit:
      return "explicit";
    case Mode::kToom:
      return "toom";
  }
  return "unknown";
}

Mode parse_mode(std::string_view name) {
  for (Mode m : {Mode::kStatic, Mode::kSynchronous, Mode::kAsynchronous,
                 Mode::kExplicit, Mode::kToom}) {
    if (mode_name(m) == name) return m;
  }
  throw std::invalid_argument("unknown mode '" + std::string(name) +
                              "' (expected static, sync, async, explicit "
                              "or toom)");
}

void RateSet::validate() const {
  if (!(gamma_x > 0 && gamma_m > 0 && gamma_a > 0 && gamma_base > 0)) {
    throw std::invalid_argument("all event rates must be > 0");
  }
}

int DecoderParams::field_height() const {
  return height > 0 ? height : default_field_height(L);
}

int DecoderParams::c() const { return field_updates_per_round(L, kappa); }

void DecoderParams::validate() const {
  if (L < 2) throw std::invalid_argument("L must be >= 2");
  if (!(kappa > 0)) throw std::invalid_argument("kappa must be > 0");
  if (k_ver < 1) throw std::invalid_argument("k_ver must be >= 1");
  if (verify_stride < 1) {
    throw std::invalid_argument("verify_stride must be >= 1");
  }
  if (field.kind == FieldModel::Kind::kExplicit && !(field.alpha > 0)) {
    throw std::invalid_argument("alpha must be > 0");
  }
  rates.validate();
}

void decode_round(SimulationState& state, const DecoderParams& params, int c) {
  if (params.field.kind == FieldModel::Kind::kExplicit) {
    const std::vector<double> plane =
        explicit_field(state.lattice, state.recorded(), params.field.alpha);
    anyon_update(state, plane);
  } else {
    compound_step(state, c);
  }
}

bool verify_logical(const ErrorConfig& config, const DecoderParams& params,
                    std::uint64_t seed) {
  // The field is only needed for the automaton model.
  const bool automaton = params.field.kind == FieldModel::Kind::kAutomaton;
  SimulationState copy(params.L, automaton ? params.field_height() : 1,
                       verification_seed(seed, config.hash()));
  copy.config = config;
  copy.true_syndrome() = syndrome(copy.lattice, copy.config);
  copy.recorded() = copy.true_syndrome();
  const int c = params.c();
  const int rounds = params.k_ver * params.L;
  for (int r = 0; r < rounds && count_anyons(copy.true_syndrome()) != 0; ++r) {
    decode_round(copy, params, c);
  }
  if (count_anyons(copy.true_syndrome()) != 0) return true;
  return !homology_class(copy.lattice, copy.config).trivial();
}

bool Verifier::failed(const ErrorConfig& config,
                      const SyndromePlane& true_syndrome) {
  ++calls_;
  if (last_config_ && *last_config_ == config) return last_result_;
  Lattice lattice(params_.L);
  if (count_anyons(true_syndrome) == 0) {
    last_result_ = !homology_class(lattice, config).trivial();
  } else {
    ++decodes_;
    last_result_ = verify_logical(config, params_, seed_);
  }
  last_config_ = config;
  return last_result_;
}

StaticResult decode_static(SimulationState& state, const DecoderParams& params,
                           int tau_max) {
  const int c = params.c();
  StaticResult out;
  while (out.rounds < tau_max && count_anyons(state.true_syndrome()) != 0) {
    decode_round(state, params, c);
    ++out.rounds;
  }
  if (count_anyons(state.true_syndrome()) != 0) {
    out.timeout = true;
    return out;
  }
  out.residual = homology_class(state.lattice, state.config);
  out.success = out.residual.trivial();
  return out;
}

StaticResult run_static(const DecoderParams& params, double p, int tau_max,
                        std::uint64_t seed) {
  params.validate();
  check_probabilities(p, 0.0);
  SimulationState state(params.L, params.field_height(), seed);
  error_map(state, p);
  measure(state, 0.0);
  return decode_static(state, params, tau_max);
}

SurvivalRecord run_synchronous(const DecoderParams& params, double p, double q,
                               double cap, std::uint64_t seed) {
  DecoderParams sync = params;
  sync.field = FieldModel::automaton();
  return run_sequences(Mode::kSynchronous, sync, p, q, cap, seed);
}

SurvivalRecord run_explicit(const DecoderParams& params, double p, double q,
                            double cap, std::uint64_t seed) {
  if (params.field.kind != FieldModel::Kind::kExplicit) {
    throw std::invalid_argument("run_explicit needs an explicit field model");
  }
  return run_sequences(Mode::kExplicit, params, p, q, cap, seed);
}

EventSampler::EventSampler(const DecoderParams& params) {
  const Lattice lattice(params.L);
  n_edges_ = lattice.num_edges();
  n_sites_ = lattice.num_sites();
  n_cells_ = n_sites_ * static_cast<std::size_t>(params.field_height());
  gamma_x_ = params.rates.gamma_x;
  gamma_m_ = params.rates.gamma_m;
  gamma_a_ = params.rates.gamma_a;
  gamma_f_ = params.rates.gamma_f(params.c());
  cut_m_ = gamma_x_ * n_edges_;
  cut_a_ = cut_m_ + gamma_m_ * n_sites_;
  cut_f_ = cut_a_ + gamma_a_ * n_sites_;
  total_ = cut_f_ + gamma_f_ * n_cells_;
}

double EventSampler::weight(Category c) const {
  switch (c) {
    case Category::kFlip:
      return gamma_x_ * n_edges_;
    case Category::kMeasure:
      return gamma_m_ * n_sites_;
    case Category::kAnyon:
      return gamma_a_ * n_sites_;
    case Category::kField:
      return gamma_f_ * n_cells_;
  }
  return 0.0;
}

EventSampler::Event EventSampler::draw(Rng& rng) const {
  // One uniform picks both the category and the element inside it.
  const double u = uniform01(rng) * total_;
  auto pick = [](double offset, double rate, std::size_t n) {
    return std::min(static_cast<std::size_t>(offset / rate), n - 1);
  };
  if (u < cut_m_) return {Category::kFlip, pick(u, gamma_x_, n_edges_)};
  if (u < cut_a_) {
    return {Category::kMeasure, pick(u - cut_m_, gamma_m_, n_sites_)};
  }
  if (u < cut_f_) {
    return {Category::kAnyon, pick(u - cut_a_, gamma_a_, n_sites_)};
  }
  return {Category::kField, pick(u - cut_f_, gamma_f_, n_cells_)};
}

SurvivalRecord run_asynchronous(const DecoderParams& params, double p,
                                double q, double cap, std::uint64_t seed,
                                EventCounts* counts) {
  DecoderParams async = params;
  async.field = FieldModel::automaton();
  async.validate();
  check_probabilities(p, q);
  const auto start = std::chrono::steady_clock::now();
  SimulationState state(async.L, async.field_height(), seed);
  Verifier verifier(async, seed);
  const EventSampler sampler(async);
  const double rate = sampler.total_rate();
  SurvivalRecord rec = base_record(Mode::kAsynchronous, async, p, q, seed);
  rec.censored = true;
  rec.failure_time = cap;

  std::exponential_distribution<double> waiting(rate);
  std::uint64_t events = 0;
  double next_check = async.verify_stride;
  while (next_check <= cap) {
    // Deterministic mode advances by exactly 1 / rate per event.
    while (true) {
      if (async.exponential_waiting) {
        if (state.clock >= next_check) break;
      } else if (static_cast<double>(events) >= next_check * rate) {
        break;
      }
      const auto ev = sampler.draw(state.rng);
      switch (ev.category) {
        case EventSampler::Category::kFlip:
          local_flip(state, ev.index, p);
          if (counts) ++counts->flip;
          break;
        case EventSampler::Category::kMeasure:
          local_measure(state, ev.index, q);
          if (counts) ++counts->measure;
          break;
        case EventSampler::Category::kAnyon:
          local_anyon_update(state, ev.index, state.field.plane());
          if (counts) ++counts->anyon;
          break;
        case EventSampler::Category::kField:
          local_field_update(state.field, ev.index, state.recorded());
          if (counts) ++counts->field;
          break;
      }
      ++events;
      if (async.exponential_waiting) {
        state.clock += waiting(state.rng);
      } else {
        state.clock = static_cast<double>(events) / rate;
      }
    }
    if (verifier.failed(state.config, state.true_syndrome())) {
      rec.censored = false;
      rec.failure_time = next_check;
      break;
    }
    next_check += async.verify_stride;
  }
  rec.wall_time = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - start)
                      .count();
  return rec;
}

double bare_qubit_baseline(double p) {
  if (!(p > 0.0) || p > 1.0) {
    throw std::invalid_argument(
        "bare qubit lifetime is unbounded for p <= 0 (need 0 < p <= 1)");
  }
  return 1.0 / p;
}

std::uint64_t derive_seed(std::uint64_t master, const CellSpec& cell,
                          std::uint64_t trial) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ static_cast<std::uint64_t>(cell.mode));
  h = splitmix64(h ^ static_cast<std::uint64_t>(cell.params.L));
  h = splitmix64(h ^ std::bit_cast<std::uint64_t>(cell.p));
  h = splitmix64(h ^ std::bit_cast<std::uint64_t>(cell.q));
  if (cell.mode == Mode::kExplicit) {
    h = splitmix64(h ^ std::bit_cast<std::uint64_t>(cell.params.field.alpha));
  }
  return splitmix64(h ^ trial);
}

SurvivalRecord run_trial(const CellSpec& cell, std::uint64_t trial,
                         std::uint64_t master_seed) {
  const std::uint64_t seed = derive_seed(master_seed, cell, trial);
  SurvivalRecord rec;
  switch (cell.mode) {
    case Mode::kSynchronous:
      rec = run_synchronous(cell.params, cell.p, cell.q, cell.cap, seed);
      break;
    case Mode::kAsynchronous:
      rec = run_asynchronous(cell.params, cell.p, cell.q, cell.cap, seed);
      break;
    case Mode::kExplicit:
      rec = run_explicit(cell.params, cell.p, cell.q, cell.cap, seed);
      break;
    case Mode::kToom:
      rec = toom_survival(cell.params.L, cell.p, cell.cap, seed);
      break;
    case Mode::kStatic: {
      const auto start = std::chrono::steady_clock::now();
      const StaticResult res = run_static(
          cell.params, cell.p, static_cast<int>(cell.cap), seed);
      rec = base_record(Mode::kStatic, cell.params, cell.p, 0.0, seed);
      rec.success = res.success;
      rec.censored = res.timeout;
      rec.failure_time = std::max(1, res.rounds);
      rec.wall_time = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start)
                          .count();
      break;
    }
  }
  rec.trial = trial;
  return rec;
}

void validate_cell(const CellSpec& cell) {
  if (!(cell.cap >= 1.0)) {
    throw std::invalid_argument("cap must be at least one step");
  }
  if (cell.mode == Mode::kToom) {
    if (cell.params.L < 1) throw std::invalid_argument("L must be positive");
    if (!(cell.p >= 0.0 && cell.p < 0.5)) {
      throw std::invalid_argument("toom noise_p must lie in [0, 0.5)");
    }
    return;
  }
  cell.params.validate();
  check_probabilities(cell.p, cell.q);
  if (cell.mode == Mode::kExplicit &&
      cell.params.field.kind != FieldModel::Kind::kExplicit) {
    throw std::invalid_argument("explicit mode needs an explicit field model");
  }
}

std::vector<SurvivalRecord> run_trials(
    const CellSpec& cell, std::size_t n, std::uint64_t master_seed,
    int workers, const std::vector<std::uint64_t>& done,
    const std::function<void(const SurvivalRecord&)>& on_record) {
  validate_cell(cell);
  std::vector<std::uint64_t> todo;
  for (std::uint64_t t = 0; t < n; ++t) {
    if (std::find(done.begin(), done.end(), t) == done.end()) {
      todo.push_back(t);
    }
  }
  std::vector<SurvivalRecord> out(todo.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr error;
  std::mutex mu;
  auto work = [&] {
    for (std::size_t i = next++; i < todo.size() && !stop; i = next++) {
      try {
        out[i] = run_trial(cell, todo[i], master_seed);
        if (on_record) {
          std::lock_guard<std::mutex> lock(mu);
          on_record(out[i]);
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!error) error = std::current_exception();
        stop = true;
      }
    }
  };
  const int n_threads =
      std::max(1, std::min<int>(workers, static_cast<int>(todo.size())));
  if (n_threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(work);
  }
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace phidec
