// Copyright 2026 The sable-he Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <CLI11.hpp>

#include <iostream>

#include "sable/cli.hpp"

namespace {

template <typename T>
void opt_value(CLI::App* app, const std::string& name, std::optional<T>& slot, const std::string& help) {
  app->add_option_function<T>(name, [&slot](const T& v) { slot = v; }, help);
}

}  // namespace

int main(int argc, char** argv) {
  using namespace sable;
  CLI::App app{"Homomorphic trimmed-sum aggregation and robust DSGD simulation"};
  app.require_subcommand(1);
  std::optional<unsigned> threads;
  opt_value(&app, "--threads", threads, "worker threads for slot-wise evaluation");

  cli::ParamsOptions po;
  auto* p = app.add_subcommand("params", "search (m, p) for an encoding");
  p->add_option("--N", po.N, "digits per slot (ord_m(p))");
  p->add_option("--min-d", po.min_d, "minimum slots per vector");
  opt_value(p, "--B", po.B, "digit base");
  p->add_option("--n", po.n, "number of aggregated inputs")->required();
  p->add_option("--f", po.f, "trimmed inputs per side");
  opt_value(p, "--delta", po.delta, "signed bit width of the values");
  opt_value(p, "--range", po.range, "values lie in [0, range)");
  opt_value(p, "--offset", po.offset, "offset added before encoding");
  p->add_option("--max-m", po.max_m);
  p->add_option("--max-p", po.max_p);

  cli::AggOptions ao;
  auto* a = app.add_subcommand("agg", "aggregate integer vectors through the slot circuit");
  a->add_option("--input", ao.input, "CSV, one vector per line")->required();
  a->add_option("--op", ao.op, "hts | hmed")->check(CLI::IsMember({"hts", "hmed"}));
  opt_value(a, "--f", ao.f, "trimmed inputs per side (hts)");
  a->add_option("--B", ao.B);
  a->add_option("--N", ao.N);
  opt_value(a, "--p", ao.p, "plaintext prime");
  opt_value(a, "--m", ao.m, "cyclotomic index");
  a->add_option("--offset", ao.offset);
  a->add_flag("--oracle", ao.oracle, "compare with the plaintext aggregator");
  a->add_option("--out", ao.out);

  cli::BenchOptions bo;
  auto* b = app.add_subcommand("bench", "depth and operation counts of one hts circuit");
  b->add_option("--n", bo.n)->required();
  opt_value(b, "--f", bo.f, "default floor((n-1)/2)");
  b->add_option("--B", bo.B);
  b->add_option("--N", bo.N);
  b->add_option("--p", bo.p);
  opt_value(b, "--m", bo.m, "cyclotomic index (default: smallest with ord_m(p) = N)");

  std::string config_path;
  std::string out_path;
  auto* t = app.add_subcommand("train", "run one experiment and write its metrics CSV");
  t->add_option("--config", config_path)->required()->check(CLI::ExistingFile);
  t->add_option("--out", out_path, "CSV path, '-' for stdout")->required();

  std::string sweep_config;
  std::string key;
  std::string values;
  std::string out_dir;
  auto* s = app.add_subcommand("sweep", "repeat train over values of one config key");
  s->add_option("--config", sweep_config)->required()->check(CLI::ExistingFile);
  s->add_option("--key", key)->required();
  s->add_option("--values", values, "comma separated")->required();
  s->add_option("--out-dir", out_dir)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : cli::Usage;
  }

  try {
    if (threads) ao.threads = *threads;
    if (*p) return cli::params(po, std::cout);
    if (*a) return cli::agg(ao, std::cout, std::cerr);
    if (*b) return cli::bench(bo, std::cout);
    if (*t) return cli::train(KeyValueConfig::from_file(config_path), out_path, std::cout, std::cerr, threads);
    if (*s) {
      return cli::sweep(KeyValueConfig::from_file(sweep_config), key, split_list(values), out_dir, std::cout,
                        std::cerr, threads);
    }
  } catch (const InvariantError& e) {
    std::cerr << "invariant violated: " << e.what() << "\n";
    return cli::Invariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::Usage;
  }
  return cli::Usage;
}
