// Command-line front end: channel builders, the certification pipeline,
// game simulation under loss, witness decomposition and tomography.
#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "qmcert/io.hpp"
#include "qmcert/sampling.hpp"

using namespace qmcert;
using io::json;

namespace {

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty() || out_path == "-")
    std::cout << content;
  else
    io::write_text_file(out_path, content);
}

InputFamily parse_family(const std::string& name) {
  if (name == "standard") return InputFamily::Standard;
  if (name == "tetrahedral") return InputFamily::Tetrahedral;
  throw CLI::ValidationError("--family must be standard or tetrahedral");
}

int run_make_channel(const std::string& kind, double param, int dim, int dim_out,
                     std::uint64_t seed, const std::string& out_path) {
  QuantumChannel channel = [&] {
    if (kind == "depolarizing") return depolarizing_channel(param);
    if (kind == "erasure") return erasure_channel(param, dim);
    if (kind == "identity") return identity_channel(dim);
    if (kind == "measure-prepare") {
      sample::Rng rng(seed);
      return sample::eb_channel(rng, dim, dim_out > 0 ? dim_out : dim);
    }
    throw CLI::ValidationError("unknown channel kind: " + kind);
  }();
  emit(out_path, io::channel_to_json(channel).dump(2) + "\n");
  return 0;
}

int run_certify(const std::string& channel_path, const std::string& family,
                bool sparse, const std::string& game_path) {
  auto start = std::chrono::steady_clock::now();
  QuantumChannel channel = io::channel_from_json(io::read_json_file(channel_path));
  CertificationOptions options;
  options.family = parse_family(family);
  options.sparse = sparse;
  CertificationResult result = certify(channel, options);
  if (result.game && !game_path.empty())
    io::write_text_file(game_path, io::game_to_json(*result.game).dump(2) + "\n");
  auto elapsed = std::chrono::duration<double, std::milli>(
                     std::chrono::steady_clock::now() - start)
                     .count();
  json report{{"channel", json{{"dA", channel.dA},
                               {"dB", channel.dB},
                               {"source", channel_path}}},
              {"ppt_min_eigenvalue", result.ppt.min_eigenvalue},
              {"verdict",
               result.verdict == CertVerdict::Certified ? "Certified" : "NotCertified"}};
  if (result.verdict == CertVerdict::Certified) report["payoff"] = result.payoff;
  if (!result.note.empty()) report["note"] = result.note;
  if (!game_path.empty() && result.game) report["game_path"] = game_path;
  report["timing_ms"] = elapsed;
  std::cout << report.dump(2) << "\n";
  return result.verdict == CertVerdict::Certified ? 0 : 2;
}

int run_simulate(const std::string& channel_path, const std::string& game_path,
                 std::optional<double> eta, const std::string& out_path) {
  QuantumChannel channel = io::channel_from_json(io::read_json_file(channel_path));
  Game game = io::game_from_json(io::read_json_file(game_path));
  if (game.scenario.dX() != channel.dA || game.scenario.dY() != channel.dB)
    throw std::invalid_argument("simulate: game/channel dimension mismatch");
  POVM measurement = game.scenario.outcome_count == channel.dB * channel.dB
                         ? bell_povm(channel.dB)
                         : partial_bell_povm(channel.dB);
  if (measurement.size() != game.scenario.outcome_count)
    throw std::invalid_argument("simulate: unsupported outcome count " +
                                std::to_string(game.scenario.outcome_count));
  Correlation corr;
  corr.first_label = 1;
  const int nx = static_cast<int>(game.scenario.inputs_x.size());
  const int ny = static_cast<int>(game.scenario.inputs_y.size());
  for (int b = 0; b < measurement.size(); ++b) {
    Eigen::MatrixXd grid(nx, ny);
    for (int x = 0; x < nx; ++x) {
      Matrix out = apply_kraus(channel.kraus, game.scenario.inputs_x[x].rho);
      for (int y = 0; y < ny; ++y)
        grid(x, y) = frobenius_inner(measurement.elements[b],
                                     kron(out, game.scenario.inputs_y[y].rho))
                         .real();
    }
    corr.p.push_back(std::move(grid));
  }
  corr.validate();
  double payoff;
  std::ostringstream csv;
  if (eta) {
    auto [lossy_game, lossy_corr] = loss_extend(game, corr, *eta);
    payoff = expected_payoff(lossy_game, lossy_corr);
    io::correlation_to_csv(lossy_corr, csv);
  } else {
    payoff = expected_payoff(game, corr);
    io::correlation_to_csv(corr, csv);
  }
  emit(out_path, csv.str());
  std::ostream& msg = (out_path.empty() || out_path == "-") ? std::cerr : std::cout;
  msg << "payoff " << io::format_double(payoff) << "\n";
  return 0;
}

int run_decompose(const std::string& witness_path, const std::string& mode,
                  const std::string& family, const std::string& out_path) {
  json spec = io::read_json_file(witness_path);
  Matrix m = io::matrix_from_json(spec.contains("matrix") ? spec.at("matrix") : spec, "witness");
  BipartiteDims dims(spec.at("dX").get<int>(), spec.at("dY").get<int>());
  Witness witness(std::move(m), dims);
  SparseDecomposition dec;
  if (mode == "sparse") {
    dec = sparse_decompose(witness);
  } else if (mode == "tomographic") {
    InputFamily fam = parse_family(family);
    auto make = [&](int d) {
      if (fam == InputFamily::Tetrahedral) {
        if (d != 2) throw std::invalid_argument("tetrahedral family is qubit-only");
        return tetrahedral_family();
      }
      return standard_family(d);
    };
    dec = tomographic_decompose(witness, make(dims.dX), make(dims.dY));
  } else {
    throw CLI::ValidationError("--mode must be sparse or tomographic");
  }
  emit(out_path, io::decomposition_to_json(dec).dump(2) + "\n");
  double residual = (dec.reconstruct() - witness.w).norm();
  std::ostream& msg = (out_path.empty() || out_path == "-") ? std::cerr : std::cout;
  msg << "nonzero_count " << dec.nonzero_count() << "\n";
  msg << "residual " << io::format_double(residual) << "\n";
  return 0;
}

int run_tomography(const std::string& csv_path, const std::string& scenario_path,
                   const std::string& out_path) {
  std::ifstream csv(csv_path);
  if (!csv) throw std::invalid_argument("cannot open " + csv_path);
  Correlation corr = io::correlation_from_csv(csv);
  json spec = io::read_json_file(scenario_path);
  std::vector<DensityMatrix> xs, ys;
  for (const auto& s : spec.at("inputs_x")) xs.push_back(io::state_from_json(s));
  for (const auto& s : spec.at("inputs_y")) ys.push_back(io::state_from_json(s));
  SignatureScenario scenario(std::move(xs), std::move(ys), bell_povm(
      static_cast<int>(std::lround(std::sqrt(double(spec.at("inputs_y").size()))))));
  ChoiOperator choi = reconstruct_choi(corr, scenario);
  json out{{"dA", scenario.dX()},
           {"dB", scenario.dY()},
           {"choi", io::matrix_to_json(choi.matrix)}};
  emit(out_path, out.dump(2) + "\n");
  // residual of the forward map against the supplied data
  Correlation check = signature_correlation(choi_to_kraus(choi), scenario);
  double residual =
      (check.p[1 - check.first_label] - corr.p[1 - corr.first_label]).cwiseAbs().maxCoeff();
  std::ostream& msg = (out_path.empty() || out_path == "-") ? std::cerr : std::cout;
  msg << "residual " << io::format_double(residual) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semiquantum signaling-game certification of quantum channels"};
  app.require_subcommand(1);

  std::string channel_path, game_path, witness_path, csv_path, scenario_path;
  std::string out_path, family = "standard", kind, mode = "sparse";
  double param = 0.0, eta = 1.0;
  int dim = 2, dim_out = 0;
  std::uint64_t seed = 0;
  bool sparse = false;

  auto* make = app.add_subcommand("make-channel", "build a channel spec");
  make->add_option("--kind", kind, "depolarizing|erasure|measure-prepare|identity")
      ->required();
  make->add_option("--param", param, "nu for depolarizing, eta for erasure");
  make->add_option("--dim", dim, "input dimension (default 2)");
  make->add_option("--dim-out", dim_out, "output dimension for measure-prepare");
  make->add_option("--seed", seed, "seed for the randomized builders");
  make->add_option("--out", out_path, "output file (default stdout)");

  auto* cert = app.add_subcommand("certify", "run the certification pipeline");
  cert->add_option("channel", channel_path, "channel JSON ('-' for stdin)")->required();
  cert->add_option("--family", family, "input family: standard|tetrahedral");
  cert->add_flag("--sparse", sparse, "use the sparse witness decomposition");
  cert->add_option("--out", game_path, "write the certifying game JSON here");

  auto* sim = app.add_subcommand("simulate", "play a game against a channel");
  sim->add_option("channel", channel_path, "channel JSON")->required();
  sim->add_option("game", game_path, "game JSON")->required();
  sim->add_option("--eta", eta, "isotropic transmission in (0,1]");
  sim->add_option("--out", out_path, "correlation CSV output (default stdout)");

  auto* dec = app.add_subcommand("decompose", "decompose a witness into product states");
  dec->add_option("witness", witness_path, "witness JSON {dX, dY, matrix}")->required();
  dec->add_option("--mode", mode, "sparse|tomographic");
  dec->add_option("--family", family, "family for tomographic mode");
  dec->add_option("--out", out_path, "decomposition JSON output (default stdout)");

  auto* tomo = app.add_subcommand("tomography", "reconstruct a Choi matrix from game data");
  tomo->add_option("correlation", csv_path, "correlation CSV")->required();
  tomo->add_option("scenario", scenario_path, "scenario JSON {inputs_x, inputs_y}")->required();
  tomo->add_option("--out", out_path, "Choi JSON output (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (make->parsed()) return run_make_channel(kind, param, dim, dim_out, seed, out_path);
    if (cert->parsed()) return run_certify(channel_path, family, sparse, game_path);
    if (sim->parsed()) {
      std::optional<double> eta_opt;
      if (sim->count("--eta") > 0) eta_opt = eta;
      return run_simulate(channel_path, game_path, eta_opt, out_path);
    }
    if (dec->parsed()) return run_decompose(witness_path, mode, family, out_path);
    if (tomo->parsed()) return run_tomography(csv_path, scenario_path, out_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
