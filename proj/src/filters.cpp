#include "dax/filters.hpp"

#include <algorithm>
#include <string>

#include "dax/errors.hpp"
#include "dax/hashing.hpp"
#include "dax/linalg.hpp"
#include "dax/spectral.hpp"

namespace dax {

std::string method_name(Method method) {
  switch (method) {
    case Method::kSeqEnkf: return "seq-enkf";
    case Method::kFourdEnkf: return "4d-enkf";
    case Method::kQpcaEndcf: return "qpca-endcf";
  }
  return "unknown";
}

std::optional<Method> parse_method(const std::string& name) {
  if (name == "seq-enkf") return Method::kSeqEnkf;
  if (name == "4d-enkf") return Method::kFourdEnkf;
  if (name == "qpca-endcf") return Method::kQpcaEndcf;
  return std::nullopt;
}

void FilterConfig::validate() const {
  model.validate();
  if (n != model.n) throw InvalidInputError("FilterConfig: n does not match model.n");
  const ObsOperator h = ObsOperator::every_second(n);
  if (m != h.m())
    throw InvalidInputError("FilterConfig: m must equal ceil(n/2) for the every-second layout");
  if (ensemble_size < 2) throw InvalidInputError("FilterConfig: ensemble_size must be >= 2");
  if (window_len < 1) throw InvalidInputError("FilterConfig: window_len must be >= 1");
  if (n_windows < 1) throw InvalidInputError("FilterConfig: n_windows must be >= 1");
  if (!(sigma_obs > 0.0)) throw InvalidInputError("FilterConfig: sigma_obs must be positive");
  if (lambda_infl < 1.0) throw InvalidInputError("FilterConfig: lambda_infl must be >= 1");
  const int kappa_cap = std::min(m * window_len, ensemble_size - 1);
  if (kappa < 1 || kappa > kappa_cap)
    throw InvalidInputError("FilterConfig: kappa must be in [1, min(m*L, N-1)]");
}

std::vector<int> AssimilationRun::endpoint_positions() const {
  std::vector<int> pos;
  for (int i = 0; i < static_cast<int>(analysis_times.size()); ++i)
    if (analysis_times[i] % window_len == 0) pos.push_back(i);
  return pos;
}

EnsembleMatrix seq_enkf_step(const EnsembleMatrix& forecast, const Eigen::VectorXd& z,
                             const ObsOperator& h, const Eigen::MatrixXd& r,
                             double lambda_infl, RngStream& rng) {
  const int members = static_cast<int>(forecast.cols());
  const int m = h.m();
  if (z.size() != m) throw InvalidInputError("seq_enkf_step: observation length mismatch");

  const EnsembleStats sx = stats(forecast);
  const Eigen::MatrixXd zf = observe_members(h, forecast);
  const EnsembleStats sz = stats(zf);

  const Eigen::MatrixXd s = sz.covariance + r;
  Eigen::LLT<Eigen::MatrixXd> llt(s);
  if (llt.info() != Eigen::Success)
    throw InvalidInputError("seq_enkf_step: innovation covariance is not SPD");

  const Eigen::MatrixXd p_xz =
      sx.anomalies * sz.anomalies.transpose() / static_cast<double>(members - 1);
  const Eigen::MatrixXd gain = llt.solve(p_xz.transpose()).transpose();

  Eigen::LLT<Eigen::MatrixXd> r_llt(r);
  if (r_llt.info() != Eigen::Success)
    throw InvalidInputError("seq_enkf_step: observation covariance is not SPD");
  const Eigen::MatrixXd r_chol = r_llt.matrixL();

  EnsembleMatrix analysis = forecast;
  for (int j = 0; j < members; ++j) {
    const Eigen::VectorXd eps = r_chol * rng.normal_vector(m);
    analysis.col(j) += gain * (z + eps - zf.col(j));
  }
  return inflate(analysis, lambda_infl);
}

namespace {

struct WindowForecast {
  EnsembleMatrix endpoint;   // ensemble at k_w
  Eigen::MatrixXd z_stack;   // d x N stacked predicted observations
};

WindowForecast propagate_window(const EnsembleMatrix& window_initial, const ObsOperator& h,
                                const FilterConfig& cfg) {
  const int steps = cfg.model.steps_per_obs();
  const int members = static_cast<int>(window_initial.cols());
  WindowForecast wf;
  wf.endpoint = window_initial;
  wf.z_stack.resize(static_cast<Eigen::Index>(h.m()) * cfg.window_len, members);
  for (int ell = 1; ell <= cfg.window_len; ++ell) {
    for (int j = 0; j < members; ++j)
      wf.endpoint.col(j) = propagate(wf.endpoint.col(j), steps, cfg.model);
    wf.z_stack.middleRows(static_cast<Eigen::Index>(ell - 1) * h.m(), h.m()) =
        observe_members(h, wf.endpoint);
  }
  return wf;
}

}  // namespace

EnsembleMatrix fourd_enkf_window(const EnsembleMatrix& window_initial,
                                 const ObservationWindow& obs, const FilterConfig& cfg,
                                 RngStream& rng) {
  const ObsOperator h = ObsOperator::every_second(cfg.n);
  const int members = static_cast<int>(window_initial.cols());
  const int d = obs.dim();

  const WindowForecast wf = propagate_window(window_initial, h, cfg);
  const EnsembleStats sx = stats(wf.endpoint);
  const EnsembleStats sz = stats(wf.z_stack);
  const Eigen::MatrixXd p_xz =
      sx.anomalies * sz.anomalies.transpose() / static_cast<double>(members - 1);

  const Eigen::MatrixXd s = sz.covariance + obs.r_stacked();
  Eigen::LLT<Eigen::MatrixXd> llt(s);
  if (llt.info() != Eigen::Success)
    throw InvalidInputError("fourd_enkf_window: innovation covariance is not SPD");
  const Eigen::MatrixXd gain = llt.solve(p_xz.transpose()).transpose();

  const bool isotropic = !obs.r_general.has_value();
  Eigen::MatrixXd r_chol;
  if (!isotropic) {
    Eigen::LLT<Eigen::MatrixXd> r_llt(*obs.r_general);
    if (r_llt.info() != Eigen::Success)
      throw InvalidInputError("fourd_enkf_window: R^(L) is not SPD");
    r_chol = r_llt.matrixL();
  }

  EnsembleMatrix analysis = wf.endpoint;
  for (int j = 0; j < members; ++j) {
    const Eigen::VectorXd eps = isotropic
                                    ? Eigen::VectorXd(obs.sigma_obs * rng.normal_vector(d))
                                    : Eigen::VectorXd(r_chol * rng.normal_vector(d));
    analysis.col(j) += gain * (obs.stacked + eps - wf.z_stack.col(j));
  }
  return inflate(analysis, cfg.lambda_infl);
}

QpcaWindowResult qpca_endcf_window(const EnsembleMatrix& window_initial,
                                   const ObservationWindow& obs, const FilterConfig& cfg) {
  const ObsOperator h = ObsOperator::every_second(cfg.n);
  const WindowForecast wf = propagate_window(window_initial, h, cfg);

  const ResidualSet rs = residual_set(wf.z_stack, obs.stacked, obs);
  const TruncatedBasis basis = truncated_basis(rs, cfg.kappa);

  QpcaWindowResult out;
  out.effective_kappa = basis.kappa;
  if (basis.kappa == 0) {
    out.skipped = true;
    out.analysis = inflate(wf.endpoint, cfg.lambda_infl);
    return out;
  }

  const Eigen::MatrixXd delta_white = qpca_delta_white(rs, basis);
  out.projected_residual_norm = (basis.vectors.transpose() * (rs.e + delta_white)).norm();
  const Eigen::MatrixXd delta_obs = unwhiten(obs, delta_white);
  const DcGain g = dc_gain(wf.endpoint, wf.z_stack, cfg.gain);
  out.analysis = inflate(wf.endpoint + g.gain * delta_obs, cfg.lambda_infl);
  return out;
}

AssimilationRun run_filter(const FilterConfig& cfg, const EnsembleMatrix& initial_ensemble,
                           const std::vector<Eigen::VectorXd>& observations) {
  cfg.validate();
  const int total = cfg.total_obs_times();
  if (static_cast<int>(observations.size()) != total)
    throw InvalidInputError("run_filter: observation count must equal W*L");
  if (initial_ensemble.rows() != cfg.n || initial_ensemble.cols() != cfg.ensemble_size)
    throw InvalidInputError("run_filter: initial ensemble has the wrong shape");

  const ObsOperator h = ObsOperator::every_second(cfg.n);
  const Eigen::MatrixXd r =
      cfg.sigma_obs * cfg.sigma_obs * Eigen::MatrixXd::Identity(cfg.m, cfg.m);

  RngStream rng(cfg.seed);
  Fnv1a hasher;
  AssimilationRun run;
  run.method = cfg.method;
  run.window_len = cfg.window_len;

  EnsembleMatrix x = initial_ensemble;
  int current_k = 0;
  try {
    if (cfg.method == Method::kSeqEnkf) {
      const int steps = cfg.model.steps_per_obs();
      for (int k = 1; k <= total; ++k) {
        current_k = k;
        for (int j = 0; j < cfg.ensemble_size; ++j)
          x.col(j) = propagate(x.col(j), steps, cfg.model);
        const Eigen::VectorXd& z = observations[k - 1];
        hasher.add_vector(z);
        x = seq_enkf_step(x, z, h, r, cfg.lambda_infl, rng);
        run.analysis_times.push_back(k);
        run.analyses.push_back(x);
      }
    } else {
      for (int w = 1; w <= cfg.n_windows; ++w) {
        const int k0 = (w - 1) * cfg.window_len;
        current_k = w * cfg.window_len;
        std::vector<Eigen::VectorXd> slice(observations.begin() + k0,
                                           observations.begin() + k0 + cfg.window_len);
        for (const auto& z : slice) hasher.add_vector(z);
        const ObservationWindow window = stack_window(slice, cfg.sigma_obs);
        if (cfg.method == Method::kFourdEnkf) {
          x = fourd_enkf_window(x, window, cfg, rng);
        } else {
          QpcaWindowResult res = qpca_endcf_window(x, window, cfg);
          x = std::move(res.analysis);
          run.qpca_projected_residuals.push_back(res.projected_residual_norm);
          run.qpca_effective_kappa.push_back(res.effective_kappa);
        }
        run.analysis_times.push_back(w * cfg.window_len);
        run.analyses.push_back(x);
      }
    }
  } catch (const DivergenceError&) {
    run.diverged = true;
    run.diverged_at = current_k;
  }

  run.perturbation_draws = rng.draw_count();
  run.obs_hash = hasher.value();
  return run;
}

}  // namespace dax
