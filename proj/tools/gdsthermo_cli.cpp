// Command-line front end: build detailed-balance noise models, evolve
// Gaussian moments, audit thermal equilibrium, sweep temperature, and compare
// against the truncated Fock-space oracle.

#include "gdsthermo/gdsthermo.hpp"
#include "gdsthermo/model_io.hpp"

#include "CLI11.hpp"

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

namespace {

using namespace gdsthermo;

constexpr int kExitOk = 0;
constexpr int kExitSemantic = 1;
constexpr int kExitInput = 2;

double audit_tolerance() {
    if (const char* env = std::getenv("GDS_THERMO_TOL")) {
        char* end = nullptr;
        const double v = std::strtod(env, &end);
        if (end != env && v > 0.0) return v;
        std::cerr << "warning: ignoring malformed GDS_THERMO_TOL\n";
    }
    return kDefaultTol;
}

void write_text(const std::string& path, const std::string& text) {
    if (path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw ModelError("<output>", "cannot open " + path);
    out << text;
}

std::string csv_num(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

json report_header(const std::string& command, const ModelFile& m,
                   double tol) {
    json j;
    j["schema"] = "gdsthermo-report-v1";
    j["command"] = command;
    j["n"] = m.qdbc.thermal.n;
    j["hbar"] = m.qdbc.thermal.hbar;
    j["beta"] = m.qdbc.thermal.beta;
    j["tolerance"] = tol;
    return j;
}

int cmd_build(const std::string& modelPath, const std::string& outPath) {
    const ModelFile m = load_model(modelPath);
    const double tol = audit_tolerance();
    json rep = report_header("build", m, tol);

    if (m.qdbc.diffusive) {
        const auto lim = limit_regimes(m.qdbc, Regime::diffusive);
        rep["regime"] = "diffusive";
        rep["D"] = mat_to_json(lim.D);
        rep["C"] = mat_to_json(lim.C);
        rep["spectral_abscissa"] = lim.spectral_abscissa;
        rep["stationary"] = lim.stationary;
        rep["note"] = lim.note;
        write_text(outPath, rep.dump(2) + "\n");
        return kExitOk;
    }

    const auto nm = build_noise(m.qdbc);
    const auto ls = build_lindblad_vectors(m.qdbc);
    const auto qome = qome_coefficients(m.qdbc);
    const auto prof = thermal_covariance(m.qdbc.thermal);
    const auto audit = theorem1_audit(nm, prof.V_th, tol);
    const auto fd = fluctuation_dissipation_check(nm);

    rep["regime"] = "thermal";
    rep["D"] = mat_to_json(nm.D);
    rep["C"] = mat_to_json(nm.C);
    rep["Gamma"] = cmat_to_json(nm.Gamma);
    json lvs = json::array();
    for (const auto& l : ls.vectors) lvs.push_back(cvec_to_json(l));
    rep["lindblad_vectors"] = lvs;
    rep["V_th"] = mat_to_json(prof.V_th);
    rep["qome"] = {{"omega", vec_to_json(qome.omega)},
                   {"nbar", vec_to_json(qome.nbar)},
                   {"gamma", vec_to_json(qome.gamma)},
                   {"gain", vec_to_json(qome.gain)},
                   {"loss", vec_to_json(qome.loss)}};
    rep["fluctuation_dissipation"] = {{"pass", fd.pass},
                                      {"min_eig", fd.min_eig}};
    rep["audit"] = {{"verdict", audit.verdict},
                    {"comm_JD_JC", audit.comm_JD_JC},
                    {"comm_JV_JD", audit.comm_JV_JD},
                    {"comm_JV_JC", audit.comm_JV_JC},
                    {"lyapunov_residual", audit.lyapunov_residual},
                    {"closed_form_residual", audit.closed_form_residual},
                    {"closed_form_applicable", audit.closed_form_applicable}};
    write_text(outPath, rep.dump(2) + "\n");
    return (audit.verdict && fd.pass) ? kExitOk : kExitSemantic;
}

int cmd_evolve(const std::string& modelPath, const std::string& outPath,
               double v0, std::vector<double> mean0, double tmax, double dt,
               double sampleDt, bool allowNonstationary) {
    if (dt <= 0.0 || tmax < 0.0 || sampleDt <= 0.0 || v0 <= 0.0)
        throw ModelError("<args>", "tmax/dt/sample-dt/v0 must be positive");
    const ModelFile m = load_model(modelPath);
    const int n = m.qdbc.thermal.n;
    if (!mean0.empty() && static_cast<int>(mean0.size()) != 2 * n)
        throw ModelError("<args>", "--mean0 needs 2n components");

    NoiseMatrices nm;
    if (m.qdbc.diffusive) {
        const auto lim = limit_regimes(m.qdbc, Regime::diffusive);
        nm.D = lim.D;
        nm.C = lim.C;
        nm.hbar = m.qdbc.thermal.hbar;
        nm.Gamma = (nm.D / nm.hbar).cast<Complex>();
    } else {
        nm = noise_from_spec(m.to_gds());
    }
    GdsSpec g = m.to_gds();
    const Mat A = drift_matrix(g, nm);
    const auto hw = is_hurwitz(A);
    if (!hw.hurwitz && !allowNonstationary) {
        std::cerr << "no stationary state: spectral abscissa "
                  << hw.abscissa << "\n";
        return kExitSemantic;
    }

    Vec mState = Vec::Zero(2 * n);
    for (size_t i = 0; i < mean0.size(); ++i) mState(i) = mean0[i];
    Mat V = v0 * Mat::Identity(2 * n, 2 * n);

    std::ostringstream os;
    os << "# gdsthermo-traj-v1\n";
    os << "t";
    for (int i = 0; i < 2 * n; ++i) os << ",mean" << i;
    for (int i = 0; i < 2 * n; ++i)
        for (int j = i; j < 2 * n; ++j) os << ",V" << i << "_" << j;
    os << ",kappa_min\n";

    const int samples = std::max(1, static_cast<int>(std::round(tmax / sampleDt)));
    const double h = tmax / samples;
    Vec mm = mState;
    Mat VV = V;
    for (int s = 0; s <= samples; ++s) {
        const double t = s * h;
        os << csv_num(t);
        for (int i = 0; i < 2 * n; ++i) os << "," << csv_num(mm(i));
        for (int i = 0; i < 2 * n; ++i)
            for (int j = i; j < 2 * n; ++j) os << "," << csv_num(VV(i, j));
        os << "," << csv_num(symplectic_spectrum(VV).minCoeff()) << "\n";
        if (s < samples) {
            mm = evolve_mean(A, g.xi_prime, mm, h, dt);
            VV = evolve_cov(A, nm.D, VV, h, g.hbar, dt);
        }
    }
    write_text(outPath, os.str());
    return kExitOk;
}

int cmd_audit(const std::string& modelPath, const std::string& outPath) {
    const ModelFile m = load_model(modelPath);
    const double tol = audit_tolerance();
    json rep = report_header("audit", m, tol);

    if (m.qdbc.diffusive) {
        rep["verdict"] = false;
        rep["note"] = "diffusive regime has no thermal equilibrium";
        write_text(outPath, rep.dump(2) + "\n");
        return kExitSemantic;
    }
    const GdsSpec g = m.to_gds();
    const auto nm = noise_from_spec(g);
    const auto prof = thermal_covariance(m.qdbc.thermal);
    const auto audit = theorem1_audit(nm, prof.V_th, tol);
    rep["audit"] = {{"verdict", audit.verdict},
                    {"comm_JD_JC", audit.comm_JD_JC},
                    {"comm_JV_JD", audit.comm_JV_JD},
                    {"comm_JV_JC", audit.comm_JV_JC},
                    {"lyapunov_residual", audit.lyapunov_residual},
                    {"closed_form_residual", audit.closed_form_residual},
                    {"closed_form_applicable", audit.closed_form_applicable}};
    rep["congruence_defect"] = verify_congruence(nm, m.qdbc.thermal);
    bool verdict = audit.verdict && rep["congruence_defect"].get<double>() <= tol;

    if (!m.lindblad_vectors) {
        // canonical vectors: also check the eigenoperator structure
        const auto ls = build_lindblad_vectors(m.qdbc);
        const auto er = verify_eigenoperators(ls, m.qdbc.thermal);
        rep["eigenoperator_residuals"] = vec_to_json(er.residuals);
        rep["ratio_defects"] = vec_to_json(er.ratio_defects);
        verdict = verdict && er.residuals.maxCoeff() <= tol &&
                  er.ratio_defects.maxCoeff() <= tol;
    }
    rep["verdict"] = verdict;
    write_text(outPath, rep.dump(2) + "\n");
    return verdict ? kExitOk : kExitSemantic;
}

int cmd_sweep(const std::string& modelPath, const std::string& outPath,
              double betaMin, double betaMax, int points, int jobs) {
    if (betaMin <= 0.0 || betaMax < betaMin || points < 2 || jobs < 1)
        throw ModelError("<args>",
                         "need 0 < beta-min <= beta-max, points >= 2, jobs >= 1");
    const ModelFile m = load_model(modelPath);
    if (m.qdbc.diffusive)
        throw ModelError("regime", "sweep needs a thermal model");
    const int n = m.qdbc.thermal.n;

    std::vector<std::string> rows(points);
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= points) return;
            const double f = static_cast<double>(i) / (points - 1);
            QdbcSpec qs = m.qdbc;
            qs.thermal.beta =
                betaMin * std::pow(betaMax / betaMin, f);
            const auto prof = thermal_covariance(qs.thermal);
            const auto nm = build_noise(qs);
            std::ostringstream os;
            os << csv_num(qs.thermal.beta);
            for (int jm = 0; jm < n; ++jm) os << "," << csv_num(prof.k_th(jm));
            os << "," << csv_num(nm.D.norm()) << "," << csv_num(nm.C.norm());
            double hi = 0.0, lo = 0.0;
            for (int jm = 0; jm < n; ++jm) {
                const double x =
                    qs.thermal.hbar * qs.thermal.beta * prof.w(jm);
                hi = std::max(hi, std::abs(x * prof.k_th(jm) - 1.0));
                lo = std::max(lo, prof.k_th(jm) - 0.5);
            }
            os << "," << csv_num(hi) << "," << csv_num(lo);
            rows[i] = os.str();
        }
    };
    std::vector<std::thread> pool;
    const int nw = std::min(jobs, points);
    for (int k = 0; k < nw; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    std::ostringstream os;
    os << "# gdsthermo-sweep-v1\n";
    os << "beta";
    for (int jm = 0; jm < n; ++jm) os << ",k_th" << jm;
    os << ",D_norm,C_norm,high_T_residual,low_T_residual\n";
    for (const auto& r : rows) os << r << "\n";
    write_text(outPath, os.str());
    return kExitOk;
}

int cmd_oracle(const std::string& modelPath, const std::string& outPath,
               int cutoff, double tmax, double dt, bool experimental) {
    if (cutoff < 2 || tmax <= 0.0 || dt <= 0.0)
        throw ModelError("<args>", "cutoff/tmax/dt must be positive");
    const ModelFile m = load_model(modelPath);
    if (m.qdbc.diffusive)
        throw ModelError("regime", "oracle needs a thermal model");
    const int n = m.qdbc.thermal.n;
    if (n > 1 && !experimental)
        throw ModelError("n", "multimode oracle runs need --experimental");

    const double tol = audit_tolerance();
    const GdsSpec g = m.to_gds();
    const auto nm = noise_from_spec(g);
    const auto prof = thermal_covariance(m.qdbc.thermal);

    const auto ops =
        build_canonical_ops(n, cutoff, m.qdbc.thermal.hbar); // enforces budget
    const double nbarMax =
        1.0 / std::expm1(m.qdbc.thermal.hbar * m.qdbc.thermal.beta *
                         prof.w.minCoeff());
    if (cutoff < 20.0 * (nbarMax + 1.0))
        std::cerr << "warning: cutoff " << cutoff
                  << " is below the 20(nbar+1) rule of thumb\n";

    const Mat J = standard_form(n);
    CMat Heff = build_hamiltonian(g.B_prime, ops);
    const auto Xv = quadrature_vector(ops);
    const Vec jxi = J * g.xi_prime;
    for (int i = 0; i < 2 * n; ++i)
        if (jxi(i) != 0.0) Heff += jxi(i) * Xv[i];
    const auto Ls = build_lindblad_ops(g.lindblad_vectors, ops);
    const LindbladGenerator gen(Heff, Ls, g.hbar);

    // Gaussian side
    const Mat A = drift_matrix(g, nm);
    CVec alpha(n);
    for (int j = 0; j < n; ++j) alpha(j) = Complex(0.7, 0.4);
    const CMat rho0 = coherent_state(ops, alpha);
    const Vec m0 = extract_mean(rho0, ops);
    const Mat V0 = extract_cov(rho0, ops);

    OracleConfig cfg;
    cfg.dt = dt;
    cfg.t_max = tmax;
    const auto traj = integrate_moments(rho0, gen, ops, cfg);
    double worst = 0.0;
    for (size_t s = 0; s < traj.times.size(); ++s) {
        const double t = traj.times[s];
        const Vec mg = evolve_mean(A, g.xi_prime, m0, t);
        const Mat Vg = evolve_cov(A, nm.D, V0, t, g.hbar);
        worst = std::max(worst, (traj.means[s] - mg).cwiseAbs().maxCoeff());
        worst = std::max(worst, (traj.covs[s] - Vg).cwiseAbs().maxCoeff());
    }

    const CMat H = build_hamiltonian(m.qdbc.thermal.B, ops);
    const CMat gibbs = gibbs_state(H, m.qdbc.thermal.beta);
    const double gibbsResidual = gen.schrodinger(gibbs).norm();
    const CMat sigmaBar = gibbs_state(H, m.qdbc.thermal.beta, false);
    const double gnsDefect =
        detailed_balance_defect(gen, sigmaBar, monomial_basis(ops));

    json rep = report_header("oracle", m, tol);
    rep["cutoff"] = cutoff;
    rep["max_moment_deviation"] = worst;
    rep["gibbs_residual"] = gibbsResidual;
    rep["gns_defect"] = gnsDefect;
    const bool verdict =
        worst <= 1e-4 && gibbsResidual <= 1e-5 && gnsDefect <= 1e-6;
    rep["verdict"] = verdict;
    write_text(outPath, rep.dump(2) + "\n");
    return verdict ? kExitOk : kExitSemantic;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gaussian semigroup thermalization toolkit"};
    app.require_subcommand(1);

    std::string model, out = "-";
    double v0 = 0.5, tmax = 10.0, dt = 1e-3, sampleDt = 0.1;
    std::vector<double> mean0;
    bool allowNonstationary = false, experimental = false;
    double betaMin = 0.1, betaMax = 10.0;
    int points = 25, jobs = 1, cutoff = 40;

    auto* build = app.add_subcommand("build", "Synthesize noise matrices and Lindblad vectors");
    build->add_option("model", model, "model JSON file")->required();
    build->add_option("-o,--output", out, "output path or - for stdout");

    auto* evolve = app.add_subcommand("evolve", "Integrate Gaussian moment dynamics to CSV");
    evolve->add_option("model", model)->required();
    evolve->add_option("-o,--output", out);
    evolve->add_option("--v0", v0, "initial covariance scale (V0 = v0 I)");
    evolve->add_option("--mean0", mean0, "initial mean (2n numbers)")->delimiter(',');
    evolve->add_option("--tmax", tmax);
    evolve->add_option("--dt", dt);
    evolve->add_option("--sample-dt", sampleDt);
    evolve->add_flag("--allow-nonstationary", allowNonstationary);

    auto* audit = app.add_subcommand("audit", "Thermal-equilibrium audit report");
    audit->add_option("model", model)->required();
    audit->add_option("-o,--output", out);

    auto* sweep = app.add_subcommand("sweep", "Temperature sweep to CSV");
    sweep->add_option("model", model)->required();
    sweep->add_option("-o,--output", out);
    sweep->add_option("--beta-min", betaMin);
    sweep->add_option("--beta-max", betaMax);
    sweep->add_option("--points", points);
    sweep->add_option("-j,--jobs", jobs);

    auto* oracle = app.add_subcommand("oracle", "Truncated Fock-space comparison");
    oracle->add_option("model", model)->required();
    oracle->add_option("-o,--output", out);
    oracle->add_option("--cutoff", cutoff);
    oracle->add_option("--tmax", tmax);
    oracle->add_option("--dt", dt)->default_val(2e-3);
    oracle->add_flag("--experimental", experimental);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (build->parsed()) return cmd_build(model, out);
        if (evolve->parsed())
            return cmd_evolve(model, out, v0, mean0, tmax, dt, sampleDt,
                              allowNonstationary);
        if (audit->parsed()) return cmd_audit(model, out);
        if (sweep->parsed())
            return cmd_sweep(model, out, betaMin, betaMax, points, jobs);
        if (oracle->parsed())
            return cmd_oracle(model, out, cutoff, tmax, dt, experimental);
    } catch (const gdsthermo::ModelError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
