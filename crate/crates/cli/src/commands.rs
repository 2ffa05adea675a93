use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fs;
use std::io::Write;
use std::path::Path;

use clap::ValueEnum;
use mubgme::campaign::{run_campaign, CampaignClass, CampaignReport};
use mubgme::correlations::{
    certify_with_basis_search, closed_form, i3, i4, i_m_bipartite, i_value_oracle, joint_probability,
    lbps_quadripartite, lbps_tripartite, outcome_distribution, IndexPattern, LbpsPatternSet,
};
use mubgme::locc::{build_povm, completeness_residual, sweep_with, Party};
use mubgme::measures::{global_q, triangle_tau};
use mubgme::mub::{best_family, fourier_pair, qubit_mub_triple, MubFamily};
use mubgme::states::{acin_canonical, bell, ghz3, ghz4, psi_lambda, random_pure, w3, wg4, zero_product, StateFile};
use mubgme::{
    AxisSpec, BasisAssignment, CertificationReport, DensityMatrix, PovmParams, PovmSweepResult, StateVector, SweepGrid,
    UNITARITY_TOL, VIOLATION_SLACK,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::args::{
    BoundClass, CertifyArgs, CheckBoundsArgs, Family, FamilyParams, FiguresArgs, Format, LoccArgs, LoccFamily,
    MubChoice, Param, SweepArgs, SweepFamily,
};
use crate::error::{CliError, CliResult};
use crate::output::{write_file, write_json, Table};

/// Oracle agreement required under `--verify`.
pub const ORACLE_TOL: f64 = 1e-10;
/// Sweep rows are re-checked at this stride under `--verify`.
pub const VERIFY_STRIDE: usize = 100;

fn input<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Input(msg.into()))
}

struct Defaults;

impl Defaults {
    const THETA: f64 = FRAC_PI_4;
    const ALPHA: f64 = FRAC_PI_4;
    const LAMBDA: f64 = 0.5;
    const WG4_THETA: f64 = 1.05;
    const WG4_MU: f64 = FRAC_PI_4;
    const WG4_NU: f64 = 0.5;
}

/// Builds a state of the named family; values missing from `p` use the
/// family defaults.
pub fn family_state(family: Family, p: &FamilyParams) -> CliResult<StateVector> {
    let theta = p.theta.unwrap_or(Defaults::THETA);
    Ok(match family {
        Family::PsiLambda => psi_lambda(p.lambda.unwrap_or(Defaults::LAMBDA))?,
        Family::Bell => bell(),
        Family::Ghz3 => ghz3(theta),
        Family::W3 => w3(theta, p.alpha.unwrap_or(Defaults::ALPHA)),
        Family::Acin => {
            let w = p.weights.clone().unwrap_or_else(|| vec![1.0; 5]);
            let w: [f64; 5] = w.try_into().map_err(|_| CliError::Input("--weights takes five values".into()))?;
            acin_canonical(w, p.phi.unwrap_or(0.0))?
        }
        Family::Ghz4 => ghz4(theta),
        Family::Wg4 => {
            wg4(
                p.theta.unwrap_or(Defaults::WG4_THETA),
                p.mu.unwrap_or(Defaults::WG4_MU),
                p.nu.unwrap_or(Defaults::WG4_NU),
            )
            .0
        }
        Family::Product2 => zero_product(2),
        Family::Product3 => zero_product(3),
        Family::Product4 => zero_product(4),
        Family::Random => {
            if !(2..=4).contains(&p.parties) {
                return input(format!("--parties must be 2, 3 or 4, got {}", p.parties));
            }
            random_pure(&vec![2; p.parties], p.seed)?
        }
    })
}

/// Reads a JSON state file, returning the normalized state and the norm of
/// the amplitudes as given.
pub fn read_state_file(path: &Path) -> CliResult<(StateVector, f64)> {
    let text = fs::read_to_string(path).map_err(CliError::io(path))?;
    Ok(StateFile::parse(&text)?)
}

/// Fails with an invariant breach when any setting's outcome distribution
/// does not sum to one.
fn check_completeness(rho: &DensityMatrix, settings: &[&BasisAssignment]) -> CliResult<()> {
    for s in settings {
        let total: f64 = outcome_distribution(rho, s)?.iter().sum();
        if (total - 1.0).abs() > mubgme::EQUALITY_TOL {
            return Err(CliError::Invariant(format!("outcome probabilities sum to {total}")));
        }
    }
    Ok(())
}

fn bipartite_family(d: usize, mubs: MubChoice) -> CliResult<MubFamily> {
    Ok(match mubs {
        MubChoice::Pair => fourier_pair(d)?,
        MubChoice::Complete => best_family(d)?,
    })
}

/// `Σ_b Σ_i P(i,i)` from individual joint probabilities.
fn bipartite_oracle(rho: &DensityMatrix, family: &MubFamily) -> CliResult<f64> {
    let d = family.dim();
    let mut total = 0.0;
    for b in family.bases() {
        let setting = BasisAssignment::uniform(b, 2)?;
        for i in 0..d {
            total += joint_probability(rho, &setting, &IndexPattern(vec![i, i]))?;
        }
    }
    Ok(total)
}

fn pattern_sets(parties: usize) -> Vec<LbpsPatternSet> {
    if parties == 3 {
        lbps_tripartite()
    } else {
        vec![lbps_quadripartite()]
    }
}

fn labelled_setting(label: &str) -> CliResult<BasisAssignment> {
    let triple = qubit_mub_triple();
    let bases = label
        .chars()
        .map(|c| match c {
            'z' => Ok(triple.bases()[0].clone()),
            'x' => Ok(triple.bases()[1].clone()),
            'y' => Ok(triple.bases()[2].clone()),
            other => Err(CliError::Invariant(format!("unknown basis label '{other}'"))),
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(BasisAssignment::new(bases)?)
}

/// Brute-force value for the settings named in `report`.
fn multipartite_oracle(rho: &DensityMatrix, report: &CertificationReport) -> CliResult<f64> {
    let n = rho.parties();
    let (first, second) = match &report.settings {
        Some([a, b]) => (labelled_setting(a)?, labelled_setting(b)?),
        None => (BasisAssignment::computational(n), BasisAssignment::hadamard(n)),
    };
    Ok(i_value_oracle(rho, &first, &second, &pattern_sets(n))?)
}

fn check_oracle(value: f64, oracle: f64, what: &str) -> CliResult<()> {
    if (value - oracle).abs() > ORACLE_TOL {
        return Err(CliError::Invariant(format!("{what}: fast path {value} vs oracle {oracle}")));
    }
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct CertifyOutput {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    pub dims: Vec<usize>,
    /// Norm of the amplitudes in the state file before normalization.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input_norm: Option<f64>,
    #[serde(flatten)]
    pub report: CertificationReport,
    /// Closed-form reference for the family, where one is printed in the literature.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub paper_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_value: Option<f64>,
}

pub fn certify(args: &CertifyArgs) -> CliResult<CertifyOutput> {
    let (psi, family, input_norm) = match (&args.family, &args.state) {
        (Some(f), None) => (family_state(*f, &args.params)?, Some(*f), None),
        (None, Some(path)) => {
            let (psi, norm) = read_state_file(path)?;
            (psi, None, Some(norm))
        }
        _ => return input("give exactly one of --family or --state"),
    };
    let rho = psi.density();
    let n = psi.parties();
    let p = &args.params;
    let theta = p.theta.unwrap_or(Defaults::THETA);
    let mut out = CertifyOutput {
        family: family.and_then(|f| f.to_possible_value()).map(|v| v.get_name().to_string()),
        dims: psi.dims().to_vec(),
        input_norm,
        report: match n {
            2 => {
                let d = psi.dims()[0];
                let fam = bipartite_family(d, args.mubs)?;
                let settings =
                    fam.bases().iter().map(|b| BasisAssignment::uniform(b, 2)).collect::<Result<Vec<_>, _>>()?;
                check_completeness(&rho, &settings.iter().collect::<Vec<_>>())?;
                i_m_bipartite(&rho, &fam)?
            }
            3 | 4 => {
                check_completeness(&rho, &[&BasisAssignment::computational(n), &BasisAssignment::hadamard(n)])?;
                if args.basis_search {
                    certify_with_basis_search(&rho)?
                } else if n == 3 {
                    i3(&rho)?
                } else {
                    i4(&rho)?
                }
            }
            other => return input(format!("certification supports 2, 3 or 4 parties, got {other}")),
        },
        paper_value: None,
        tau: None,
        q: None,
        oracle_value: None,
    };
    let standard_settings = !args.basis_search;
    out.paper_value = match family {
        Some(Family::PsiLambda) if args.mubs == MubChoice::Pair => {
            Some(closed_form::i2_psi_lambda(p.lambda.unwrap_or(Defaults::LAMBDA)))
        }
        Some(Family::Bell) if args.mubs == MubChoice::Pair => Some(closed_form::i2_psi_lambda(0.5)),
        Some(Family::Ghz3) if standard_settings => Some(closed_form::i3_ghz(theta)),
        Some(Family::W3) if standard_settings => Some(closed_form::i3_w(theta, p.alpha.unwrap_or(Defaults::ALPHA))),
        Some(Family::Ghz4) if standard_settings => Some(closed_form::i4_ghz_reference(theta)),
        _ => None,
    };
    let qubits = psi.dims().iter().all(|&d| d == 2);
    if qubits && n == 3 {
        out.tau = Some(triangle_tau(&psi)?);
    }
    if qubits {
        out.q = Some(global_q(&psi)?);
    }
    if args.verify {
        let oracle = if n == 2 {
            bipartite_oracle(&rho, &bipartite_family(psi.dims()[0], args.mubs)?)?
        } else {
            multipartite_oracle(&rho, &out.report)?
        };
        check_oracle(out.report.i_value, oracle, "certify")?;
        out.oracle_value = Some(oracle);
    }
    Ok(out)
}

/// One swept curve.
#[derive(Clone, Copy, Debug)]
pub struct SweepSpec {
    pub family: SweepFamily,
    pub param: Param,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
}

fn param_name(p: Param) -> &'static str {
    match p {
        Param::Theta => "theta",
        Param::Alpha => "alpha",
        Param::Mu => "mu",
        Param::Nu => "nu",
        Param::Lambda => "lambda",
    }
}

impl SweepSpec {
    pub fn from_args(args: &SweepArgs) -> CliResult<Self> {
        let param = args.param.unwrap_or(match args.family {
            SweepFamily::Wg4 => Param::Mu,
            SweepFamily::PsiLambda => Param::Lambda,
            _ => Param::Theta,
        });
        let allowed: &[Param] = match args.family {
            SweepFamily::PsiLambda => &[Param::Lambda],
            SweepFamily::Ghz3 | SweepFamily::Ghz4 => &[Param::Theta],
            SweepFamily::W3 => &[Param::Theta, Param::Alpha],
            SweepFamily::Wg4 => &[Param::Theta, Param::Mu, Param::Nu],
        };
        if !allowed.contains(&param) {
            return input(format!("{:?} has no parameter {}", args.family, param_name(param)));
        }
        let (lo, hi) = if param == Param::Lambda { (0.0, 1.0) } else { (0.0, FRAC_PI_2) };
        let spec = Self {
            family: args.family,
            param,
            from: args.from.unwrap_or(lo),
            to: args.to.unwrap_or(hi),
            steps: args.steps,
        };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> CliResult<()> {
        if self.steps < 2 {
            return input("a sweep needs at least 2 steps");
        }
        if !self.from.is_finite() || !self.to.is_finite() {
            return input("sweep bounds must be finite");
        }
        Ok(())
    }

    fn header(&self) -> Vec<&'static str> {
        let mut h = vec![param_name(self.param)];
        h.extend_from_slice(match self.family {
            SweepFamily::PsiLambda => &["i2", "bound", "paper_i2"][..],
            SweepFamily::Ghz3 | SweepFamily::W3 => &["i3", "tau", "bound", "paper_i3"],
            SweepFamily::Ghz4 => &["i4", "q", "bound", "paper_i4"],
            SweepFamily::Wg4 => &["i4", "q", "bound"],
        });
        h
    }
}

fn sweep_row(spec: &SweepSpec, params: &FamilyParams, x: f64, verify: bool) -> CliResult<Vec<f64>> {
    let mut p = params.clone();
    match spec.param {
        Param::Theta => p.theta = Some(x),
        Param::Alpha => p.alpha = Some(x),
        Param::Mu => p.mu = Some(x),
        Param::Nu => p.nu = Some(x),
        Param::Lambda => p.lambda = Some(x),
    }
    let family = match spec.family {
        SweepFamily::PsiLambda => Family::PsiLambda,
        SweepFamily::Ghz3 => Family::Ghz3,
        SweepFamily::W3 => Family::W3,
        SweepFamily::Ghz4 => Family::Ghz4,
        SweepFamily::Wg4 => Family::Wg4,
    };
    let psi = family_state(family, &p)?;
    let rho = psi.density();
    let theta = p.theta.unwrap_or(Defaults::THETA);
    let row = match spec.family {
        SweepFamily::PsiLambda => {
            let fam = fourier_pair(2)?;
            let r = i_m_bipartite(&rho, &fam)?;
            if verify {
                check_oracle(r.i_value, bipartite_oracle(&rho, &fam)?, "sweep")?;
            }
            vec![x, r.i_value, r.bound, closed_form::i2_psi_lambda(p.lambda.unwrap_or(Defaults::LAMBDA))]
        }
        SweepFamily::Ghz3 | SweepFamily::W3 => {
            let r = i3(&rho)?;
            if verify {
                check_oracle(r.i_value, multipartite_oracle(&rho, &r)?, "sweep")?;
            }
            let reference = if spec.family == SweepFamily::Ghz3 {
                closed_form::i3_ghz(theta)
            } else {
                closed_form::i3_w(theta, p.alpha.unwrap_or(Defaults::ALPHA))
            };
            vec![x, r.i_value, triangle_tau(&psi)?, r.bound, reference]
        }
        SweepFamily::Ghz4 | SweepFamily::Wg4 => {
            let r = i4(&rho)?;
            if verify {
                check_oracle(r.i_value, multipartite_oracle(&rho, &r)?, "sweep")?;
            }
            let mut row = vec![x, r.i_value, global_q(&psi)?, r.bound];
            if spec.family == SweepFamily::Ghz4 {
                row.push(closed_form::i4_ghz_reference(theta));
            }
            row
        }
    };
    Ok(row)
}

/// Evaluates every grid point; under `verify` every [`VERIFY_STRIDE`]-th
/// row is re-derived along the brute-force path.
pub fn sweep_table(spec: &SweepSpec, params: &FamilyParams, verify: bool) -> CliResult<Table> {
    spec.validate()?;
    let axis = AxisSpec::new(spec.from, spec.to, spec.steps)?;
    let rows = (0..spec.steps)
        .into_par_iter()
        .map(|i| sweep_row(spec, params, axis.value(i), verify && i % VERIFY_STRIDE == 0))
        .collect::<CliResult<Vec<_>>>()?;
    Ok(Table { header: spec.header(), rows })
}

pub fn sweep<W: Write + ?Sized>(args: &SweepArgs, stdout: &mut W) -> CliResult<()> {
    let spec = SweepSpec::from_args(args)?;
    let bytes = sweep_table(&spec, &args.params, args.verify)?.render(args.format)?;
    match &args.out {
        Some(path) => write_file(path, &bytes),
        None => stdout.write_all(&bytes).map_err(CliError::io("<stdout>")),
    }
}

#[derive(Debug, Serialize)]
pub struct LoccSummary {
    pub state: String,
    pub grid: SweepGrid,
    pub theta_cap: f64,
    pub party: Party,
    pub points: usize,
    pub min_omega: f64,
    pub argmin: PovmParams,
    /// `min_omega ≥ −1e-9`; a false value marks a counterexample at `argmin`.
    pub nonnegative: bool,
}

fn locc_axis(pinned: Option<f64>, steps: usize) -> CliResult<AxisSpec> {
    Ok(match pinned {
        Some(v) => AxisSpec::fixed(v),
        None => AxisSpec::full_circle(steps)?,
    })
}

pub fn locc_grid(grid: usize, chi: Option<f64>, zeta: Option<f64>, xi: Option<f64>) -> CliResult<SweepGrid> {
    if grid < 2 && (chi.is_none() || zeta.is_none() || xi.is_none()) {
        return input("--grid needs at least 2 points per swept axis");
    }
    Ok(SweepGrid { chi: locc_axis(chi, grid)?, zeta: locc_axis(zeta, grid)?, xi: locc_axis(xi, grid)? })
}

/// Runs the sweep and checks POVM completeness at the reported minimum.
pub fn locc_sweep(rho: &DensityMatrix, grid: &SweepGrid, theta_cap: f64, party: Party) -> CliResult<PovmSweepResult> {
    let r = sweep_with(rho, grid, theta_cap, &fourier_pair(2)?, party)?;
    let (e1, e2) = build_povm(&r.argmin);
    let residual = completeness_residual(&e1, &e2);
    if residual > UNITARITY_TOL {
        return Err(CliError::Invariant(format!("POVM completeness residual {residual:e}")));
    }
    if r.omega.iter().any(|v| !v.is_finite()) {
        return Err(CliError::Invariant("non-finite Ω on the grid".into()));
    }
    Ok(r)
}

pub fn grid_table(r: &PovmSweepResult) -> Table {
    let mut t = Table::new(vec!["chi", "zeta", "xi", "theta_cap", "omega"]);
    t.rows = r
        .omega
        .iter()
        .enumerate()
        .map(|(i, &w)| {
            let p = r.params(i);
            vec![p.chi, p.zeta, p.xi, p.theta_cap, w]
        })
        .collect();
    t
}

pub fn density_table(r: &PovmSweepResult) -> Table {
    let mut t = Table::new(vec!["chi", "zeta", "min_omega_over_xi"]);
    t.rows = r.density_map().into_iter().map(|(c, z, w)| vec![c, z, w]).collect();
    t
}

pub fn locc<W: Write + ?Sized>(args: &LoccArgs, stdout: &mut W) -> CliResult<LoccSummary> {
    let (psi, label) = match (&args.state, args.family) {
        (Some(path), _) => (read_state_file(path)?.0, path.display().to_string()),
        (None, Some(LoccFamily::PsiLambda)) => {
            let l = args.lambda.unwrap_or(Defaults::LAMBDA);
            (psi_lambda(l)?, format!("psi_lambda({l})"))
        }
        (None, Some(LoccFamily::Product2)) => (zero_product(2), "product2".into()),
        (None, Some(LoccFamily::Bell) | None) => (bell(), "bell".into()),
    };
    let grid = locc_grid(args.grid, args.chi, args.zeta, args.xi)?;
    if !(-PI..=PI).contains(&args.theta_cap) {
        return input("--theta-cap must lie in [-π, π]");
    }
    let party = if args.mirror_povm { Party::B } else { Party::A };
    let r = locc_sweep(&psi.density(), &grid, args.theta_cap, party)?;
    let summary = LoccSummary {
        state: label,
        grid,
        theta_cap: args.theta_cap,
        party,
        points: r.omega.len(),
        min_omega: r.min_omega,
        argmin: r.argmin,
        nonnegative: r.min_omega >= -VIOLATION_SLACK,
    };
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir).map_err(CliError::io(dir))?;
        write_file(&dir.join("grid.csv"), &grid_table(&r).to_csv()?)?;
        write_file(&dir.join("density.csv"), &density_table(&r).to_csv()?)?;
        let mut bytes = serde_json::to_vec_pretty(&summary).expect("summary serializes");
        bytes.push(b'\n');
        write_file(&dir.join("summary.json"), &bytes)?;
    }
    write_json(stdout, &summary)?;
    Ok(summary)
}

pub fn check_bounds(args: &CheckBoundsArgs) -> CliResult<CampaignReport> {
    let class = match args.class {
        BoundClass::Biseparable3 => CampaignClass::Biseparable3,
        BoundClass::Biseparable4 => CampaignClass::Biseparable4,
        BoundClass::SeparableBipartite => {
            CampaignClass::SeparableBipartite { d: args.dim, complete: args.mubs == MubChoice::Complete }
        }
    };
    if args.trials == 0 {
        return input("--trials must be at least 1");
    }
    Ok(run_campaign(class, args.trials, args.seed)?)
}

/// Curves behind fig2..fig5, in that order.
pub fn figure_specs(steps: usize) -> [(SweepSpec, FamilyParams); 4] {
    let curve = |family, param| SweepSpec { family, param, from: 0.0, to: FRAC_PI_2, steps };
    let w = FamilyParams { alpha: Some(FRAC_PI_4), ..FamilyParams::default() };
    let g = FamilyParams { theta: Some(Defaults::WG4_THETA), nu: Some(Defaults::WG4_NU), ..FamilyParams::default() };
    [
        (curve(SweepFamily::Ghz3, Param::Theta), FamilyParams::default()),
        (curve(SweepFamily::W3, Param::Theta), w),
        (curve(SweepFamily::Ghz4, Param::Theta), FamilyParams::default()),
        (curve(SweepFamily::Wg4, Param::Mu), g),
    ]
}

#[derive(Debug, Serialize)]
pub struct FiguresSummary {
    pub files: Vec<String>,
    pub fig1_min_omega: f64,
}

pub fn figures(args: &FiguresArgs) -> CliResult<FiguresSummary> {
    fs::create_dir_all(&args.out).map_err(CliError::io(&args.out))?;
    let grid = locc_grid(args.grid, None, None, None)?;
    let r = locc_sweep(&bell().density(), &grid, 0.0, Party::A)?;
    let mut files = vec!["fig1.csv".to_string()];
    write_file(&args.out.join("fig1.csv"), &density_table(&r).to_csv()?)?;
    for (k, (spec, params)) in figure_specs(args.steps).iter().enumerate() {
        let name = format!("fig{}.csv", k + 2);
        let table = sweep_table(spec, params, args.verify)?;
        write_file(&args.out.join(&name), &table.render(Format::Csv)?)?;
        files.push(name);
    }
    Ok(FiguresSummary { files, fig1_min_omega: r.min_omega })
}
