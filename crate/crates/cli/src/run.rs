//! Executes a parsed scenario and collects its CSV table and checks.

use qcorr_core::classical::{
    classical_average, classical_quadratic_form, classical_uncertainty_check, default_epsilon,
    Verdict,
};
use qcorr_core::correspondence::{
    classical_limit_probe, cross_term_report, decoherence_factor, hbar_scaling_scan,
};
use qcorr_core::dynamics::{build_hamiltonian, evolve, PhysicalConstants};
use qcorr_core::quantum::{
    density_from_wavefunction, expectation, mean_and_variance, momentum_operator,
    position_operator, quantum_moments, quantum_uncertainty_check, report_from_moments,
};
use qcorr_core::sampling::{random_density, random_hermitian, random_observable, random_wavefunction};
use qcorr_core::spectral::{diagonalize, eigen_residual};
use qcorr_core::stability::{
    failure_condition_demo, radial_ground_state, uncertainty_ground_state_estimate,
};
use qcorr_core::{
    AtomParameters, Boundary, ClassicalObservable, Complex64, Grid, HermitianOperator,
    ProbabilityDensity, Result, WaveFunction,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::output::Table;
use crate::scenario::{Kind, Scenario};

pub const DEFAULT_SEED: u64 = 0;

/// Scenario-level assertion.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub table: Table,
    pub checks: Vec<Check>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn csv(&self) -> String {
        self.table.render()
    }
}

struct Checks(Vec<Check>);

impl Checks {
    fn new() -> Self {
        Self(Vec::new())
    }

    fn record(&mut self, name: &str, passed: bool, detail: String) {
        self.0.push(Check {
            name: name.to_string(),
            passed,
            detail,
        });
    }
}

/// Runs `s`. `seed` overrides the scenario's own seed.
pub fn run_scenario(s: &Scenario, seed: Option<u64>) -> Result<Outcome> {
    let seed = seed.or(s.seed).unwrap_or(DEFAULT_SEED);
    let (table, checks) = match s.kind {
        Kind::Average => average(s)?,
        Kind::UncertaintyClassical => uncertainty_classical(s, seed)?,
        Kind::UncertaintyQuantum => uncertainty_quantum(s, seed)?,
        Kind::Eigen => eigen(s)?,
        Kind::Evolve => run_evolve(s)?,
        Kind::Decohere => decohere(s)?,
        Kind::ClassicalLimit => classical_limit(s)?,
        Kind::HbarScan => hbar_scan(s)?,
        Kind::Atom => atom(s)?,
    };
    let table = if s.kind.is_randomized() {
        table.with_seed(seed)
    } else {
        table
    };
    Ok(Outcome {
        table,
        checks: checks.0,
    })
}

fn symmetric_grid(s: &Scenario) -> Result<Grid> {
    let half = s.float("box");
    Grid::uniform(-half, half, s.count("n"), Boundary::Dirichlet)
}

fn constants(s: &Scenario) -> Result<PhysicalConstants> {
    PhysicalConstants::new(s.float("hbar"), s.float("mass"))
}

fn observable_fn(name: &str) -> fn(f64) -> f64 {
    match name {
        "x" => |x| x,
        "x2" => |x| x * x,
        "x4" => |x| x.powi(4),
        "cos" => f64::cos,
        other => unreachable!("observable `{other}` passed validation"),
    }
}

/// Mean of the observable under a normal distribution.
fn gaussian_moment(name: &str, center: f64, width: f64) -> f64 {
    let (c, w) = (center, width);
    match name {
        "x" => c,
        "x2" => c * c + w * w,
        "x4" => c.powi(4) + 6.0 * c * c * w * w + 3.0 * w.powi(4),
        "cos" => c.cos() * (-0.5 * w * w).exp(),
        other => unreachable!("observable `{other}` passed validation"),
    }
}

fn relative_gap(value: f64, reference: f64) -> f64 {
    (value - reference).abs() / reference.abs().max(f64::MIN_POSITIVE)
}

fn average(s: &Scenario) -> Result<(Table, Checks)> {
    let grid = symmetric_grid(s)?;
    let name = s.choice("observable");
    let (center, width) = (s.float("center"), s.float("width"));
    let psi = WaveFunction::gaussian(grid.clone(), center, width, 0.0)?;
    let rho = density_from_wavefunction(&psi);
    let f = ClassicalObservable::from_fn(grid.clone(), observable_fn(name));
    let classical = classical_average(&rho, &f)?;
    let quantum = expectation(&psi, &HermitianOperator::diagonal(grid, f.values())?)?;
    let analytic = gaussian_moment(name, center, width);

    let mut t = Table::quantities();
    t.quantity("classical_average", classical);
    t.quantity("quantum_average", quantum);
    t.quantity("analytic_average", analytic);
    t.quantity("difference", quantum - classical);

    let mut c = Checks::new();
    let agreement = (quantum - classical).abs();
    c.record(
        "quantum_equals_classical",
        agreement <= 1e-12 * quantum.abs().max(1.0),
        format!("difference {agreement:e}"),
    );
    let error = (classical - analytic).abs() / analytic.abs().max(1.0);
    c.record(
        "analytic_moment",
        error <= s.float("tolerance"),
        format!("relative error {error:e}"),
    );
    Ok((t, c))
}

fn uncertainty_classical(s: &Scenario, seed: u64) -> Result<(Table, Checks)> {
    let grid = symmetric_grid(s)?;
    let eps = default_epsilon(&grid);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Table::new(&[
        "trial",
        "variance_a",
        "variance_b",
        "covariance_squared",
        "lhs",
        "applicable",
        "holds",
        "completed_square_minimum",
        "min_sampled_form",
    ]);
    let (mut violations, mut negative_forms, mut skipped) = (0usize, 0usize, 0usize);
    for trial in 0..s.count("trials") {
        let rho: ProbabilityDensity = random_density(&grid, &mut rng)?;
        let a = random_observable(&grid, &mut rng);
        let b = random_observable(&grid, &mut rng);
        let report = classical_uncertainty_check(&rho, &a, &b, eps)?;
        let mut min_form = f64::INFINITY;
        for _ in 0..s.count("xi_samples") {
            let xi = rng.gen_range(-10.0..10.0);
            min_form = min_form.min(classical_quadratic_form(&rho, &a, &b, xi)?);
        }
        match report.verdict() {
            Verdict::Holds => {}
            Verdict::Violated => violations += 1,
            Verdict::NotApplicable => skipped += 1,
        }
        if min_form < -1e-9 {
            negative_forms += 1;
        }
        t.push(vec![
            trial.into(),
            report.variance_a.into(),
            report.variance_b.into(),
            report.cross_term.into(),
            report.lhs.into(),
            report.applicable.into(),
            (report.applicable && report.inequality_holds).into(),
            report.completed_square_minimum.into(),
            min_form.into(),
        ]);
    }
    let mut c = Checks::new();
    c.record("relation_holds", violations == 0, format!("{violations} violations, {skipped} not applicable"));
    c.record("form_nonnegative", negative_forms == 0, format!("{negative_forms} negative samples"));
    Ok((t, c))
}

fn uncertainty_quantum(s: &Scenario, seed: u64) -> Result<(Table, Checks)> {
    let mut c = Checks::new();
    let hbar = s.float("hbar");
    match s.choice("mode") {
        "gaussian" => {
            let grid = symmetric_grid(s)?;
            let psi = WaveFunction::gaussian(grid.clone(), s.float("center"), s.float("sigma"), s.float("k0"))?;
            let report = quantum_uncertainty_check(
                &psi,
                &position_operator(&grid),
                &momentum_operator(&grid, hbar),
                default_epsilon(&grid),
            )?;
            let ratio = report.lhs / report.cross_term;
            let mut t = Table::quantities();
            t.quantity("variance_x", report.variance_a);
            t.quantity("variance_p", report.variance_b);
            t.quantity("product", report.lhs);
            t.quantity("bound", report.cross_term);
            t.quantity("ratio", ratio);
            t.quantity("applicable", report.applicable);
            t.quantity("completed_square_minimum", report.completed_square_minimum);
            c.record("relation_holds", report.verdict() == Verdict::Holds, format!("{:?}", report.verdict()));
            c.record(
                "minimum_uncertainty",
                (ratio - 1.0).abs() <= s.float("tolerance"),
                format!("product / bound = {ratio}"),
            );
            Ok((t, c))
        }
        "random" => {
            let half = s.float("box");
            let grid = Grid::uniform(-half, half, s.count("trial_points"), Boundary::Dirichlet)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut t = Table::new(&[
                "trial",
                "variance_a",
                "variance_b",
                "bound",
                "lhs",
                "applicable",
                "holds",
                "completed_square_minimum",
                "min_sampled_form",
            ]);
            let (mut violations, mut negative_forms) = (0usize, 0usize);
            for trial in 0..s.count("trials") {
                let psi = random_wavefunction(&grid, &mut rng)?;
                let a = random_hermitian(&grid, &mut rng)?;
                let b = random_hermitian(&grid, &mut rng)?;
                let moments = quantum_moments(&psi, &a, &b)?;
                let report = report_from_moments(&moments, default_epsilon(&grid));
                let min_form = (0..s.count("zeta_samples"))
                    .map(|_| moments.quadratic_form(rng.gen_range(-10.0..10.0)))
                    .fold(f64::INFINITY, f64::min);
                if report.verdict() == Verdict::Violated {
                    violations += 1;
                }
                if min_form < -1e-9 {
                    negative_forms += 1;
                }
                t.push(vec![
                    trial.into(),
                    report.variance_a.into(),
                    report.variance_b.into(),
                    report.cross_term.into(),
                    report.lhs.into(),
                    report.applicable.into(),
                    (report.applicable && report.inequality_holds).into(),
                    report.completed_square_minimum.into(),
                    min_form.into(),
                ]);
            }
            c.record("relation_holds", violations == 0, format!("{violations} violations"));
            c.record("form_nonnegative", negative_forms == 0, format!("{negative_forms} negative samples"));
            Ok((t, c))
        }
        "eigenstate" => {
            let grid = symmetric_grid(s)?;
            let x = position_operator(&grid);
            let index = grid.active_len() / 2;
            let demo = failure_condition_demo(&x, index, default_epsilon(&grid), hbar)?;
            let r = demo.report;
            let mut t = Table::quantities();
            t.quantity("variance_x", r.variance_a);
            t.quantity("variance_p", r.variance_b);
            t.quantity("applicable", r.applicable);
            t.quantity("completed_square_minimum", r.completed_square_minimum);
            c.record(
                "inequality_not_asserted",
                r.verdict() == Verdict::NotApplicable,
                format!("variance_x = {:e}", r.variance_a),
            );
            Ok((t, c))
        }
        other => unreachable!("mode `{other}` passed validation"),
    }
}

fn eigen(s: &Scenario) -> Result<(Table, Checks)> {
    let grid = symmetric_grid(s)?;
    let pc = constants(s)?;
    let (m, omega, half) = (pc.mass(), s.float("omega"), s.float("box"));
    let potential = s.choice("potential");
    let v = match potential {
        "oscillator" => grid.sample(|x| 0.5 * m * omega * omega * x * x),
        "quartic" => grid.sample(|x| x.powi(4)),
        "box" => vec![0.0; grid.n()],
        "double-well" => grid.sample(|x| (x * x - 1.0).powi(2)),
        other => unreachable!("potential `{other}` passed validation"),
    };
    let exact = |k: usize| -> Option<f64> {
        let hbar = pc.hbar();
        match potential {
            "oscillator" => Some(hbar * omega * (k as f64 + 0.5)),
            "box" => {
                let q = std::f64::consts::PI * (k + 1) as f64 / (2.0 * half);
                Some(hbar * hbar * q * q / (2.0 * m))
            }
            _ => None,
        }
    };
    let h = build_hamiltonian(&grid, &v, pc)?;
    let dec = diagonalize(&h)?;
    let levels = s.count("levels").min(dec.len());
    let mut t = Table::new(&["level", "eigenvalue", "exact", "relative_error", "residual"]);
    let (mut worst_residual, mut worst_error) = (0.0f64, 0.0f64);
    for k in 0..levels {
        let value = dec.eigenvalues()[k];
        let residual = eigen_residual(&h, &dec.eigenvector(k)?, value)?;
        let reference = exact(k);
        let error = reference.map(|e| relative_gap(value, e));
        worst_residual = worst_residual.max(residual);
        worst_error = worst_error.max(error.unwrap_or(0.0));
        t.push(vec![k.into(), value.into(), reference.into(), error.into(), residual.into()]);
    }
    let mut c = Checks::new();
    let bound = 1e-8 * h.max_norm();
    c.record("residual", worst_residual < bound, format!("max residual {worst_residual:e}, bound {bound:e}"));
    if exact(0).is_some() {
        c.record(
            "analytic_levels",
            worst_error <= s.float("tolerance"),
            format!("max relative error {worst_error:e}"),
        );
    }
    Ok((t, c))
}

fn run_evolve(s: &Scenario) -> Result<(Table, Checks)> {
    let grid = symmetric_grid(s)?;
    let pc = constants(s)?;
    let (hbar, m, omega) = (pc.hbar(), pc.mass(), s.float("omega"));
    let potential = s.choice("potential");
    let h = match potential {
        "free" => build_hamiltonian(&grid, &vec![0.0; grid.n()], pc)?,
        "oscillator" => build_hamiltonian(&grid, &grid.sample(|x| 0.5 * m * omega * omega * x * x), pc)?,
        "zero" => HermitianOperator::zero(grid.clone()),
        other => unreachable!("potential `{other}` passed validation"),
    };
    let sigma = s.float("sigma");
    let psi0 = WaveFunction::gaussian(grid.clone(), s.float("center"), sigma, s.float("k0"))?;
    let (dt, steps, every) = (s.float("dt"), s.count("steps"), s.count("every"));
    let traj = evolve(&psi0, &h, dt, steps, pc)?;
    let x = position_operator(&grid);
    let e0 = expectation(&psi0, &h)?;

    let mut t = Table::new(&[
        "step",
        "time",
        "norm",
        "energy",
        "mean_x",
        "variance_x",
        "free_variance",
        "distance_to_initial",
    ]);
    let mut energy_drift = 0.0f64;
    for (k, (time, state)) in traj.times().iter().zip(traj.states()).enumerate() {
        let energy = expectation(state, &h)?;
        energy_drift = energy_drift.max((energy - e0).abs());
        if k % every != 0 && k != steps {
            continue;
        }
        let (mean_x, variance_x) = mean_and_variance(state, &x)?;
        let spread = hbar * time / (2.0 * m * sigma * sigma);
        let free = (potential == "free").then(|| sigma * sigma * (1.0 + spread * spread));
        t.push(vec![
            k.into(),
            (*time).into(),
            state.norm().into(),
            energy.into(),
            mean_x.into(),
            variance_x.into(),
            free.into(),
            state.distance(&psi0)?.into(),
        ]);
    }
    let mut c = Checks::new();
    let norm_drift = traj.max_norm_drift();
    c.record("norm_conserved", norm_drift < 1e-10, format!("max norm drift {norm_drift:e}"));
    let relative_drift = if e0 == 0.0 { energy_drift } else { energy_drift / e0.abs() };
    c.record("energy_conserved", relative_drift < 1e-8, format!("relative energy drift {relative_drift:e}"));
    if potential == "zero" {
        let d = traj.last().distance(&psi0)?;
        c.record("identity_evolution", d == 0.0, format!("final distance {d:e}"));
    }
    Ok((t, c))
}

fn decohere(s: &Scenario) -> Result<(Table, Checks)> {
    let grid = symmetric_grid(s)?;
    let v = match s.choice("potential") {
        "oscillator" => grid.sample(|x| 0.5 * x * x),
        "quartic" => grid.sample(|x| x.powi(4)),
        other => unreachable!("potential `{other}` passed validation"),
    };
    let h = build_hamiltonian(&grid, &v, PhysicalConstants::atomic())?;
    let dec = diagonalize(&h)?;
    let op = match s.choice("operator") {
        "position" => position_operator(&grid),
        "hamiltonian" => h.clone(),
        other => unreachable!("operator `{other}` passed validation"),
    };
    let k = s.count("states").min(dec.len());
    let amplitude = Complex64::new(1.0 / (k as f64).sqrt(), 0.0);
    let r = cross_term_report(&vec![amplitude; k], &dec, &op)?;
    let factor = decoherence_factor(&dec, 0, 1)?;

    let mut t = Table::quantities();
    t.quantity("quantum_average", r.quantum_average);
    t.quantity("classical_average", r.classical_average);
    t.quantity("cross_contribution", r.cross_contribution);
    t.quantity("direct_average", r.direct_average);
    t.quantity("max_off_diagonal", r.max_off_diagonal);
    for i in 0..k {
        t.quantity(&format!("diagonal_{i}"), r.diagonal[i]);
    }
    for i in 0..k {
        for j in (i + 1)..k {
            t.quantity(&format!("element_{i}_{j}_re"), r.off_diagonal[(i, j)].re);
            t.quantity(&format!("element_{i}_{j}_im"), r.off_diagonal[(i, j)].im);
        }
    }
    t.quantity("factor_0_1_integral", factor.integral.norm());
    t.quantity("factor_0_1_sup", factor.sup_norm);

    let mut c = Checks::new();
    let split = (r.quantum_average - r.classical_average - r.cross_contribution).abs();
    c.record("split_consistent", split < 1e-9, format!("residual {split:e}"));
    let direct = (r.quantum_average - r.direct_average).abs();
    c.record("matches_direct_average", direct < 1e-9, format!("difference {direct:e}"));
    c.record(
        "factor_orthogonal",
        factor.integral.norm() < 1e-8,
        format!("integral {:e}", factor.integral.norm()),
    );
    if s.choice("operator") == "hamiltonian" {
        c.record(
            "no_cross_terms",
            r.max_off_diagonal < 1e-8 * h.max_norm(),
            format!("max off-diagonal {:e}", r.max_off_diagonal),
        );
    }
    Ok((t, c))
}

fn classical_limit(s: &Scenario) -> Result<(Table, Checks)> {
    let grid = symmetric_grid(s)?;
    let f = ClassicalObservable::from_fn(grid, observable_fn(s.choice("observable")));
    let probe = classical_limit_probe(&f, s.float("x0"), s.list("widths"))?;
    let mut t = Table::new(&["width", "gap", "ratio_to_previous"]);
    for (k, (w, gap)) in probe.widths.iter().zip(&probe.gaps).enumerate() {
        let ratio = (k > 0).then(|| probe.gaps[k - 1] / gap);
        t.push(vec![(*w).into(), (*gap).into(), ratio.into()]);
    }
    let mut c = Checks::new();
    c.record("non_increasing", probe.is_non_increasing(0.1), format!("gaps {:?}", probe.gaps));
    c.record(
        "reaches_point_value",
        probe.reaches_point_value(),
        format!("last gap {:e}, range {:e}", probe.gaps.last().copied().unwrap_or(f64::NAN), probe.range),
    );
    Ok((t, c))
}

fn hbar_scan(s: &Scenario) -> Result<(Table, Checks)> {
    let grid = symmetric_grid(s)?;
    let m = s.float("mass");
    let v = match s.choice("potential") {
        "oscillator" => grid.sample(|x| 0.5 * m * x * x),
        "quartic" => grid.sample(|x| x.powi(4)),
        other => unreachable!("potential `{other}` passed validation"),
    };
    let scan = hbar_scaling_scan(&v, &grid, s.list("hbar"), m)?;
    let mut t = Table::new(&[
        "hbar",
        "ground_energy",
        "first_excited_energy",
        "gap_ratio",
        "position_variance",
    ]);
    for p in &scan.points {
        t.push(vec![
            p.hbar.into(),
            p.ground_energy.into(),
            p.first_excited_energy.into(),
            p.gap_ratio.into(),
            p.position_variance.into(),
        ]);
    }
    let mut c = Checks::new();
    c.record(
        "localizes",
        scan.variance_strictly_decreasing(),
        "ground-state position variance must fall with hbar".into(),
    );
    Ok((t, c))
}

fn atom(s: &Scenario) -> Result<(Table, Checks)> {
    let z = u32::try_from(s.count("z")).unwrap_or(u32::MAX);
    let base = match s.choice("units") {
        "atomic" => AtomParameters::atomic(z)?,
        "si" => AtomParameters::si(z)?,
        other => unreachable!("units `{other}` passed validation"),
    };
    let kappa = s.float("kappa");
    let p = base.with_uncertainty_constant(kappa)?;
    let est = uncertainty_ground_state_estimate(&p)?;
    let radial = radial_ground_state(&p, s.float("radii") * est.radius, s.count("n"))?;

    let mut t = Table::quantities();
    t.quantity("estimate_energy", est.energy);
    t.quantity("estimate_radius", est.radius);
    t.quantity("numerical_estimate_energy", est.numerical_energy);
    t.quantity("numerical_estimate_radius", est.numerical_radius);
    t.quantity("radial_energy", radial.energy);
    t.quantity("mean_radius", radial.mean_radius);
    t.quantity("kinetic_energy", radial.kinetic_energy);
    t.quantity("potential_energy", radial.potential_energy);
    t.quantity("box_shift", radial.box_shift);

    let mut c = Checks::new();
    let numeric = relative_gap(est.numerical_energy, est.energy).max(relative_gap(est.numerical_radius, est.radius));
    c.record("numerical_minimum", numeric < 1e-10, format!("relative gap {numeric:e}"));
    if kappa == 1.0 {
        let gap = relative_gap(radial.energy, est.energy);
        c.record("radial_matches_estimate", gap < 1e-2, format!("relative gap {gap:e}"));
    }
    let virial = relative_gap(radial.potential_energy, 2.0 * radial.energy);
    c.record("virial", virial < 2e-2, format!("relative gap {virial:e}"));
    Ok((t, c))
}
