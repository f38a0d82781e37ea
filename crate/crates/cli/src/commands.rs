use std::f64::consts::{FRAC_PI_2, TAU};
use std::path::Path;

use cascade_core::dynamics::{evolve_with, EvolveOptions};
use cascade_core::gksl::evenodd_spec;
use cascade_core::regular::threshold_refine;
use cascade_core::{
    build_theta, cascade_generator, coupling_matrix, coupling_matrix_oracle, design_pruned, gksl_decompose,
    gksl_generator, lindblad_closed_form_evenodd, threshold_scan, transfer_matrix, xi_profile, xi_profile_closed,
    CouplingMatrix, DimensionCap, GkslForm, RegularSpec, TruncatedState, C64,
};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::args::{
    Cli, ClosedForm, Command, CouplingsArgs, DesignArgs, GeneratorKind, GkslArgs, Observables, SimulateArgs,
    SweepArgs, ThresholdArgs, XiArgs,
};
use crate::emit::{complex_pair, complex_rows, float, json_text, write_output, Format, Reporter, Table};
use crate::failure::{Context, Failure, Outcome};
use crate::specfile::{load_network, SpecFile};

/// Largest elementwise disagreement `couplings --check` tolerates.
pub const CHECK_TOLERANCE: f64 = 1e-12;

/// Largest deviation `gksl --closed-form` tolerates.
pub const CLOSED_FORM_TOLERANCE: f64 = 1e-10;

/// Shared flags, resolved once.
#[derive(Debug, Clone, Copy)]
struct Global<'a> {
    format: Option<Format>,
    output: Option<&'a Path>,
    report: Reporter,
    degrees: bool,
}

impl Global<'_> {
    fn angle(&self, value: f64) -> f64 {
        if self.degrees {
            value.to_radians()
        } else {
            value
        }
    }

    fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    fn emit(&self, text: &str) -> Outcome {
        write_output(self.output, text)
    }
}

pub fn run(cli: &Cli) -> Outcome {
    let global = Global {
        format: cli.format,
        output: cli.output.as_deref(),
        report: Reporter { quiet: cli.quiet },
        degrees: cli.degrees,
    };
    let text = match &cli.command {
        Command::Couplings(a) => couplings(a, &global)?,
        Command::Gksl(a) => gksl(a, &global)?,
        Command::Xi(a) => xi(a, &global)?,
        Command::Design(a) => design(a, &global)?,
        Command::Sweep(a) => sweep(a, &global)?,
        Command::Threshold(a) => threshold(a, &global)?,
        Command::Simulate(a) => simulate(a, &global)?,
    };
    global.emit(&text)
}

fn zeta_json(zeta: &CouplingMatrix) -> Value {
    json!({ "M": zeta.sites(), "zeta": complex_rows(zeta.matrix()) })
}

fn zeta_csv(zeta: &CouplingMatrix) -> String {
    let n = zeta.sites();
    let mut header = vec!["m".to_string()];
    for mp in 1..=n {
        header.push(format!("re_{mp}"));
        header.push(format!("im_{mp}"));
    }
    let mut table = Table::new(header);
    for m in 1..=n {
        let mut row = vec![m.to_string()];
        for mp in 1..=n {
            let z = zeta.matrix()[(m - 1, mp - 1)];
            row.push(float(z.re));
            row.push(float(z.im));
        }
        table.row(row);
    }
    table.into_string()
}

fn couplings(args: &CouplingsArgs, g: &Global) -> Outcome<String> {
    let net = load_network(&args.spec)?.expanded();
    let zeta = if args.oracle {
        coupling_matrix_oracle(&net).context("couplings --oracle")?
    } else {
        coupling_matrix(&net)
    };
    if args.check {
        let oracle = coupling_matrix_oracle(&net).context("couplings --check")?;
        let gap = zeta.max_abs_diff(&oracle);
        g.report.note(format_args!("max |engine - oracle| = {gap:e}"));
        if !(gap <= CHECK_TOLERANCE) {
            return Err(Failure::physicality(format!(
                "couplings --check: engine and path enumeration differ by {gap:e} (tolerance {CHECK_TOLERANCE:e})"
            )));
        }
    }
    Ok(match g.format_or(Format::Csv) {
        Format::Csv => zeta_csv(&zeta),
        Format::Json => json_text(&zeta_json(&zeta)),
    })
}

/// Largest deviations `(rates, projectors, heff)` between two GKSL forms.
///
/// Jump operators are compared through the projectors onto each rate's
/// eigenspace, which does not depend on how a degenerate space is split.
pub fn form_deviation(numeric: &GkslForm, closed: &GkslForm) -> (f64, f64, f64) {
    let rates = numeric
        .rates
        .iter()
        .zip(&closed.rates)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let window = 1e-8 * numeric.rates.iter().fold(1.0, |a: f64, &b| a.max(b));
    let mut projectors = 0.0f64;
    for &rate in closed.rates.iter().filter(|&&r| r > window) {
        let gap = numeric.spectral_projector(rate, window) - closed.spectral_projector(rate, window);
        projectors = projectors.max(gap.iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    let heff = (&numeric.heff - &closed.heff).iter().map(|z| z.norm()).fold(0.0, f64::max);
    (rates, projectors, heff)
}

/// Even/odd parameters `(τ_1, φ_1)` of a regular spec, if it has that shape.
fn evenodd_parameters(spec: &RegularSpec) -> Outcome<(f64, f64)> {
    let first = spec.order(1);
    let expected = evenodd_spec(spec.sites(), first.transmissivity(), first.phase(), spec.gamma())
        .context("gksl --closed-form evenodd")?;
    let same = spec
        .splitters()
        .iter()
        .zip(expected.splitters())
        .all(|(a, b)| a.transmissivity() == b.transmissivity() && angle_gap(a.phase(), b.phase()) < 1e-12);
    if !same || spec.loss() != 0.0 {
        return Err(Failure::validation(
            "gksl --closed-form evenodd: spec must be regular with loss 0, tau_2 = 0, phi_2 = phi_1 + pi/2 and tau_k = 1 beyond",
        ));
    }
    Ok((first.transmissivity(), first.phase()))
}

fn angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

fn gksl(args: &GkslArgs, g: &Global) -> Outcome<String> {
    let network = load_network(&args.spec)?;
    let net = network.expanded();
    let zeta = coupling_matrix(&net);
    let theta = build_theta(&zeta, net.gamma());
    let form = gksl_decompose(&theta, &zeta).context("gksl")?;
    g.report.note(format_args!(
        "reconstruction error {:e}, sum of rates {:.16e} (M gamma = {:.16e})",
        form.reconstruction_error(&theta),
        form.rates.iter().sum::<f64>(),
        net.sites() as f64 * net.gamma()
    ));

    let mut comparison = None;
    if let Some(ClosedForm::Evenodd) = args.closed_form {
        let spec = network
            .regular()
            .ok_or_else(|| Failure::validation("gksl --closed-form evenodd: spec must use `regular`"))?;
        let (tau1, phi1) = evenodd_parameters(spec)?;
        let closed = lindblad_closed_form_evenodd(spec.sites(), tau1, spec.gamma())
            .context("gksl --closed-form evenodd")?
            .regauged(phi1 + FRAC_PI_2);
        let (rates, projectors, heff) = form_deviation(&form, &closed);
        g.report.note(format_args!(
            "closed form deviation: rates {rates:e}, projectors {projectors:e}, heff {heff:e}"
        ));
        let worst = rates.max(projectors).max(heff);
        if !(worst <= CLOSED_FORM_TOLERANCE) {
            return Err(Failure::physicality(format!(
                "gksl --closed-form evenodd: deviation {worst:e} exceeds {CLOSED_FORM_TOLERANCE:e}"
            )));
        }
        comparison = Some(json!({ "rates": rates, "projectors": projectors, "heff": heff }));
    }

    Ok(match g.format_or(Format::Json) {
        Format::Json => {
            let lindblad: Vec<Value> = form
                .lindblad
                .column_iter()
                .map(|col| Value::Array(col.iter().map(|&z| complex_pair(z)).collect()))
                .collect();
            let mut out = json!({
                "rates": form.rates,
                "lindblad": lindblad,
                "heff": complex_rows(&form.heff),
            });
            if let Some(c) = comparison {
                out["closed_form_deviation"] = c;
            }
            json_text(&out)
        }
        Format::Csv => {
            // Long format: rates as (rate, i, 0), L_i entries as (lindblad, i, m), h as (heff, m, m').
            let mut table = Table::new(["block", "row", "col", "re", "im"]);
            for (i, &r) in form.rates.iter().enumerate() {
                table.row(["rate".into(), (i + 1).to_string(), "0".into(), float(r), float(0.0)]);
            }
            let n = form.sites();
            for i in 0..n {
                for m in 0..n {
                    let z = form.lindblad[(m, i)];
                    table.row(["lindblad".into(), (i + 1).to_string(), (m + 1).to_string(), float(z.re), float(z.im)]);
                }
            }
            for m in 0..n {
                for mp in 0..n {
                    let z = form.heff[(m, mp)];
                    table.row(["heff".into(), (m + 1).to_string(), (mp + 1).to_string(), float(z.re), float(z.im)]);
                }
            }
            table.into_string()
        }
    })
}

fn xi(args: &XiArgs, g: &Global) -> Outcome<String> {
    let network = load_network(&args.spec)?;
    let spec = network
        .regular()
        .ok_or_else(|| Failure::validation("xi: spec must use `regular`"))?;
    let kmax = args.kmax.unwrap_or(spec.sites() - 1);
    let profile = xi_profile(spec, kmax).context("xi --kmax")?;
    Ok(match g.format_or(Format::Csv) {
        Format::Csv => {
            let mut table = Table::new(["k", "re", "im", "abs"]);
            for (i, z) in profile.xi.iter().enumerate() {
                table.row([(i + 1).to_string(), float(z.re), float(z.im), float(z.norm())]);
            }
            table.into_string()
        }
        Format::Json => {
            let rows: Vec<Value> = profile
                .xi
                .iter()
                .enumerate()
                .map(|(i, z)| json!({ "k": i + 1, "re": z.re, "im": z.im, "abs": z.norm() }))
                .collect();
            json_text(&Value::Array(rows))
        }
    })
}

fn design(args: &DesignArgs, g: &Global) -> Outcome<String> {
    if g.format == Some(Format::Csv) {
        return Err(Failure::validation("design: the schedule is a spec file and is always JSON"));
    }
    let count = args.count.unwrap_or(10 * args.order.max(1));
    let schedule = design_pruned(args.order, args.tau, g.angle(args.phi), count).context("design")?;
    let spec = schedule.to_regular(args.loss, args.gamma).context("design")?;
    g.report.note(format_args!(
        "design: order {} kept with |xi| = {:.16e}; largest other |xi_k| up to k = {} is {:e}",
        schedule.n, schedule.retained_modulus, count, schedule.max_pruned
    ));
    Ok(SpecFile::from_regular(&spec).to_json())
}

/// `|ξ_1..ξ_kmax|` of the two-channel network `(τ_1, φ_1; τ_2 = 0, φ_2)`.
pub fn two_channel_moduli(tau1: f64, phi1: f64, phi2: f64, kmax: usize) -> cascade_core::Result<Vec<f64>> {
    let t = transfer_matrix(&[tau1], &[phi1, phi2])?;
    Ok(xi_profile_closed(&t, kmax)?.moduli())
}

fn grid(points: usize, span: f64) -> Vec<f64> {
    if points == 1 {
        return vec![0.0];
    }
    (0..points).map(|i| span * i as f64 / (points - 1) as f64).collect()
}

/// Rows `(τ_1, φ_2, k, |ξ_k|)`, ordered by τ_1, then φ_2, then k.
pub fn sweep_rows(phi1: f64, tau_points: usize, phi_points: usize, kmax: usize) -> Outcome<Vec<(f64, f64, usize, f64)>> {
    if tau_points == 0 || phi_points == 0 || kmax == 0 {
        return Err(Failure::validation("sweep: --tau-points, --phi-points and --kmax must be positive"));
    }
    if !phi1.is_finite() {
        return Err(Failure::validation("sweep --phi1: must be finite"));
    }
    let taus = grid(tau_points, 1.0);
    let phis = grid(phi_points, TAU);
    let points: Vec<(f64, f64)> = taus.iter().flat_map(|&t| phis.iter().map(move |&p| (t, p))).collect();
    let moduli = points
        .par_iter()
        .map(|&(t, p)| two_channel_moduli(t, phi1, p, kmax))
        .collect::<cascade_core::Result<Vec<_>>>()
        .context("sweep")?;
    Ok(points
        .iter()
        .zip(moduli)
        .flat_map(|(&(t, p), m)| m.into_iter().enumerate().map(move |(i, a)| (t, p, i + 1, a)))
        .collect())
}

fn sweep(args: &SweepArgs, g: &Global) -> Outcome<String> {
    let rows = sweep_rows(g.angle(args.phi1), args.tau_points, args.phi_points, args.kmax)?;
    Ok(match g.format_or(Format::Csv) {
        Format::Csv => {
            let mut table = Table::new(["tau1", "phi2", "k", "abs_xi"]);
            for (t, p, k, a) in rows {
                table.row([float(t), float(p), k.to_string(), float(a)]);
            }
            table.into_string()
        }
        Format::Json => {
            let rows: Vec<Value> = rows
                .into_iter()
                .map(|(t, p, k, a)| json!({ "tau1": t, "phi2": p, "k": k, "abs_xi": a }))
                .collect();
            json_text(&Value::Array(rows))
        }
    })
}

fn threshold(args: &ThresholdArgs, g: &Global) -> Outcome<String> {
    if args.kmin > args.kmax {
        return Err(Failure::validation(format!(
            "threshold: --kmin {} exceeds --kmax {}",
            args.kmin, args.kmax
        )));
    }
    let values = (args.kmin..=args.kmax)
        .map(|k| {
            let v = match args.refine {
                Some(tol) => threshold_refine(k, args.step, tol),
                None => threshold_scan(k, args.step),
            };
            v.map(|v| (k, v))
        })
        .collect::<cascade_core::Result<Vec<_>>>()
        .context("threshold")?;
    Ok(match g.format_or(Format::Csv) {
        Format::Csv => {
            let mut table = Table::new(["k", "threshold"]);
            for (k, v) in values {
                table.row([k.to_string(), float(v)]);
            }
            table.into_string()
        }
        Format::Json => {
            let rows: Vec<Value> = values.into_iter().map(|(k, v)| json!({ "k": k, "threshold": v })).collect();
            json_text(&Value::Array(rows))
        }
    })
}

fn simulate(args: &SimulateArgs, g: &Global) -> Outcome<String> {
    let net = load_network(&args.spec)?.expanded();
    let sites = net.sites();
    let cap = DimensionCap(args.dim_cap);
    if args.dim_cap > DimensionCap::default().0 {
        g.report.note(format_args!(
            "simulate: dimension cap raised to {}; dense states need d^(2M) complex entries",
            args.dim_cap
        ));
    }
    let gen = match args.generator {
        GeneratorKind::Cascade => cascade_generator(&net, args.d, cap).context("simulate")?,
        GeneratorKind::Gksl => {
            let zeta = coupling_matrix(&net);
            let form = gksl_decompose(&build_theta(&zeta, net.gamma()), &zeta).context("simulate")?;
            gksl_generator(&form, args.d, cap).context("simulate")?
        }
    };
    let rho0 = if args.superpose {
        let mut occ = vec![0usize; sites];
        for &s in &args.init {
            if s == 0 || s > sites {
                return Err(Failure::from_core("simulate --init", cascade_core::Error::Site { site: s, sites }));
            }
            occ[s - 1] = 1;
        }
        let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        TruncatedState::superposition(args.d, sites, &[(h, vec![0; sites]), (h, occ)])
    } else {
        TruncatedState::excited(args.d, sites, &args.init)
    }
    .context("simulate --init")?;

    let options = EvolveOptions {
        sample_every: args.every.max(1),
        ..EvolveOptions::default()
    };
    let traj = evolve_with(&gen, &rho0, args.t_final, args.dt, &options).context("simulate")?;
    if let Some(err) = traj.error_estimate {
        g.report.note(format_args!(
            "simulate: step {:e}, step-halving difference {err:e}",
            traj.step
        ));
    }

    let with_moments = args.observables == Observables::Moments;
    Ok(match g.format_or(Format::Csv) {
        Format::Csv => {
            let mut header = vec!["t".to_string()];
            header.extend((1..=sites).map(|m| format!("n_{m}")));
            if with_moments {
                for m in 1..=sites {
                    header.push(format!("re_a_{m}"));
                    header.push(format!("im_a_{m}"));
                }
            }
            let mut table = Table::new(header);
            for (t, state) in traj.times.iter().zip(&traj.states) {
                let mut row = vec![float(*t)];
                row.extend(state.populations().into_iter().map(float));
                if with_moments {
                    for z in state.moments() {
                        row.push(float(z.re));
                        row.push(float(z.im));
                    }
                }
                table.row(row);
            }
            table.into_string()
        }
        Format::Json => {
            let mut out = json!({
                "t": traj.times,
                "step": traj.step,
                "error_estimate": traj.error_estimate,
                "populations": traj.states.iter().map(|s| s.populations()).collect::<Vec<_>>(),
            });
            if with_moments {
                out["moments"] = Value::Array(
                    traj.states
                        .iter()
                        .map(|s| Value::Array(s.moments().into_iter().map(complex_pair).collect()))
                        .collect(),
                );
            }
            json_text(&out)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_rows_are_ordered_and_bounded() {
        let rows = sweep_rows(0.0, 3, 4, 4).unwrap();
        assert_eq!(rows.len(), 3 * 4 * 4);
        assert_eq!(rows[0].0, 0.0);
        assert_eq!(rows.last().unwrap().0, 1.0);
        assert_eq!(rows[3].2, 4);
        assert!(rows.iter().all(|r| r.3 <= 1.0 + 1e-12));
    }

    #[test]
    fn sweep_boundaries() {
        for (t, _, k, a) in sweep_rows(0.0, 2, 9, 6).unwrap() {
            let expect = if t == 0.0 || k % 2 == 0 { 1.0 } else { 0.0 };
            assert!((a - expect).abs() < 1e-10, "tau1 = {t}, k = {k}: {a}");
        }
    }

    #[test]
    fn grid_endpoints_are_exact() {
        assert_eq!(grid(5, 1.0), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(*grid(7, TAU).last().unwrap(), TAU);
        assert_eq!(grid(1, TAU), vec![0.0]);
    }

    #[test]
    fn evenodd_shape_is_recognised() {
        let spec = evenodd_spec(5, 0.4, 1.0, 1.0).unwrap();
        assert_eq!(evenodd_parameters(&spec).unwrap(), (0.4, 1.0));
        let other = RegularSpec::new(3, &[0.4, 0.5], &[1.0, 0.0], 0.0, 1.0).unwrap();
        assert!(evenodd_parameters(&other).is_err());
    }

    #[test]
    fn closed_form_deviation_is_small_for_evenodd() {
        for m in 2..=6 {
            let spec = evenodd_spec(m, 0.3, 0.7, 1.2).unwrap();
            let zeta = coupling_matrix(&spec.expand());
            let form = gksl_decompose(&build_theta(&zeta, 1.2), &zeta).unwrap();
            let closed = lindblad_closed_form_evenodd(m, 0.3, 1.2).unwrap().regauged(0.7 + FRAC_PI_2);
            let (r, p, h) = form_deviation(&form, &closed);
            assert!(r < 1e-10 && p < 1e-10 && h < 1e-10, "M = {m}: {r:e} {p:e} {h:e}");
        }
    }
}
