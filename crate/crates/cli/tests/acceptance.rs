//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

use curveflow::euler_system::{
    invariants_of_flow, solution_family_1, solution_family_2, Family, FlowField, SolutionConstants,
};
use curveflow::quotient::{quotsol1, quotsol2, Branch, TresseField};
use curveflow::thermo::{GasParams, PlanckPotential, Polynomial};
use curveflow::virial_flow::{integrate_trajectory, ReducedParams, Termination};
use curveflow_cli::verify::{self, Measurement};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::process::Command;
use std::time::{Duration, Instant};

const LOCATION_TOL: f64 = 1e-12;
const QUOTIENT_TOL: f64 = 1e-8;
const EULER_TOL: f64 = 1e-6;
const CORRESPONDENCE_TOL: f64 = 1e-6;
const SYMBOL_TOL: f64 = 1e-12;
const ZEROTH_TOL: f64 = 1e-10;
const TELESCOPING_TOL: f64 = 1e-12;
const FIRST_ORDER_TOL: f64 = 1e-6;
const DERIVATIVE_TOL: f64 = 1e-6;
const ODE_TOL: f64 = 1e-6;
const ANNULUS: (f64, f64) = (1e-3, 0.5);

const FIXED_POINT_BUDGET: Duration = Duration::from_secs(1);
const QUOTIENT_BUDGET: Duration = Duration::from_secs(5);
const EULER_BUDGET: Duration = Duration::from_secs(30);

/// Expected `(y, N₀, class)` of each equilibrium.
type Inventory = &'static [(f64, f64, &'static str)];
type Criterion = (&'static str, fn() -> Verdict);

struct Verdict {
    pass: bool,
    summary: String,
}

fn verdict(pass: bool, summary: impl Into<String>) -> Verdict {
    Verdict { pass, summary: summary.into() }
}

fn within(m: &Measurement, tol: f64, label: &str) -> (bool, String) {
    (m.passes(tol), format!("{label} {:.3e} <= {tol:e} ({})", m.max_residual, m.detail))
}

fn combine(parts: &[(bool, String)]) -> Verdict {
    verdict(parts.iter().all(|p| p.0), parts.iter().map(|p| p.1.as_str()).collect::<Vec<_>>().join("; "))
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_curveflow"))
}

fn default_gas() -> GasParams {
    GasParams::new(1.0, 3, 0.1, 1.0, 0.5).unwrap()
}

fn fixed_point_inventory() -> Verdict {
    let cases: [((f64, f64), Inventory); 4] = [
        ((-2.0, 1.0), &[(0.0, 0.0, "unstable-node"), (0.25, -0.5, "saddle"), (1.0, 1.0, "saddle")]),
        ((1.0, 2.0), &[(0.0, 0.0, "unstable-node")]),
        ((2.0, -3.0), &[(0.0, 0.0, "saddle"), (1.0, 1.0, "centre"), (2.25, -1.5, "unstable-spiral")]),
        ((-2.0, -1.0), &[(0.0, 0.0, "saddle")]),
    ];
    let mut worst: f64 = 0.0;
    let mut slowest = Duration::ZERO;
    let mut problems = Vec::new();
    for ((a, b), want) in cases {
        let start = Instant::now();
        let out = bin().args(["fixed-points", "-A", &a.to_string(), "-B", &b.to_string()]).output().unwrap();
        slowest = slowest.max(start.elapsed());
        if !out.status.success() {
            problems.push(format!("({a},{b}) exited {:?}", out.status.code()));
            continue;
        }
        let got: Vec<serde_json::Value> = serde_json::from_slice(&out.stdout).unwrap();
        if got.len() != want.len() {
            problems.push(format!("({a},{b}): {} points", got.len()));
            continue;
        }
        for &(y, n0, class) in want {
            let near = got
                .iter()
                .map(|g| (g["y"].as_f64().unwrap(), g["N0"].as_f64().unwrap(), g["class"].as_str().unwrap()))
                .min_by(|p, q| (p.0 - y).hypot(p.1 - n0).total_cmp(&(q.0 - y).hypot(q.1 - n0)))
                .unwrap();
            worst = worst.max((near.0 - y).abs()).max((near.1 - n0).abs());
            if near.2 != class {
                problems.push(format!("({a},{b}) at ({y},{n0}): {} not {class}", near.2));
            }
        }
    }
    let pass = problems.is_empty() && worst <= LOCATION_TOL && slowest < FIXED_POINT_BUDGET;
    let mut summary = format!("location error {worst:.3e}, slowest run {slowest:.2?}");
    if !problems.is_empty() {
        summary += &format!("; {}", problems.join("; "));
    }
    verdict(pass, summary)
}

fn quotient_exactness() -> Verdict {
    let start = Instant::now();
    let m = verify::quotient_exactness(1.0, 0.1, &mut ChaCha8Rng::seed_from_u64(1));
    let elapsed = start.elapsed();
    let (ok, text) = within(&m, QUOTIENT_TOL, "max |q|");
    verdict(ok && elapsed < QUOTIENT_BUDGET, format!("{text} in {elapsed:.2?}"))
}

fn euler_exactness() -> Verdict {
    let gas = default_gas();
    let start = Instant::now();
    let parts = [
        within(&verify::euler_exactness(&gas, Family::One, 1e-10), EULER_TOL, "family 1"),
        within(&verify::euler_exactness(&gas, Family::Two, 1e-10), EULER_TOL, "family 2"),
    ];
    let elapsed = start.elapsed();
    let v = combine(&parts);
    verdict(v.pass && elapsed < EULER_BUDGET, format!("{} in {elapsed:.2?}", v.summary))
}

/// The literal positive root `K = +sqrt(.)` on the half `t <= t_ref`.
fn positive_root_on_early_half() -> (bool, String) {
    let gas = default_gas();
    let c = verify::DEFAULT_CONSTANTS;
    let mut worst: f64 = 0.0;
    for fam in [Family::One, Family::Two] {
        let sc = SolutionConstants::new(c, fam).unwrap();
        let sol = match fam {
            Family::One => solution_family_1(sc, &gas, 1e-10).unwrap(),
            Family::Two => solution_family_2(sc, &gas, 1e-10).unwrap(),
        };
        let (lo, _) = sol.time_interval();
        for i in 1..10 {
            let t = sol.t_ref() - (sol.t_ref() - lo) * (0.05 + 0.09 * i as f64);
            for a in [0.5, 1.0, 2.0] {
                if !sol.is_valid(t, a) {
                    continue;
                }
                let inv = invariants_of_flow(&sol, t, a).unwrap();
                let j = match fam {
                    Family::One => quotsol1(c[0], c[1], 3, gas.omega(), Branch::Positive).unwrap().jet(inv.x, inv.y),
                    Family::Two => quotsol2(c[0], c[1], 3, gas.omega(), Branch::Positive).unwrap().jet(inv.x, inv.y),
                }
                .unwrap();
                for d in [inv.k - j.k, inv.l - j.l, inv.m - j.m, inv.n - j.n] {
                    worst = worst.max(d.abs());
                }
            }
        }
    }
    (worst <= CORRESPONDENCE_TOL, format!("positive root on t <= t_ref {worst:.3e} <= {CORRESPONDENCE_TOL:e}"))
}

fn correspondence() -> Verdict {
    let gas = default_gas();
    combine(&[
        within(
            &verify::correspondence(&gas, Family::One, 1e-10, &mut ChaCha8Rng::seed_from_u64(2)),
            CORRESPONDENCE_TOL,
            "family 1",
        ),
        within(
            &verify::correspondence(&gas, Family::Two, 1e-10, &mut ChaCha8Rng::seed_from_u64(3)),
            CORRESPONDENCE_TOL,
            "family 2",
        ),
        positive_root_on_early_half(),
    ])
}

fn virial_potential() -> PlanckPotential {
    let coeffs = [Polynomial::new(vec![0.2, -0.3, 0.05]), Polynomial::new(vec![0.0, 0.1])];
    PlanckPotential::virial(3, &coeffs, 2).unwrap()
}

fn symbol_identities() -> Verdict {
    let gas = default_gas();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut parts = Vec::new();
    for (label, pot) in [("ideal", PlanckPotential::ideal_gas(3).unwrap()), ("virial", virial_potential())] {
        parts.push(within(&verify::euler_symbol_identity(&gas, &pot, &mut rng), SYMBOL_TOL, &format!("euler/{label}")));
        parts.push(within(
            &verify::quotient_symbol_identity(&gas, &pot, &mut rng),
            SYMBOL_TOL,
            &format!("quotient/{label}"),
        ));
    }
    combine(&parts)
}

fn expansion_consistency() -> Verdict {
    let gas = default_gas();
    let (zeroth, telescoping) = verify::zeroth_along_trajectories(1.0, &mut ChaCha8Rng::seed_from_u64(6));
    combine(&[
        within(&zeroth, ZEROTH_TOL, "zeroth"),
        within(&telescoping, TELESCOPING_TOL, "telescoping"),
        within(&verify::first_order_residuals(&gas), FIRST_ORDER_TOL, "first order"),
    ])
}

fn numerical_hygiene() -> Verdict {
    let gas = default_gas();
    let virial = virial_potential();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    combine(&[
        within(
            &verify::potential_derivatives(&PlanckPotential::ideal_gas(3).unwrap(), &mut rng),
            DERIVATIVE_TOL,
            "ideal potential",
        ),
        within(&verify::potential_derivatives(&virial, &mut rng), DERIVATIVE_TOL, "virial potential"),
        within(&verify::quotsol_derivatives(&mut rng), DERIVATIVE_TOL, "quotsol"),
        within(
            &verify::solution_derivatives(&gas, &[Family::One, Family::Two], 1e-10, &mut rng),
            DERIVATIVE_TOL,
            "families",
        ),
        within(&verify::ode_self_convergence(), ODE_TOL, "ode 1e-6 vs 1e-9"),
    ])
}

fn centre_behaviour() -> Verdict {
    let p = ReducedParams::new(2.0, -3.0).unwrap();
    let traj = integrate_trajectory(&p, (1.05, 1.05), 50.0, 1e-10, None).unwrap();
    let (lo, hi) = traj
        .samples(10_001)
        .iter()
        .map(|&(_, y, n)| (y - 1.0).hypot(n - 1.0))
        .fold((f64::INFINITY, 0.0f64), |(l, h), d| (l.min(d), h.max(d)));
    let full = traj.termination == Termination::ReachedSMax && traj.path.t_end() == 50.0;
    verdict(
        full && lo >= ANNULUS.0 && hi <= ANNULUS.1,
        format!("distance to (1, 1) in [{lo:.4}, {hi:.4}] over s in [0, {}]", traj.path.t_end()),
    )
}

fn determinism() -> Verdict {
    let runs: [&[&str]; 4] = [
        &["verify"],
        &["portrait", "-A", "2", "-B", "-3"],
        &["portrait", "-A", "-2", "-B", "1", "--format", "csv"],
        &["portrait", "-A", "1", "-B", "2", "--format", "json", "--seed-count", "5"],
    ];
    let mut problems = Vec::new();
    for args in runs {
        let first = bin().args(args).output().unwrap();
        let second = bin().args(args).output().unwrap();
        if !first.status.success() {
            problems.push(format!("{args:?} exited {:?}", first.status.code()));
        }
        if first.stdout.is_empty() || first.stdout != second.stdout {
            problems.push(format!("{args:?} output differs"));
        }
    }
    let pass = problems.is_empty();
    verdict(pass, if pass { "verify and 3 portraits byte-identical, exit 0".into() } else { problems.join("; ") })
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("fixed-point inventory", fixed_point_inventory),
        ("quotient exactness", quotient_exactness),
        ("euler exactness", euler_exactness),
        ("correspondence", correspondence),
        ("symbol identities", symbol_identities),
        ("expansion consistency", expansion_consistency),
        ("numerical hygiene", numerical_hygiene),
        ("centre behaviour", centre_behaviour),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let v = check();
        if !v.pass {
            failed += 1;
        }
        println!("{} {}. {name}: {}", if v.pass { "PASS" } else { "FAIL" }, i + 1, v.summary);
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
