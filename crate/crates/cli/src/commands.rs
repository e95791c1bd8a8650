use std::f64::consts::PI;

use clap::{Args, ValueEnum};

use fibdiff_core::cps::{self, check_dual_uniform_discreteness, check_no_integer_in, max_gap};
use fibdiff_core::diffraction::{figure1_data, smoothed_periodogram, verify_bragg_lower_bounds, BraggOptions};
use fibdiff_core::pingpong::{
    build_phi, certify_almost_periods, certify_diffraction_almost_period, epsilon_alpha, lattice_psf_check,
    ping_identity_check, sample_almost_periods, sinc_lipschitz_check, CertifyOptions, DiffractionCertOptions,
    PhiNormalization, PingOptions,
};
use fibdiff_core::subset::{SubsetSpec, RNG_NAME};
use fibdiff_core::{Bound, LatticePoint, ModelSetQuery, Side, Surd, TAU};

use crate::expr::{parse_expr, parse_interval, parse_list, parse_number, show_interval};
use crate::fields;
use crate::output::{Cell, Report};

type Res = Result<Report, String>;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn subset(spec: &str, n: f64) -> Result<(SubsetSpec, fibdiff_core::WeightedComb), String> {
    let s: SubsetSpec = spec.parse().map_err(err)?;
    let comb = s.realize(n).map_err(err)?;
    Ok((s, comb))
}

fn seed_of(s: &SubsetSpec) -> Cell {
    match s {
        SubsetSpec::Bernoulli { seed, .. } => Cell::U(*seed),
        _ => Cell::Null,
    }
}

fn exact(src: &str) -> Result<Surd, String> {
    match parse_expr(src)? {
        Bound::Exact(s) => Ok(s),
        Bound::Approx(_) => Err(format!("{src:?} must be exact (no pi)")),
    }
}

fn coords(p: LatticePoint) -> (Cell, Cell) {
    let (m, n) = match p {
        LatticePoint::Direct(q) => (q.m, q.n),
        LatticePoint::Dual(d) => d.lattice_coords(),
    };
    (Cell::I(m), Cell::I(n))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    Direct,
    Dual,
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    #[arg(long, value_enum, default_value = "direct")]
    pub side: SideArg,
    /// Acceptance window in internal space, e.g. `[-1,tau-1)` or `(-0.1,0.1)`.
    #[arg(long, default_value = "[-1,tau-1)", allow_hyphen_values = true)]
    pub window: String,
    /// Physical range, e.g. `[-2,2]`.
    #[arg(long, allow_hyphen_values = true)]
    pub range: String,
}

pub fn generate(a: &GenerateArgs) -> Res {
    let window = parse_interval(&a.window)?;
    let range = parse_interval(&a.range)?;
    let side = match a.side {
        SideArg::Direct => Side::Direct,
        SideArg::Dual => Side::Dual,
    };
    let e = cps::enumerate(&ModelSetQuery::new(side, window, range)).map_err(err)?;
    let positions = e.positions();
    let gap = if positions.len() >= 2 { max_gap(&positions, range.lo_f64(), range.hi_f64()).ok() } else { None };
    let rows = e
        .points
        .iter()
        .map(|p| {
            let (m, n) = coords(p.point);
            vec![Cell::F(p.position), Cell::F(p.star), m, n]
        })
        .collect();
    Ok(Report {
        config: fields![
            ("side", format!("{:?}", a.side).to_lowercase()),
            ("window", show_interval(&window)),
            ("range", show_interval(&range)),
        ],
        columns: vec!["position", "star", "m", "n"],
        rows,
        summary: fields![("count", e.len()), ("guard_band_hits", e.guard_band_hits), ("max_gap", gap)],
        ..Default::default()
    })
}

#[derive(Args, Debug)]
pub struct BraggArgs {
    /// `full | empty | bernoulli:p=<f>:seed=<u64> | stride:k=<int> | file:<path>`.
    #[arg(long, default_value = "full")]
    pub subset: String,
    /// Averaging radius.
    #[arg(long, default_value = "1e4")]
    pub n: String,
    #[arg(long, default_value = "0.9")]
    pub eps: String,
    #[arg(long, default_value = "[-20,20]", allow_hyphen_values = true)]
    pub range: String,
    #[arg(long, default_value = "0.5")]
    pub lag_fraction: String,
    /// Absolute tolerance; default `0.05 I sqrt(1e4/n)`.
    #[arg(long)]
    pub finite_size_tol: Option<String>,
    #[arg(long, default_value = "0.02")]
    pub agreement_tol: String,
}

pub fn bragg(a: &BraggArgs) -> Res {
    let n = parse_number(&a.n)?;
    let eps = parse_number(&a.eps)?;
    let range = parse_interval(&a.range)?;
    let (spec, comb) = subset(&a.subset, n)?;
    let opts = BraggOptions {
        lag_fraction: parse_number(&a.lag_fraction)?,
        finite_size_tol: a.finite_size_tol.as_deref().map(parse_number).transpose()?,
        agreement_tol: parse_number(&a.agreement_tol)?,
    };
    let v = verify_bragg_lower_bounds(&comb, n, eps, range, &opts).map_err(err)?;
    let mut failed_rows = Vec::new();
    let rows = v
        .reports
        .iter()
        .enumerate()
        .map(|(i, r)| {
            if !(r.pass && r.agree) {
                failed_rows.push(i);
            }
            let (m, nn) = coords(LatticePoint::Dual(r.tag));
            vec![
                Cell::F(r.k),
                Cell::F(r.k_star),
                Cell::F(r.measured),
                Cell::F(r.bound),
                Cell::B(r.pass),
                Cell::F(n),
                Cell::S("autocorr_sum".into()),
                m,
                nn,
                Cell::F(r.bound_s),
                Cell::F(r.bound_eps),
                Cell::F(r.measured_amplitude),
                Cell::F(r.imag_residual),
                Cell::F(r.finite_size_tol),
                Cell::B(r.pass_s),
                Cell::B(r.agree),
            ]
        })
        .collect();
    let all_pass = v.all_pass();
    let note = if v.vacuous { "I = 0: the lower bounds are vacuous" } else { "" };
    Ok(Report {
        config: fields![
            ("subset", spec.to_string()),
            ("rng", RNG_NAME),
            ("seed", seed_of(&spec)),
            ("n", n),
            ("eps", eps),
            ("range", show_interval(&range)),
            ("lag_fraction", opts.lag_fraction),
            ("finite_size_tol", opts.finite_size_tol),
            ("agreement_tol", opts.agreement_tol),
        ],
        columns: vec![
            "k",
            "k_star",
            "intensity",
            "bound",
            "pass",
            "n",
            "method",
            "tag_m",
            "tag_n",
            "bound_s",
            "bound_eps",
            "intensity_amplitude",
            "imag_residual",
            "finite_size_tol",
            "pass_s",
            "agree",
        ],
        rows,
        summary: fields![
            ("points", comb.len()),
            ("intensity_zero", v.intensity_zero),
            ("intensity_zero_amplitude", v.intensity_zero_amplitude),
            ("density", v.density),
            ("finite_size_tol", v.finite_size_tol),
            ("vacuous", v.vacuous),
            ("note", note),
            ("peaks", v.reports.len()),
            ("failures", failed_rows.len()),
            ("all_pass", all_pass),
        ],
        failed: !all_pass,
        failed_rows: if v.vacuous { Vec::new() } else { failed_rows },
    })
}

#[derive(Args, Debug)]
pub struct AlmostPeriodsArgs {
    /// Comma-separated α grid; t is sampled from the dual model set with window [-α, α].
    #[arg(long, default_value = "1e-3,1e-4,1e-5")]
    pub alpha: String,
    /// Samples per α: the nonzero points nearest the origin.
    #[arg(long, default_value_t = 20)]
    pub count: usize,
    /// Truncation radius in internal space.
    #[arg(long = "y", default_value = "50")]
    pub y: String,
    #[arg(long, default_value = "[-0.5,1.5]", allow_hyphen_values = true)]
    pub k: String,
    /// Translates of K are swept over [-R, R].
    #[arg(long, default_value = "100")]
    pub physical_range: String,
}

fn certify_options(y: &str, k: &str, r: &str) -> Result<CertifyOptions, String> {
    let k = parse_interval(k)?;
    Ok(CertifyOptions { y: parse_number(y)?, k_lo: k.lo_f64(), k_hi: k.hi_f64(), physical_range: parse_number(r)? })
}

pub fn almost_periods(a: &AlmostPeriodsArgs) -> Res {
    let alphas = parse_list(&a.alpha)?;
    let o = certify_options(&a.y, &a.k, &a.physical_range)?;
    let mut rows = Vec::new();
    let mut failed_rows = Vec::new();
    for &alpha in &alphas {
        let ts = sample_almost_periods(alpha, a.count).map_err(err)?;
        for r in certify_almost_periods(&ts, &o).map_err(err)? {
            if !r.pass {
                failed_rows.push(rows.len());
            }
            let (m, n) = coords(LatticePoint::Dual(r.t_tag));
            rows.push(vec![
                Cell::F(alpha),
                Cell::F(r.t),
                Cell::F(r.t_star),
                m,
                n,
                Cell::F(r.alpha),
                Cell::F(r.truncated_norm),
                Cell::F(r.tail_bound),
                Cell::F(r.paper_bound),
                Cell::B(r.pass),
                Cell::F(r.y),
                Cell::Pair(r.k[0], r.k[1]),
            ]);
        }
    }
    Ok(Report {
        config: fields![
            ("alpha", a.alpha.clone()),
            ("count", a.count),
            ("Y", o.y),
            ("K", Cell::Pair(o.k_lo, o.k_hi)),
            ("physical_range", o.physical_range),
        ],
        columns: vec![
            "alpha_grid",
            "t",
            "t_star",
            "tag_m",
            "tag_n",
            "alpha",
            "truncated_norm",
            "tail_bound",
            "paper_bound",
            "pass",
            "Y",
            "K",
        ],
        summary: fields![("certificates", rows.len()), ("failures", failed_rows.len())],
        rows,
        failed: !failed_rows.is_empty(),
        failed_rows,
    })
}

#[derive(Args, Debug)]
pub struct DiffPeriodsArgs {
    #[arg(long, default_value = "full")]
    pub subset: String,
    #[arg(long, default_value = "1e4")]
    pub n: String,
    /// t is sampled from the dual model set with window ±4 ε^(4/3)/1e5.
    #[arg(long, default_value = "0.5")]
    pub epsilon: String,
    #[arg(long, default_value_t = 10)]
    pub count: usize,
    /// Bragg atoms kept: |k*| <= y_bragg.
    #[arg(long, default_value = "10")]
    pub y_bragg: String,
    #[arg(long, default_value = "10")]
    pub physical_range: String,
    #[arg(long = "y", default_value = "50")]
    pub y: String,
    #[arg(long, default_value = "0.05")]
    pub tol: String,
}

pub fn diff_periods(a: &DiffPeriodsArgs) -> Res {
    let n = parse_number(&a.n)?;
    let eps = parse_number(&a.epsilon)?;
    let (spec, comb) = subset(&a.subset, n)?;
    let o = DiffractionCertOptions {
        y_bragg: parse_number(&a.y_bragg)?,
        physical_range: parse_number(&a.physical_range)?,
        omega: CertifyOptions { y: parse_number(&a.y)?, ..Default::default() },
        epsilon: Some(eps),
        tol: parse_number(&a.tol)?,
    };
    let alpha = epsilon_alpha(eps);
    let ts = sample_almost_periods(alpha, a.count).map_err(err)?;
    let mut rows = Vec::new();
    let mut failed_rows = Vec::new();
    let mut density = 0.0;
    for t in ts {
        let r = certify_diffraction_almost_period(&comb, n, t, &o).map_err(err)?;
        density = r.density;
        if !r.pass {
            failed_rows.push(rows.len());
        }
        let (m, nn) = coords(LatticePoint::Dual(r.t_tag));
        rows.push(vec![
            Cell::F(r.t),
            Cell::F(r.t_star),
            m,
            nn,
            Cell::F(r.norm),
            Cell::F(r.omega.truncated_norm),
            Cell::F(r.omega.tail_bound),
            Cell::F(r.omega_bound),
            Cell::B(r.omega_pass),
            r.epsilon_pass.into(),
            Cell::B(r.pass),
        ]);
    }
    Ok(Report {
        config: fields![
            ("subset", spec.to_string()),
            ("rng", RNG_NAME),
            ("seed", seed_of(&spec)),
            ("n", n),
            ("epsilon", eps),
            ("alpha", alpha),
            ("count", a.count),
            ("y_bragg", o.y_bragg),
            ("physical_range", o.physical_range),
            ("Y", o.omega.y),
            ("tol", o.tol),
        ],
        columns: vec![
            "t",
            "t_star",
            "tag_m",
            "tag_n",
            "norm",
            "omega_truncated_norm",
            "omega_tail_bound",
            "omega_bound",
            "omega_pass",
            "epsilon_pass",
            "pass",
        ],
        summary: fields![("density", density), ("certificates", rows.len()), ("failures", failed_rows.len())],
        rows,
        failed: !failed_rows.is_empty(),
        failed_rows,
    })
}

#[derive(Args, Debug)]
pub struct PingArgs {
    #[arg(long, default_value = "full")]
    pub subset: String,
    #[arg(long, default_value = "1e4")]
    pub n: String,
    #[arg(long = "y", default_value = "50")]
    pub y: String,
    #[arg(long, default_value = "[0,1]", allow_hyphen_values = true)]
    pub k_window: String,
    #[arg(long, default_value = "2")]
    pub k_star_max: String,
    #[arg(long, default_value = "80")]
    pub q_radius: String,
    /// Box half-width b of φ; exact expression.
    #[arg(long, default_value = "1/20")]
    pub phi_halfwidth: String,
    #[arg(long, default_value = "1e-2")]
    pub tol: String,
    /// Frequencies kept in the integer-lattice Poisson check.
    #[arg(long, default_value_t = 100_000)]
    pub psf_kmax: u64,
}

pub fn ping(a: &PingArgs) -> Res {
    let n = parse_number(&a.n)?;
    let kw = parse_interval(&a.k_window)?;
    let (spec, comb) = subset(&a.subset, n)?;
    let o = PingOptions {
        k_lo: kw.lo_f64(),
        k_hi: kw.hi_f64(),
        y: parse_number(&a.y)?,
        k_star_max: parse_number(&a.k_star_max)?,
        q_radius: parse_number(&a.q_radius)?,
        phi_halfwidth: exact(&a.phi_halfwidth)?,
        tol: parse_number(&a.tol)?,
        ..Default::default()
    };
    let r = ping_identity_check(&comb, n, &o).map_err(err)?;
    let phi = build_phi(o.phi_halfwidth, PhiNormalization::UnitAutocorrelation).map_err(err)?;
    let psf = lattice_psf_check(&phi, a.psf_kmax, 1e-10).map_err(err)?;
    let rows: Vec<Vec<Cell>> = r
        .atoms
        .iter()
        .map(|p| vec![Cell::F(p.k), Cell::F(p.k_star), Cell::F(p.gamma_hat), Cell::F(p.omega_nu), Cell::F(p.error)])
        .collect();
    let failed_rows = (0..rows.len()).filter(|&i| r.atoms[i].error > r.tol + r.truncation_budget).collect();
    Ok(Report {
        config: fields![
            ("subset", spec.to_string()),
            ("rng", RNG_NAME),
            ("seed", seed_of(&spec)),
            ("n", n),
            ("Y", o.y),
            ("k_window", show_interval(&kw)),
            ("k_star_max", o.k_star_max),
            ("q_radius", o.q_radius),
            ("phi_halfwidth", o.phi_halfwidth.to_string()),
            ("normalization", "unit_autocorrelation"),
            ("tol", o.tol),
            ("psf_kmax", a.psf_kmax),
        ],
        columns: vec!["k", "k_star", "gamma_hat", "omega_nu", "error"],
        rows,
        summary: fields![
            ("density", r.density),
            ("nu_mass", r.nu_mass),
            ("nu_atoms", r.nu_atoms),
            ("max_abs_error", r.max_abs_error),
            ("worst_k", r.worst_k),
            ("truncation_budget", r.truncation_budget),
            ("pass", r.pass),
            ("psf_lhs", psf.lhs),
            ("psf_rhs", psf.rhs),
            ("psf_error", psf.error),
            ("psf_tail_bound", psf.tail_bound),
            ("psf_pass", psf.pass),
        ],
        failed: !(r.pass && psf.pass),
        failed_rows,
    })
}

#[derive(Args, Debug)]
pub struct Figure1Args {
    #[arg(long, default_value = "[-500,500]", allow_hyphen_values = true)]
    pub range: String,
    /// ε levels reported per peak.
    #[arg(long, default_value = "0.1,0.25,0.5,0.75,0.9,1")]
    pub eps_grid: String,
}

pub fn figure1(a: &Figure1Args) -> Res {
    let range = parse_interval(&a.range)?;
    let grid = parse_list(&a.eps_grid)?;
    let rows_data = figure1_data(&grid, range).map_err(err)?;
    let ks: Vec<f64> = rows_data.iter().map(|r| r.k).collect();
    let gap = if ks.len() >= 2 { max_gap(&ks, range.lo_f64(), range.hi_f64()).ok() } else { None };
    Ok(Report {
        config: fields![("range", show_interval(&range)), ("eps_grid", a.eps_grid.clone())],
        columns: vec!["k", "k_star", "fraction", "min_epsilon"],
        rows: rows_data
            .iter()
            .map(|r| vec![Cell::F(r.k), Cell::F(r.k_star), Cell::F(r.fraction), r.min_epsilon.into()])
            .collect(),
        summary: fields![("peaks", rows_data.len()), ("max_gap", gap)],
        ..Default::default()
    })
}

#[derive(Args, Debug)]
pub struct PeriodogramArgs {
    #[arg(long, default_value = "full")]
    pub subset: String,
    #[arg(long, default_value = "1e4")]
    pub n: String,
    /// Evaluation points, comma-separated.
    #[arg(long, default_value = "0.3,1.3,2.7", allow_hyphen_values = true)]
    pub k: String,
    #[arg(long, default_value = "0.05")]
    pub bandwidth: String,
}

pub fn periodogram(a: &PeriodogramArgs) -> Res {
    let n = parse_number(&a.n)?;
    let (spec, comb) = subset(&a.subset, n)?;
    let ks = parse_list(&a.k)?;
    let h = parse_number(&a.bandwidth)?;
    let pts = smoothed_periodogram(&comb, n, &ks, h).map_err(err)?;
    Ok(Report {
        config: fields![
            ("subset", spec.to_string()),
            ("rng", RNG_NAME),
            ("seed", seed_of(&spec)),
            ("n", n),
            ("k", a.k.clone()),
            ("bandwidth", h),
        ],
        columns: vec!["k", "density"],
        rows: pts.iter().map(|p| vec![Cell::F(p.k), Cell::F(p.density)]).collect(),
        summary: fields![("points", comb.len())],
        ..Default::default()
    })
}

#[derive(Args, Debug)]
pub struct LemmasArgs {
    /// Random cell translates for the discreteness count.
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Grid points for each Lipschitz check.
    #[arg(long, default_value_t = 1_000_000)]
    pub grid: usize,
}

pub fn lemmas(a: &LemmasArgs) -> Res {
    let mut rows = Vec::new();
    let mut failed_rows = Vec::new();
    let mut push = |rows: &mut Vec<Vec<Cell>>, check: &str, param: String, value: Cell, bound: Cell, pass: bool| {
        if !pass {
            failed_rows.push(rows.len());
        }
        rows.push(vec![Cell::S(check.into()), Cell::S(param), value, bound, Cell::B(pass)]);
    };
    for m in [-3, -2, -1, 1] {
        let ok = check_no_integer_in(m).map_err(err)?;
        let x = m as f64 * TAU;
        push(&mut rows, "no_integer", format!("m={m}"), Cell::F(x.ceil() - x), Cell::F(0.2), ok);
    }
    let d = check_dual_uniform_discreteness(a.trials, a.seed).map_err(err)?;
    push(
        &mut rows,
        "difference_set",
        "[-2,2]x[-1/10,1/10]".into(),
        Cell::U(d.reduction.len() as u64),
        Cell::U(1),
        d.reduction.len() == 1 && d.reduction[0].is_zero(),
    );
    push(
        &mut rows,
        "cell_count",
        format!("trials={}", d.trials),
        Cell::U(d.max_count as u64),
        Cell::U(1),
        d.max_count <= 1,
    );
    for (a_, b_) in [(2.0 * PI * (TAU + 1.0), 2.0 * PI / 3.0), (1.0, 1.0), (1.0, 3.0), (3.0, 1.0), (0.5, 2.0)] {
        let r = sinc_lipschitz_check(a_, b_, a.grid).map_err(err)?;
        push(&mut rows, "lipschitz", format!("a={a_},b={b_}"), Cell::F(r.certified_sup), Cell::F(r.bound), r.pass);
    }
    let literal: Vec<String> = d
        .literal_region
        .iter()
        .map(|p| {
            let (m, n) = p.lattice_coords();
            format!("({m} {n})")
        })
        .collect();
    Ok(Report {
        config: fields![("trials", a.trials), ("rng", RNG_NAME), ("seed", a.seed), ("grid", a.grid)],
        columns: vec!["check", "parameter", "value", "bound", "pass"],
        summary: fields![("literal_region_points", literal.join(" ")), ("failures", failed_rows.len()),],
        rows,
        failed: !failed_rows.is_empty(),
        failed_rows,
    })
}
