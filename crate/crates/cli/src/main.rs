mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_traits::One;
use serde_json::{json, Value};

use puretest::binomial::{
    abs_moment_identity, breakpoint_ladder, conjecture51_region_check, epsilon_n, first_pair_threshold_scan,
    krafft_bound_check, q_monotone_even_check, CheckStatus,
};
use puretest::exactnum::{format_rational, parse_rational};
use puretest::glrt::{lrt_p_value, lrt_statistic};
use puretest::majorization::seeded_t_chains;
use puretest::obd::{binomial_mode, conjecture7x_grid, conjectures7x_sweep, lemma73_decompose, obd};
use puretest::pst::{conjecture33_sweep, conjecture_grid, kld_gap, kld_uniform_to, point_report, pst_p_value};
use puretest::repeated::{
    bonferroni_level_check, conjecture81_sweep, counterexample_222, hybrid_test, hybrid_thresholds, lstar, ltilde,
    pstar_pvalue_conjectural, v_statistic, ObsMatrix,
};
use puretest::report::{ReportEnvelope, Status, Verdict};
use puretest::simplex::{set_max_outcomes, set_max_repeated, CellCounts, ProbVector, DEFAULT_MAX_OUTCOMES, DEFAULT_MAX_REPEATED};
use puretest::verify::verify_all;
use puretest::{Error, Rational};

use output::{render, Format, Output, Tabular};

#[derive(Parser)]
#[command(name = "puretest", version, about = "Exact pure significance tests for multinomial and binomial data")]
struct Cli {
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Cap on single-observation sample spaces.
    #[arg(long, global = true, env = "PURETEST_MAX_OUTCOMES", default_value_t = DEFAULT_MAX_OUTCOMES)]
    max_outcomes: u64,
    /// Cap on repeated-observation sample spaces.
    #[arg(long, global = true, env = "PURETEST_MAX_REPEATED", default_value_t = DEFAULT_MAX_REPEATED)]
    max_repeated: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pure significance test against a simple multinomial null.
    #[command(subcommand)]
    Pst(PstCmd),
    /// Likelihood ratio test against the full multinomial family.
    #[command(subcommand)]
    Glrt(GlrtCmd),
    /// Binomial rank profiles and the expected p-value inequality.
    #[command(subcommand)]
    Binomial(BinomialCmd),
    /// Ordered binomial distribution.
    #[command(subcommand)]
    Obd(ObdCmd),
    /// Repeated multinomial observations.
    #[command(subcommand)]
    Repeated(RepeatedCmd),
    /// Verification suites.
    #[command(subcommand)]
    Verify(VerifyCmd),
}

#[derive(Subcommand)]
enum PstCmd {
    /// Attained p-value of `x` under `p`.
    Pvalue {
        #[arg(long)]
        p: String,
        #[arg(long)]
        x: String,
    },
    /// Expected p-value against the uniform alternative.
    Epv {
        #[arg(long)]
        p: String,
        #[arg(long)]
        n: u64,
    },
    /// Kullback-Leibler divergence from uniform to `p`.
    Kld {
        #[arg(long)]
        p: String,
        #[arg(long)]
        n: u64,
    },
    /// Expected p-value over a barycentric grid; the ecp point should be the strict maximum.
    Sweep33 {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 8)]
        grid_denominator: u32,
    },
}

#[derive(Subcommand)]
enum GlrtCmd {
    /// Statistic `L(x)`.
    Stat {
        #[arg(long)]
        x: String,
    },
    /// Exact p-value `P_ecp[L(X) >= L(x)]`.
    Pvalue {
        #[arg(long)]
        x: String,
        /// Optional check on the number of cells.
        #[arg(long)]
        k: Option<usize>,
        /// Optional check on the total count.
        #[arg(long)]
        n: Option<u64>,
    },
}

#[derive(Subcommand)]
enum BinomialCmd {
    /// Rank profiles at each crossing odds value and between them.
    Ladder {
        #[arg(long)]
        n: u64,
    },
    /// Strict expected p-value inequality over every ladder region.
    Conjecture51 {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 8)]
        samples: u32,
    },
    /// Exact identities and bounds used by the binomial results.
    Identities {
        #[arg(long, default_value_t = 64)]
        nmax: u64,
    },
    /// Which pair of ranks swaps first, for every odd n.
    ThresholdScan {
        #[arg(long, default_value_t = 61)]
        nmax: u64,
    },
}

#[derive(Subcommand)]
enum ObdCmd {
    /// Sorted masses, mean and tie decomposition.
    Show {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        p: String,
    },
    /// Tie decomposition of the mean.
    Decompose {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        p: String,
    },
    /// Mean and order monotonicity over a grid of p in [1/2, 1].
    #[command(alias = "sweep")]
    Sweep7x {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 64)]
        grid_denominator: u64,
    },
}

#[derive(Subcommand)]
enum RepeatedCmd {
    /// `L*`, `V` and `L~` for one observation matrix.
    Lstar {
        #[command(flatten)]
        data: MatrixArgs,
    },
    /// Two-part test thresholds, and the decision for `--data` when given.
    Hybrid {
        #[command(flatten)]
        dims: Dims,
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        beta: String,
        #[command(flatten)]
        data: OptMatrixArgs,
    },
    /// Exact level of the two-part test over a barycentric grid of p.
    Level {
        #[command(flatten)]
        dims: Dims,
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        beta: String,
        #[arg(long, default_value_t = 16)]
        grid_denominator: u32,
    },
    /// Conditional tail probabilities for k = n = r = 2.
    Counterexample222 {
        #[arg(long, default_value = "7/100")]
        c: String,
    },
    /// `P_p[L* >= c]` along seeded majorization chains.
    Sweep81 {
        #[command(flatten)]
        dims: Dims,
        #[arg(long)]
        c: String,
        #[arg(long, default_value_t = 10)]
        chains: usize,
        #[arg(long, default_value_t = 4)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(clap::Args)]
struct Dims {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    n: u64,
    #[arg(long)]
    r: usize,
}

#[derive(clap::Args)]
struct MatrixArgs {
    /// JSON file `{"rows": [[...], ...]}`.
    #[arg(long, conflicts_with = "matrix", required_unless_present = "matrix")]
    data: Option<PathBuf>,
    /// Inline rows, e.g. `0,2;2,0`.
    #[arg(long)]
    matrix: Option<String>,
}

#[derive(clap::Args)]
struct OptMatrixArgs {
    #[arg(long, conflicts_with = "matrix")]
    data: Option<PathBuf>,
    #[arg(long)]
    matrix: Option<String>,
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Every identity and proved statement at desk scale.
    All {
        #[arg(long, default_value_t = 8)]
        nmax: u64,
    },
}

type CliResult<T> = std::result::Result<T, String>;

fn err(e: Error) -> String {
    e.to_string()
}

fn rational(s: &str) -> CliResult<Rational> {
    parse_rational(s).map_err(err)
}

fn prob(s: &str) -> CliResult<ProbVector> {
    s.parse().map_err(err)
}

fn cells(s: &str) -> CliResult<CellCounts> {
    s.parse().map_err(err)
}

fn load_matrix(data: &Option<PathBuf>, inline: &Option<String>) -> CliResult<Option<ObsMatrix>> {
    if let Some(path) = data {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let m: ObsMatrix = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        return m.validated().map(Some).map_err(err);
    }
    if let Some(s) = inline {
        let rows = s.split(';').map(cells).collect::<CliResult<Vec<_>>>()?;
        return ObsMatrix::new(rows).map(Some).map_err(err);
    }
    Ok(None)
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

/// `3`, `1/3`: integers without a denominator, for human-facing strings.
fn plain(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn bool_text(b: bool) -> String {
    b.to_string()
}

fn only(envelope: ReportEnvelope) -> Output {
    Output { envelope, table: None, display: None }
}

fn run_pst(cmd: PstCmd) -> CliResult<Output> {
    Ok(match cmd {
        PstCmd::Pvalue { p, x } => {
            let (pv, xv) = (prob(&p)?, cells(&x)?);
            let r = pst_p_value(&pv, &xv).map_err(err)?;
            only(ReportEnvelope::new("pst pvalue", to_value(&r)).param("p", &pv).param("x", &xv))
        }
        PstCmd::Epv { p, n } => {
            let pv = prob(&p)?;
            let r = point_report(&pv, n).map_err(err)?;
            only(ReportEnvelope::new("pst epv", to_value(&r)).param("p", &pv).param("n", n))
        }
        PstCmd::Kld { p, n } => {
            let pv = prob(&p)?;
            let kld = kld_uniform_to(&pv, n).map_err(err)?;
            let gap = kld_gap(&pv, n);
            let f = |v: f64| if v.is_infinite() { json!("inf") } else { json!(v) };
            only(
                ReportEnvelope::new("pst kld", json!({"p": pv.to_string(), "n": n, "kld": f(kld), "kld_gap": f(gap)}))
                    .param("p", &pv)
                    .param("n", n),
            )
        }
        PstCmd::Sweep33 { k, n, grid_denominator } => {
            let grid = conjecture_grid(k, grid_denominator).map_err(err)?;
            let r = conjecture33_sweep(k, n, &grid).map_err(err)?;
            let mut t = Tabular::new(["p", "epv"]);
            for pt in &r.points {
                t.push(vec![pt.p.to_string(), format_rational(&pt.epv)]);
            }
            let v = Verdict::check("ecp is the strict maximizer", r.ecp_is_strict_max);
            Output {
                envelope: ReportEnvelope::new("pst sweep33", to_value(&r))
                    .param("k", k)
                    .param("n", n)
                    .param("grid_denominator", grid_denominator)
                    .verdict(v),
                table: Some(t),
                display: None,
            }
        }
    })
}

fn run_glrt(cmd: GlrtCmd) -> CliResult<Output> {
    Ok(match cmd {
        GlrtCmd::Stat { x } => {
            let xv = cells(&x)?;
            only(ReportEnvelope::new("glrt stat", to_value(&lrt_statistic(&xv))).param("x", &xv))
        }
        GlrtCmd::Pvalue { x, k, n } => {
            let xv = cells(&x)?;
            if k.is_some_and(|k| k != xv.k()) || n.is_some_and(|n| n != xv.n()) {
                return Err(format!("x = {xv} does not match the given --k/--n"));
            }
            let l = lrt_statistic(&xv);
            let pv = lrt_p_value(&xv).map_err(err)?;
            only(
                ReportEnvelope::new(
                    "glrt pvalue",
                    json!({"x": xv.to_string(), "L": format_rational(&l.value), "p_value": format_rational(&pv)}),
                )
                .param("x", &xv),
            )
        }
    })
}

fn run_binomial(cmd: BinomialCmd) -> CliResult<Output> {
    Ok(match cmd {
        BinomialCmd::Ladder { n } => {
            let l = breakpoint_ladder(n).map_err(err)?;
            let mut headers = vec!["t_repr".to_string(), "p_repr".to_string()];
            headers.extend((0..=n).map(|x| format!("q_{x}")));
            let mut t = Tabular::new(headers.clone());
            headers[0] = "t".into();
            headers.remove(1);
            let mut d = Tabular::new(headers);
            for row in &l.rows {
                let q = row.q.iter().map(u64::to_string);
                t.push([row.t_repr.clone(), row.p_repr.clone()].into_iter().chain(q.clone()).collect());
                d.push(std::iter::once(row.t_pretty.clone()).chain(q).collect());
            }
            Output {
                envelope: ReportEnvelope::new("binomial ladder", to_value(&l)).param("n", n),
                table: Some(t),
                display: Some(d),
            }
        }
        BinomialCmd::Conjecture51 { n, samples } => {
            let r = conjecture51_region_check(n, samples).map_err(err)?;
            let status = if r.violations > 0 {
                Status::Fail
            } else if r.undecided > 0 {
                Status::Undecided
            } else {
                Status::Pass
            };
            let mut t = Tabular::new(["kind", "t_repr", "q", "status", "min_margin"]);
            for row in &r.rows {
                let q: Vec<String> = row.q.iter().map(u64::to_string).collect();
                t.push(vec![
                    to_value(&row.kind).as_str().unwrap_or_default().to_string(),
                    row.t_repr.clone(),
                    q.join(" "),
                    to_value(&row.status).as_str().unwrap_or_default().to_string(),
                    row.min_margin.as_ref().map(format_rational).unwrap_or_default(),
                ]);
            }
            let undecided_rows = r.rows.iter().filter(|x| x.status == CheckStatus::Undecided).count();
            Output {
                envelope: ReportEnvelope::new("binomial conjecture51", to_value(&r))
                    .param("n", n)
                    .param("samples", samples)
                    .verdict(
                        Verdict::new("strict inequality in every region", status)
                            .with_detail(format!("{} violations, {undecided_rows} undecided", r.violations)),
                    ),
                table: Some(t),
                display: None,
            }
        }
        BinomialCmd::Identities { nmax } => {
            let mut rows = Vec::new();
            let mut v_abs = true;
            let mut v_kr = true;
            let mut v_q = true;
            let mut t = Tabular::new(["n", "abs_moment", "central_bound", "q_increasing", "eps_lo", "eps_hi"]);
            for n in 1..=nmax {
                let (a, b) = abs_moment_identity(n);
                v_abs &= a == b;
                let kr = if n % 2 == 0 { Some(krafft_bound_check(n).map_err(err)?) } else { None };
                v_kr &= kr.as_ref().is_none_or(|k| k.passed);
                let qm = if n % 2 == 0 && n >= 4 { Some(q_monotone_even_check(n).map_err(err)?) } else { None };
                v_q &= qm.as_ref().is_none_or(|q| q.passed);
                let eps = if (3..=40).contains(&n) { Some(epsilon_n(n).map_err(err)?) } else { None };
                let opt = |b: Option<bool>| b.map(bool_text).unwrap_or_else(|| "-".into());
                t.push(vec![
                    n.to_string(),
                    bool_text(a == b),
                    opt(kr.as_ref().map(|k| k.passed)),
                    opt(qm.as_ref().map(|q| q.passed)),
                    eps.as_ref().map(|e| format_rational(&e.eps_lo)).unwrap_or_else(|| "-".into()),
                    eps.as_ref().map(|e| format_rational(&e.eps_hi)).unwrap_or_else(|| "-".into()),
                ]);
                rows.push(json!({
                    "n": n,
                    "abs_moment": {"lhs": a.to_string(), "rhs": b.to_string()},
                    "central_bound": kr.map(|k| to_value(&k)),
                    "q_increasing": qm.map(|q| q.passed),
                    "epsilon": eps.map(|e| to_value(&e)),
                }));
            }
            Output {
                envelope: ReportEnvelope::new("binomial identities", json!({ "rows": rows }))
                    .param("nmax", nmax)
                    .verdict(Verdict::check("absolute-moment identity", v_abs))
                    .verdict(Verdict::check("central binomial bound (even n)", v_kr))
                    .verdict(Verdict::check("Q(x) strictly increasing (even n)", v_q)),
                table: Some(t),
                display: None,
            }
        }
        BinomialCmd::ThresholdScan { nmax } => {
            let r = first_pair_threshold_scan(nmax);
            let mut t = Tabular::new(["n", "ordering", "holds", "claimed", "agrees"]);
            for row in &r.rows {
                t.push(vec![
                    row.n.to_string(),
                    row.ordering.clone(),
                    bool_text(row.holds),
                    bool_text(row.claimed),
                    bool_text(row.agrees),
                ]);
            }
            let detail = if r.agrees_everywhere {
                "agrees with the published n<=45 / n>=47 split".to_string()
            } else {
                format!("disagrees with the published n<=45 / n>=47 split at n = {:?}", r.disagreeing_n)
            };
            Output {
                envelope: ReportEnvelope::new("binomial threshold-scan", to_value(&r))
                    .param("nmax", nmax)
                    .verdict(Verdict::check("exact verdict for every odd n", true).with_detail(detail)),
                table: Some(t),
                display: None,
            }
        }
    })
}

fn run_obd(cmd: ObdCmd) -> CliResult<Output> {
    Ok(match cmd {
        ObdCmd::Show { n, p } => {
            let pr = rational(&p)?;
            let o = obd(n, &pr).map_err(err)?;
            let d = lemma73_decompose(n, &pr).map_err(err)?;
            let mode: Vec<u64> = binomial_mode(n, &pr).map_err(err)?;
            let cdf: Vec<String> = o.cdf().iter().map(format_rational).collect();
            let mut t = Tabular::new(["x", "mass", "cdf"]);
            for (x, (m, c)) in o.sorted_masses.iter().zip(&cdf).enumerate() {
                t.push(vec![x.to_string(), format_rational(m), c.clone()]);
            }
            let results = json!({
                "n": n,
                "p": format_rational(&pr),
                "sorted_masses": to_value(&o)["sorted_masses"],
                "cdf": cdf,
                "mean": format_rational(&o.mean()),
                "mode": mode,
                "decomposition": to_value(&d),
            });
            Output {
                envelope: ReportEnvelope::new("obd show", results).param("n", n).param("p", format_rational(&pr)),
                table: Some(t),
                display: None,
            }
        }
        ObdCmd::Decompose { n, p } => {
            let pr = rational(&p)?;
            let d = lemma73_decompose(n, &pr).map_err(err)?;
            let v = Verdict::check(format!("tie decomposition: {}", d.claim), d.claim_holds)
                .with_detail(format!("delta = {}", format_rational(&d.delta)));
            only(
                ReportEnvelope::new("obd decompose", to_value(&d))
                    .param("n", n)
                    .param("p", format_rational(&pr))
                    .verdict(v),
            )
        }
        ObdCmd::Sweep7x { n, grid_denominator } => {
            let grid = conjecture7x_grid(n, grid_denominator);
            let r = conjectures7x_sweep(n, &grid).map_err(err)?;
            let mut t = Tabular::new(["p", "mean", "delta", "margin_direct", "margin_half", "margin_lambda"]);
            for pt in &r.points {
                t.push(vec![
                    format_rational(&pt.p),
                    format_rational(&pt.mean),
                    format_rational(&pt.delta),
                    format_rational(&pt.margin_direct),
                    format_rational(&pt.margin_half),
                    format_rational(&pt.margin_lambda),
                ]);
            }
            let first = |v: &[puretest::obd::PairViolation]| {
                v.first().map(|x| format!("first at ({}, {})", format_rational(&x.p_lo), format_rational(&x.p_hi)))
            };
            let mut sv = Verdict::check("ordered binomial stochastically increasing", r.stochastic_increasing);
            if let Some(d) = first(&r.stochastic_violations) {
                sv = sv.with_detail(format!("{} violating pairs, {d}", r.stochastic_violations.len()));
            }
            Output {
                envelope: ReportEnvelope::new("obd sweep7x", to_value(&r))
                    .param("n", n)
                    .param("grid_denominator", grid_denominator)
                    .verdict(Verdict::check("mean above the p=1/2 mean", r.mean_above_half))
                    .verdict(Verdict::check("mean strictly increasing", r.mean_increasing))
                    .verdict(sv)
                    .verdict(Verdict::check("rank-sum inequality", r.rank_sum_holds)),
                table: Some(t),
                display: None,
            }
        }
    })
}

fn run_repeated(cmd: RepeatedCmd) -> CliResult<Output> {
    Ok(match cmd {
        RepeatedCmd::Lstar { data } => {
            let m = load_matrix(&data.data, &data.matrix)?.ok_or("missing matrix")?;
            let xp = m.column_sums();
            let pv = pstar_pvalue_conjectural(&m).map_err(err)?;
            let results = json!({
                "matrix": to_value(&m),
                "xplus": to_value(&xp),
                "lstar": format_rational(&lstar(&m)),
                "v": format_rational(&v_statistic(&m)),
                "ltilde": format_rational(&ltilde(&xp)),
                "p_value": to_value(&pv),
            });
            only(ReportEnvelope::new("repeated lstar", results).param("matrix", &m))
        }
        RepeatedCmd::Hybrid { dims, alpha, beta, data } => {
            let (a, b) = (rational(&alpha)?, rational(&beta)?);
            let th = hybrid_thresholds(dims.k, dims.n, dims.r, &a, &b).map_err(err)?;
            let decision = match load_matrix(&data.data, &data.matrix)? {
                Some(m) => Some(hybrid_test(&m, &th).map_err(err)?),
                None => None,
            };
            let mut t = Tabular::new(["xplus", "c_alpha", "tail"]);
            for f in th.c_alpha.values() {
                t.push(vec![
                    f.xplus.to_string(),
                    f.c_alpha.as_ref().map(format_rational).unwrap_or_else(|| "inf".into()),
                    format_rational(&f.tail),
                ]);
            }
            let results = json!({"thresholds": to_value(&th), "decision": decision.map(|d| to_value(&d))});
            Output {
                envelope: ReportEnvelope::new("repeated hybrid", results)
                    .param("k", dims.k)
                    .param("n", dims.n)
                    .param("r", dims.r)
                    .param("alpha", format_rational(&a))
                    .param("beta", format_rational(&b)),
                table: Some(t),
                display: None,
            }
        }
        RepeatedCmd::Level { dims, alpha, beta, grid_denominator } => {
            let (a, b) = (rational(&alpha)?, rational(&beta)?);
            let th = hybrid_thresholds(dims.k, dims.n, dims.r, &a, &b).map_err(err)?;
            let grid = conjecture_grid(dims.k, grid_denominator).map_err(err)?;
            let r = bonferroni_level_check(&th, &grid).map_err(err)?;
            let mut t = Tabular::new(["p", "level"]);
            for pt in &r.points {
                t.push(vec![pt.p.to_string(), format_rational(&pt.level)]);
            }
            let v = Verdict::check("max level <= realized alpha + beta <= alpha + beta", r.passed).with_detail(format!(
                "{} <= {} <= {}",
                format_rational(&r.max_level),
                format_rational(&r.realized_bound),
                format_rational(&r.nominal_bound)
            ));
            Output {
                envelope: ReportEnvelope::new(
                    "repeated level",
                    json!({"alpha_realized": format_rational(&th.alpha_realized), "beta_realized": format_rational(&th.beta_realized), "level": to_value(&r)}),
                )
                .param("k", dims.k)
                .param("n", dims.n)
                .param("r", dims.r)
                .param("alpha", format_rational(&a))
                .param("beta", format_rational(&b))
                .param("grid_denominator", grid_denominator)
                .verdict(v),
                table: Some(t),
                display: None,
            }
        }
        RepeatedCmd::Counterexample222 { c } => {
            let cr = rational(&c)?;
            let r = counterexample_222(&cr).map_err(err)?;
            let vector: Vec<String> = r.phi.iter().map(plain).collect();
            let mut t = Tabular::new(["xplus", "phi"]);
            for (x, v) in r.xplus.iter().zip(&r.phi) {
                t.push(vec![x.to_string(), format_rational(v)]);
            }
            let mut results = to_value(&r);
            results["phi_vector"] = json!(format!("({})", vector.join(", ")));
            let flagged = !r.schur_concavity_violations.is_empty();
            Output {
                envelope: ReportEnvelope::new("repeated counterexample222", results)
                    .param("c", format_rational(&cr))
                    .verdict(
                        Verdict::new("phi_c not Schur-concave", Status::Pass).with_detail(if flagged {
                            format!("{} violating pairs", r.schur_concavity_violations.len())
                        } else {
                            "no violating pair at this c".into()
                        }),
                    ),
                table: Some(t),
                display: None,
            }
        }
        RepeatedCmd::Sweep81 { dims, c, chains, steps, seed } => {
            let cr = rational(&c)?;
            let ch = seeded_t_chains(dims.k, chains, steps, seed);
            let r = conjecture81_sweep(dims.k, dims.n, dims.r, &cr, &ch).map_err(err)?;
            only(
                ReportEnvelope::new("repeated sweep81", to_value(&r))
                    .param("k", dims.k)
                    .param("n", dims.n)
                    .param("r", dims.r)
                    .param("c", format_rational(&cr))
                    .param("chains", chains)
                    .param("steps", steps)
                    .param("seed", seed)
                    .verdict(Verdict::check("nonincreasing along every chain", r.passed)),
            )
        }
    })
}

fn run(cli: Cli) -> CliResult<Output> {
    if cli.max_outcomes == 0 || cli.max_repeated == 0 {
        return Err("resource caps must be positive".into());
    }
    set_max_outcomes(cli.max_outcomes);
    set_max_repeated(cli.max_repeated);
    match cli.command {
        Command::Pst(c) => run_pst(c),
        Command::Glrt(c) => run_glrt(c),
        Command::Binomial(c) => run_binomial(c),
        Command::Obd(c) => run_obd(c),
        Command::Repeated(c) => run_repeated(c),
        Command::Verify(VerifyCmd::All { nmax }) => {
            let env = verify_all(nmax).map_err(err)?;
            let mut t = Tabular::new(["check", "status"]);
            for v in &env.verdicts {
                t.push(vec![v.name.clone(), to_value(&v.status).as_str().unwrap_or_default().to_string()]);
            }
            Ok(Output { envelope: env, table: Some(t), display: None })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let format = cli.format;
    let out = match run(cli) {
        Ok(o) => o,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    };
    match render(&out, format) {
        Ok(text) => print!("{text}"),
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    }
    if out.envelope.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}
