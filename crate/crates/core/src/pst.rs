//! Pure significance tests of a simple multinomial null against the uniform
//! alternative: attained p-values, KLD to the uniform pmf, and expected
//! p-values under the uniform alternative.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::{int, ln_rational, serde_extended_real, serde_rational, to_f64};
use crate::simplex::{enumerate_simplex, pmf_multinomial, simplex_size, CellCounts, ProbVector};
use crate::Rational;

/// Attained p-value `P_p[f_p(X) <= f_p(x0)]`, split into the mass of
/// strictly less likely outcomes and the mass tied with `x0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PstResult {
    pub observed: CellCounts,
    #[serde(with = "serde_rational")]
    pub p_value: Rational,
    #[serde(with = "serde_rational")]
    pub rejection_rank_mass: Rational,
    #[serde(with = "serde_rational")]
    pub tie_mass: Rational,
}

fn check_dims(p: &ProbVector, x: &CellCounts) -> Result<()> {
    if p.k() != x.k() {
        return Err(Error::DimensionMismatch(format!(
            "p has {} cells but x has {}",
            p.k(),
            x.k()
        )));
    }
    Ok(())
}

fn masses(p: &ProbVector, n: u64) -> Result<Vec<Rational>> {
    Ok(enumerate_simplex(p.k(), n)?
        .iter()
        .map(|x| pmf_multinomial(p.probs(), x))
        .collect())
}

pub fn pst_p_value(p: &ProbVector, x0: &CellCounts) -> Result<PstResult> {
    check_dims(p, x0)?;
    let f0 = pmf_multinomial(p.probs(), x0);
    let mut below = Rational::zero();
    let mut tied = Rational::zero();
    for f in masses(p, x0.n())? {
        if f < f0 {
            below += f;
        } else if f == f0 {
            tied += f;
        }
    }
    Ok(PstResult {
        observed: x0.clone(),
        p_value: &below + &tied,
        rejection_rank_mass: below,
        tie_mass: tied,
    })
}

/// `q(x) = |{y : m(y) >= m(x)}|` for every index, in `O(N log N)`.
pub fn tail_counts(masses: &[Rational]) -> Vec<u64> {
    let n = masses.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| masses[a].cmp(&masses[b]));
    let mut counts = vec![0u64; n];
    let mut start = 0;
    while start < n {
        let mut end = start;
        while end < n && masses[order[end]] == masses[order[start]] {
            end += 1;
        }
        for &idx in &order[start..end] {
            counts[idx] = (n - start) as u64;
        }
        start = end;
    }
    counts
}

/// `sum_x q_p(x) f_p(x)`, the unnormalized expected p-value.
pub(crate) fn epv_sum_of(masses: &[Rational]) -> Rational {
    tail_counts(masses)
        .iter()
        .zip(masses)
        .map(|(&q, f)| int(q) * f)
        .sum()
}

/// Expected p-value `E_unif[π_p(Y)]` for `Y` uniform on `S_{k,n}`.
pub fn epv_uniform(p: &ProbVector, n: u64) -> Result<Rational> {
    let m = masses(p, n)?;
    let size = Rational::from_integer(BigInt::from(m.len()));
    Ok(epv_sum_of(&m) / size)
}

/// `E_unif[log(f_unif(X) / f_p(X))]`; `+inf` when some outcome has zero mass.
pub fn kld_uniform_to(p: &ProbVector, n: u64) -> Result<f64> {
    let outcomes = enumerate_simplex(p.k(), n)?;
    let size = outcomes.len() as f64;
    let ln_size = ln_rational(&Rational::from_integer(simplex_size(p.k(), n)));
    let mut acc = 0.0;
    for x in &outcomes {
        let f = pmf_multinomial(p.probs(), x);
        if f.is_zero() {
            return Ok(f64::INFINITY);
        }
        acc += -ln_size - ln_rational(&f);
    }
    Ok(acc / size)
}

/// `KLD(p) - KLD(p_ecp) = -n [log k + (1/k) sum_j log p_j]`.
pub fn kld_gap(p: &ProbVector, n: u64) -> f64 {
    if p.is_ecp() {
        return 0.0;
    }
    if p.probs().iter().any(Zero::is_zero) {
        return f64::INFINITY;
    }
    let k = p.k() as f64;
    let mean_log: f64 = p.probs().iter().map(ln_rational).sum::<f64>() / k;
    -(n as f64) * (k.ln() + mean_log)
}

/// Both sides of the expected p-value comparison at a vertex `p0` of `P_k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prop34Report {
    pub k: usize,
    pub n: u64,
    /// `sum_x |{y : C(n,x) <= C(n,y)}| f_ecp(x)`.
    #[serde(with = "serde_rational")]
    pub lhs: Rational,
    /// The same sum for `p` every permutation of `(1, 0, ..., 0)`; all equal.
    #[serde(with = "serde_rational")]
    pub rhs: Rational,
    pub rhs_equal_across_permutations: bool,
    pub passed: bool,
}

pub fn check_prop34(k: usize, n: u64) -> Result<Prop34Report> {
    if k < 2 || n < 1 {
        return Err(Error::NotApplicable(format!("need k >= 2 and n >= 1, got k = {k}, n = {n}")));
    }
    let lhs = epv_sum_of(&masses(&ProbVector::ecp(k), n)?);
    let vertex_sums = (0..k)
        .map(|cell| masses(&ProbVector::vertex(k, cell), n).map(|m| epv_sum_of(&m)))
        .collect::<Result<Vec<_>>>()?;
    let rhs = vertex_sums[0].clone();
    let same = vertex_sums.iter().all(|s| *s == rhs);
    Ok(Prop34Report {
        k,
        n,
        passed: same && rhs.is_one() && lhs > Rational::one(),
        lhs,
        rhs,
        rhs_equal_across_permutations: same,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpvPoint {
    pub p: ProbVector,
    #[serde(with = "serde_rational")]
    pub epv: Rational,
}

/// Outcome of evaluating the expected p-value over a grid of `p`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sweep33Report {
    pub k: usize,
    pub n: u64,
    /// Grid points in lexicographic order of `p`.
    pub points: Vec<EpvPoint>,
    pub argmax: ProbVector,
    #[serde(with = "serde_rational")]
    pub ecp_epv: Rational,
    pub ecp_is_strict_max: bool,
    /// `EPV(ecp) - max_{p != ecp} EPV(p)`; absent when the grid is just ecp.
    #[serde(serialize_with = "crate::report::serialize_opt_rational")]
    pub margin: Option<Rational>,
    pub violations: Vec<EpvPoint>,
}

/// Evaluates the expected p-value at every grid point (plus `p_ecp`) and
/// checks whether the ecp point is the strict maximizer.
pub fn conjecture33_sweep(k: usize, n: u64, grid: &[ProbVector]) -> Result<Sweep33Report> {
    let ecp = ProbVector::ecp(k);
    let mut ps: Vec<ProbVector> = grid.to_vec();
    if let Some(bad) = ps.iter().find(|p| p.k() != k) {
        return Err(Error::DimensionMismatch(format!("grid point {bad} does not have {k} cells")));
    }
    ps.push(ecp.clone());
    ps.sort();
    ps.dedup();
    let points = ps
        .into_iter()
        .map(|p| epv_uniform(&p, n).map(|epv| EpvPoint { p, epv }))
        .collect::<Result<Vec<_>>>()?;
    let ecp_epv = points.iter().find(|pt| pt.p == ecp).unwrap().epv.clone();
    let argmax = points
        .iter()
        .fold(&points[0], |best, pt| if pt.epv > best.epv { pt } else { best })
        .p
        .clone();
    let runner_up = points.iter().filter(|pt| pt.p != ecp).map(|pt| pt.epv.clone()).max();
    let violations: Vec<EpvPoint> =
        points.iter().filter(|pt| pt.p != ecp && pt.epv >= ecp_epv).cloned().collect();
    Ok(Sweep33Report {
        k,
        n,
        argmax,
        ecp_is_strict_max: violations.is_empty(),
        margin: runner_up.map(|r| &ecp_epv - r),
        ecp_epv,
        points,
        violations,
    })
}

/// Barycentric lattice `{a/m : sum a = m}` together with `p_ecp`.
/// The vertices of `P_k` are lattice points for every `m`.
pub fn conjecture_grid(k: usize, m: u32) -> Result<Vec<ProbVector>> {
    let mut grid: Vec<ProbVector> = enumerate_simplex(k, m as u64)?
        .into_iter()
        .map(|c| {
            ProbVector::new(c.counts().iter().map(|&a| Rational::new(a.into(), m.into())).collect())
                .expect("lattice point")
        })
        .collect();
    grid.push(ProbVector::ecp(k));
    grid.sort();
    grid.dedup();
    Ok(grid)
}

/// `E_p[π_p(Y)]` for `Y ~ f_p`. Diagnostic only: for moderate `n` it sits
/// near 1/2 regardless of `p`, so it carries no comparison between nulls.
pub fn null_epv_diagnostic(p: &ProbVector, n: u64) -> Result<Rational> {
    let m = masses(p, n)?;
    let mut order: Vec<usize> = (0..m.len()).collect();
    order.sort_by(|&a, &b| m[a].cmp(&m[b]));
    // running cumulative mass gives π for each tie group
    let mut total = Rational::zero();
    let mut cumulative = Rational::zero();
    let mut start = 0;
    while start < order.len() {
        let mut end = start;
        let mut group = Rational::zero();
        while end < order.len() && m[order[end]] == m[order[start]] {
            group += &m[order[end]];
            end += 1;
        }
        cumulative += &group;
        total += &group * &cumulative;
        start = end;
    }
    Ok(total)
}

/// One row of the JSON report for `pst epv`.
#[derive(Debug, Clone, Serialize)]
pub struct PstPointReport {
    pub p: ProbVector,
    pub n: u64,
    #[serde(with = "serde_rational")]
    pub epv: Rational,
    #[serde(serialize_with = "serde_extended_real::serialize")]
    pub kld: f64,
    #[serde(serialize_with = "serde_extended_real::serialize")]
    pub kld_gap: f64,
}

pub fn point_report(p: &ProbVector, n: u64) -> Result<PstPointReport> {
    Ok(PstPointReport {
        p: p.clone(),
        n,
        epv: epv_uniform(p, n)?,
        kld: kld_uniform_to(p, n)?,
        kld_gap: kld_gap(p, n),
    })
}

/// `epv` as a float, for logging.
pub fn epv_f64(p: &ProbVector, n: u64) -> Result<f64> {
    epv_uniform(p, n).map(|r| to_f64(&r))
}
