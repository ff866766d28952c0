//! Finite probability spaces with σ-algebras given as partitions of the atoms.
//!
//! On a finite space the l-conditional expectation is explicit: on a block `B`
//! of the partition it is `exp(Σ_{ω∈B} p_ω ln y(ω) / P(B))`. Everything else
//! here (tower and multiplicative identities, l-martingale classification, the
//! multiplicative Doob decomposition) is built on that single formula.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cone::PositiveVector;
use crate::error::{check_dim, Error, Result};
use crate::linalg::compensated_sum;

/// Tolerance on `Σ p = 1`.
pub const PROB_TOL: f64 = 1e-12;
/// Relative tolerance for "constant on a block".
pub const MEASURABILITY_RTOL: f64 = 1e-12;
/// Default relative tolerance of [`classify_l_martingale`].
pub const DEFAULT_CLASSIFY_TOL: f64 = 1e-10;

/// Atoms `0..m` with strictly positive probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteSpace {
    probs: Vec<f64>,
}

impl FiniteSpace {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Empty("probability space"));
        }
        if let Some(p) = probs.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
            return Err(Error::InvalidWeights(format!("atom probability {p} is not positive")));
        }
        let total = compensated_sum(probs.iter().copied());
        if (total - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidWeights(format!("probabilities sum to {total}, not 1")));
        }
        Ok(Self { probs })
    }

    pub fn uniform(m: usize) -> Result<Self> {
        Self::new(vec![1.0 / m as f64; m])
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

/// A partition of the atoms `0..m` into disjoint nonempty blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
    block_of: Vec<usize>,
}

impl Partition {
    pub fn new(blocks: Vec<Vec<usize>>, num_atoms: usize) -> Result<Self> {
        let mut block_of = vec![usize::MAX; num_atoms];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::InvalidArgument(format!("block {b} is empty")));
            }
            for &atom in block {
                if atom >= num_atoms {
                    return Err(Error::InvalidArgument(format!(
                        "atom {atom} out of range for {num_atoms} atoms"
                    )));
                }
                if block_of[atom] != usize::MAX {
                    return Err(Error::InvalidArgument(format!("atom {atom} appears in two blocks")));
                }
                block_of[atom] = b;
            }
        }
        if let Some(atom) = block_of.iter().position(|&b| b == usize::MAX) {
            return Err(Error::InvalidArgument(format!("atom {atom} is not covered")));
        }
        Ok(Self { blocks, block_of })
    }

    /// Builds a partition from a block label per atom. Blocks are numbered
    /// in order of first appearance.
    pub fn from_labels(labels: &[usize]) -> Result<Self> {
        let mut seen: Vec<(usize, usize)> = Vec::new();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for (atom, &label) in labels.iter().enumerate() {
            match seen.iter().find(|(l, _)| *l == label) {
                Some(&(_, b)) => blocks[b].push(atom),
                None => {
                    seen.push((label, blocks.len()));
                    blocks.push(vec![atom]);
                }
            }
        }
        Self::new(blocks, labels.len())
    }

    /// `{∅, Ω}`.
    pub fn trivial(num_atoms: usize) -> Self {
        Self::new(vec![(0..num_atoms).collect()], num_atoms).expect("single block covers every atom")
    }

    /// The power set: every atom is its own block.
    pub fn discrete(num_atoms: usize) -> Self {
        Self::new((0..num_atoms).map(|a| vec![a]).collect(), num_atoms).expect("singletons cover every atom")
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_of(&self, atom: usize) -> usize {
        self.block_of[atom]
    }

    pub fn num_atoms(&self) -> usize {
        self.block_of.len()
    }

    /// True when every block of `self` lies inside a block of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        self.num_atoms() == coarser.num_atoms()
            && self.blocks.iter().all(|block| {
                let target = coarser.block_of(block[0]);
                block.iter().all(|&a| coarser.block_of(a) == target)
            })
    }
}

/// A positive-vector valued random variable: one point of the cone per atom.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomVariable {
    values: Vec<PositiveVector>,
}

impl RandomVariable {
    pub fn new(values: Vec<PositiveVector>) -> Result<Self> {
        let first = values.first().ok_or(Error::Empty("random variable"))?;
        let n = first.dim();
        for v in &values {
            check_dim(n, v.dim())?;
        }
        Ok(Self { values })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(rows.iter().map(|r| PositiveVector::from_slice(r)).collect::<Result<_>>()?)
    }

    fn from_log_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(rows.iter().map(|r| PositiveVector::from_logs(r)).collect::<Result<_>>()?)
    }

    pub fn constant(num_atoms: usize, value: PositiveVector) -> Self {
        Self {
            values: vec![value; num_atoms.max(1)],
        }
    }

    pub fn num_atoms(&self) -> usize {
        self.values.len()
    }

    pub fn dim(&self) -> usize {
        self.values[0].dim()
    }

    pub fn value(&self, atom: usize) -> &PositiveVector {
        &self.values[atom]
    }

    pub fn values(&self) -> &[PositiveVector] {
        &self.values
    }

    fn log_rows(&self) -> Vec<Vec<f64>> {
        self.values.iter().map(PositiveVector::logs).collect()
    }

    fn rows(&self) -> Vec<Vec<f64>> {
        self.values.iter().map(|v| v.values().to_vec()).collect()
    }

    /// Whether the variable is constant on every block of `g`.
    pub fn is_measurable(&self, g: &Partition) -> bool {
        self.first_unmeasurable_block(g).is_none()
    }

    fn first_unmeasurable_block(&self, g: &Partition) -> Option<usize> {
        g.blocks().iter().position(|block| {
            let reference = &self.values[block[0]];
            block
                .iter()
                .any(|&a| !self.values[a].approx_eq(reference, MEASURABILITY_RTOL))
        })
    }
}

/// Nested partitions `P₀, P₁, …, P_T`, each refining the previous one.
#[derive(Debug, Clone, PartialEq)]
pub struct Filtration {
    partitions: Vec<Partition>,
}

impl Filtration {
    pub fn new(partitions: Vec<Partition>) -> Result<Self> {
        if partitions.is_empty() {
            return Err(Error::Empty("filtration"));
        }
        for pair in partitions.windows(2) {
            if !pair[1].refines(&pair[0]) {
                return Err(Error::NotRefinement);
            }
        }
        Ok(Self { partitions })
    }

    /// Binary tree of the given depth on `2^depth` atoms: at time `t` the
    /// atoms sharing their leading `t` bits form a block.
    pub fn binary_tree(depth: usize) -> Self {
        let m = 1usize << depth;
        let partitions = (0..=depth)
            .map(|t| {
                let labels: Vec<usize> = (0..m).map(|a| a >> (depth - t)).collect();
                Partition::from_labels(&labels).expect("labels cover every atom")
            })
            .collect();
        Self { partitions }
    }

    pub fn partitions(&self) -> &[Partition] {
        &self.partitions
    }

    pub fn at(&self, t: usize) -> &Partition {
        &self.partitions[t]
    }

    /// Last time index `T`.
    pub fn horizon(&self) -> usize {
        self.partitions.len() - 1
    }

    pub fn num_atoms(&self) -> usize {
        self.partitions[0].num_atoms()
    }
}

/// Positive process `X₀, …, X_T` with `X_t` measurable w.r.t. `P_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptedProcess {
    variables: Vec<RandomVariable>,
    filtration: Filtration,
}

impl AdaptedProcess {
    pub fn new(variables: Vec<RandomVariable>, filtration: Filtration) -> Result<Self> {
        check_dim(filtration.partitions.len(), variables.len())?;
        let m = filtration.num_atoms();
        let n = variables[0].dim();
        for (t, x) in variables.iter().enumerate() {
            check_dim(m, x.num_atoms())?;
            check_dim(n, x.dim())?;
            if let Some(block) = x.first_unmeasurable_block(filtration.at(t)) {
                return Err(Error::NotAdapted { time: t, block });
            }
        }
        Ok(Self { variables, filtration })
    }

    pub fn variables(&self) -> &[RandomVariable] {
        &self.variables
    }

    pub fn at(&self, t: usize) -> &RandomVariable {
        &self.variables[t]
    }

    pub fn filtration(&self) -> &Filtration {
        &self.filtration
    }

    pub fn dim(&self) -> usize {
        self.variables[0].dim()
    }
}

/// Block-wise weighted means of real rows, replicated over the atoms of each block.
fn conditional_mean(rows: &[Vec<f64>], g: &Partition, space: &FiniteSpace) -> Vec<Vec<f64>> {
    let n = rows[0].len();
    let p = space.probs();
    let block_means: Vec<Vec<f64>> = g
        .blocks()
        .iter()
        .map(|block| {
            let mass: f64 = block.iter().map(|&a| p[a]).sum();
            (0..n)
                .map(|j| block.iter().map(|&a| p[a] * rows[a][j]).sum::<f64>() / mass)
                .collect()
        })
        .collect();
    (0..rows.len()).map(|a| block_means[g.block_of(a)].clone()).collect()
}

fn check_space(x: &RandomVariable, g: &Partition, space: &FiniteSpace) -> Result<()> {
    check_dim(space.len(), x.num_atoms())?;
    check_dim(space.len(), g.num_atoms())
}

/// `E_ℓ[Y | G] = exp(E[ln Y | G])`.
pub fn l_cond_expectation(y: &RandomVariable, g: &Partition, space: &FiniteSpace) -> Result<RandomVariable> {
    check_space(y, g, space)?;
    RandomVariable::from_log_rows(&conditional_mean(&y.log_rows(), g, space))
}

/// Ordinary conditional expectation `E[Y | G]`.
pub fn cond_expectation(y: &RandomVariable, g: &Partition, space: &FiniteSpace) -> Result<RandomVariable> {
    check_space(y, g, space)?;
    RandomVariable::from_rows(&conditional_mean(&y.rows(), g, space))
}

/// `E_ℓ[Y] = exp(E[ln Y])`.
pub fn l_expectation(y: &RandomVariable, space: &FiniteSpace) -> Result<PositiveVector> {
    let trivial = Partition::trivial(space.len());
    Ok(l_cond_expectation(y, &trivial, space)?.values[0].clone())
}

/// `d_ℓ(X₁, X₂)² = E[Σᵢ (ln X₁(i) − ln X₂(i))²]`.
pub fn l_distance_sq(x1: &RandomVariable, x2: &RandomVariable, space: &FiniteSpace) -> Result<f64> {
    check_dim(space.len(), x1.num_atoms())?;
    check_dim(space.len(), x2.num_atoms())?;
    check_dim(x1.dim(), x2.dim())?;
    Ok(space
        .probs()
        .iter()
        .zip(x1.values.iter().zip(&x2.values))
        .map(|(p, (a, b))| {
            p * a
                .values()
                .iter()
                .zip(b.values())
                .map(|(u, v)| (u / v).ln().powi(2))
                .sum::<f64>()
        })
        .sum())
}

fn max_rel_deviation(a: &RandomVariable, b: &RandomVariable) -> f64 {
    a.values
        .iter()
        .zip(&b.values)
        .flat_map(|(u, v)| u.values().iter().zip(v.values()).map(|(x, y)| (x - y).abs() / y.abs()))
        .fold(0.0, f64::max)
}

/// Draws `trials` random `G`-measurable positive variables and returns the
/// smallest `d_ℓ(Y, candidate)² − d_ℓ(Y, E_ℓ[Y|G])²`. Candidates alternate
/// between perturbations of the minimizer and unrelated random variables.
pub fn verify_minimality(
    y: &RandomVariable,
    g: &Partition,
    space: &FiniteSpace,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let best = l_cond_expectation(y, g, space)?;
    let best_logs = best.log_rows();
    let optimum = l_distance_sq(y, &best, space)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = y.dim();
    let mut slack = f64::INFINITY;
    for trial in 0..trials {
        let scale = [1e-3, 0.1, 1.0][trial % 3];
        let block_logs: Vec<Vec<f64>> = g
            .blocks()
            .iter()
            .map(|block| {
                let anchor = &best_logs[block[0]];
                (0..n)
                    .map(|j| {
                        if trial % 2 == 0 {
                            anchor[j] + scale * rng.gen_range(-1.0..1.0)
                        } else {
                            rng.gen_range(-5.0..5.0)
                        }
                    })
                    .collect()
            })
            .collect();
        let rows: Vec<Vec<f64>> = (0..space.len()).map(|a| block_logs[g.block_of(a)].clone()).collect();
        let candidate = RandomVariable::from_log_rows(&rows)?;
        slack = slack.min(l_distance_sq(y, &candidate, space)? - optimum);
    }
    Ok(slack)
}

/// Max relative deviation between `E_ℓ[E_ℓ[Y|G]|H]` and `E_ℓ[Y|H]`; `g` must refine `h`.
pub fn tower_check(y: &RandomVariable, g: &Partition, h: &Partition, space: &FiniteSpace) -> Result<f64> {
    if !g.refines(h) {
        return Err(Error::NotRefinement);
    }
    let nested = l_cond_expectation(&l_cond_expectation(y, g, space)?, h, space)?;
    let direct = l_cond_expectation(y, h, space)?;
    Ok(max_rel_deviation(&nested, &direct))
}

/// Max relative deviation between `E_ℓ[∏ Yᵢ^{wᵢ} | G]` and `∏ E_ℓ[Yᵢ|G]^{wᵢ}`.
pub fn multiplicative_check(
    ys: &[RandomVariable],
    ws: &[f64],
    g: &Partition,
    space: &FiniteSpace,
) -> Result<f64> {
    let first = ys.first().ok_or(Error::Empty("random variable list"))?;
    check_dim(ys.len(), ws.len())?;
    let (m, n) = (first.num_atoms(), first.dim());
    let mut product_logs = vec![vec![0.0; n]; m];
    let mut rhs_logs = vec![vec![0.0; n]; m];
    for (y, &w) in ys.iter().zip(ws) {
        check_dim(m, y.num_atoms())?;
        check_dim(n, y.dim())?;
        let cond = l_cond_expectation(y, g, space)?;
        for a in 0..m {
            for j in 0..n {
                product_logs[a][j] += w * y.values[a][j].ln();
                rhs_logs[a][j] += w * cond.values[a][j].ln();
            }
        }
    }
    let lhs = l_cond_expectation(&RandomVariable::from_log_rows(&product_logs)?, g, space)?;
    let rhs = RandomVariable::from_log_rows(&rhs_logs)?;
    Ok(max_rel_deviation(&lhs, &rhs))
}

/// Max relative deviation between `E_ℓ[Y|G]` and the constant `E_ℓ[Y]`.
/// Zero (to rounding) whenever `Y` is independent of `G`.
pub fn independence_check(y: &RandomVariable, g: &Partition, space: &FiniteSpace) -> Result<f64> {
    let cond = l_cond_expectation(y, g, space)?;
    let constant = RandomVariable::constant(space.len(), l_expectation(y, space)?);
    Ok(max_rel_deviation(&cond, &constant))
}

/// The product of two finite spaces, `Ω = A × B` with atom `(i, j)` stored at
/// index `i·|B| + j`, together with the σ-algebras generated by each factor.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductSpace {
    pub space: FiniteSpace,
    /// σ(A): atoms sharing the first coordinate.
    pub first: Partition,
    /// σ(B): atoms sharing the second coordinate.
    pub second: Partition,
    len_second: usize,
}

impl ProductSpace {
    pub fn new(a: &FiniteSpace, b: &FiniteSpace) -> Result<Self> {
        let probs: Vec<f64> = a
            .probs()
            .iter()
            .flat_map(|pa| b.probs().iter().map(move |pb| pa * pb))
            .collect();
        let nb = b.len();
        let m = probs.len();
        let first: Vec<usize> = (0..m).map(|w| w / nb).collect();
        let second: Vec<usize> = (0..m).map(|w| w % nb).collect();
        Ok(Self {
            space: FiniteSpace::new(probs)?,
            first: Partition::from_labels(&first)?,
            second: Partition::from_labels(&second)?,
            len_second: nb,
        })
    }

    /// Lifts a variable on `B` (one row per atom of `B`) to `A × B`.
    pub fn lift_second(&self, rows: &[Vec<f64>]) -> Result<RandomVariable> {
        check_dim(self.len_second, rows.len())?;
        let lifted: Vec<Vec<f64>> = (0..self.space.len()).map(|w| rows[w % self.len_second].clone()).collect();
        RandomVariable::from_rows(&lifted)
    }
}

/// Outcome of comparing `E[X_{t+1} | F_t]` with `X_t` over all times and atoms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Martingale,
    Submartingale,
    Supermartingale,
    None,
}

impl Classification {
    fn from_flags(up: bool, down: bool) -> Self {
        match (up, down) {
            (false, false) => Self::Martingale,
            (true, false) => Self::Submartingale,
            (false, true) => Self::Supermartingale,
            (true, true) => Self::None,
        }
    }

    /// Martingale or submartingale.
    pub fn is_submartingale(self) -> bool {
        matches!(self, Self::Martingale | Self::Submartingale)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Martingale => "martingale",
            Self::Submartingale => "submartingale",
            Self::Supermartingale => "supermartingale",
            Self::None => "none",
        }
    }
}

/// Per-component classifications of a process.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MartingaleReport {
    /// By comparing `E_ℓ[X_{t+1}|F_t]` with `X_t`.
    pub l_route: Vec<Classification>,
    /// By testing `ξ_t = ln X_t` as an ordinary (sub/super)martingale.
    pub log_route: Vec<Classification>,
    /// `X` itself under the ordinary conditional expectation.
    pub ordinary: Vec<Classification>,
}

impl MartingaleReport {
    pub fn routes_agree(&self) -> bool {
        self.l_route == self.log_route
    }
}

#[derive(Debug, Clone, Copy)]
struct Flags {
    up: bool,
    down: bool,
}

fn classify_components<F>(p: &AdaptedProcess, mut deviation: F) -> Result<Vec<Classification>>
where
    F: FnMut(usize) -> Result<Vec<Vec<f64>>>,
{
    let n = p.dim();
    let mut flags = vec![Flags { up: false, down: false }; n];
    for t in 0..p.filtration.horizon() {
        for row in deviation(t)? {
            for (f, d) in flags.iter_mut().zip(row) {
                f.up |= d > 0.0;
                f.down |= d < 0.0;
            }
        }
    }
    Ok(flags.into_iter().map(|f| Classification::from_flags(f.up, f.down)).collect())
}

/// Deviations smaller than `tol` in magnitude are reported as zero.
fn snap(d: f64, tol: f64) -> f64 {
    if d.abs() <= tol {
        0.0
    } else {
        d
    }
}

/// Classifies each component of `p` as an l-(sub/super)martingale, both directly
/// through `E_ℓ` and through the log process, and as an ordinary one.
/// Within `tol` relative, equality wins: such steps count as martingale steps.
pub fn classify_l_martingale(p: &AdaptedProcess, space: &FiniteSpace, tol: f64) -> Result<MartingaleReport> {
    check_dim(space.len(), p.filtration.num_atoms())?;
    let vars = &p.variables;
    let ratio_deviation = |cond: &RandomVariable, current: &RandomVariable| -> Vec<Vec<f64>> {
        cond.values
            .iter()
            .zip(&current.values)
            .map(|(c, x)| c.values().iter().zip(x.values()).map(|(a, b)| snap(a / b - 1.0, tol)).collect())
            .collect()
    };
    let l_route = classify_components(p, |t| {
        let cond = l_cond_expectation(&vars[t + 1], p.filtration.at(t), space)?;
        Ok(ratio_deviation(&cond, &vars[t]))
    })?;
    let log_route = classify_components(p, |t| {
        let next = conditional_mean(&vars[t + 1].log_rows(), p.filtration.at(t), space);
        Ok(next
            .iter()
            .zip(vars[t].log_rows())
            .map(|(c, x)| c.iter().zip(&x).map(|(a, b)| snap(a - b, tol)).collect())
            .collect())
    })?;
    let ordinary = classify_components(p, |t| {
        let cond = cond_expectation(&vars[t + 1], p.filtration.at(t), space)?;
        Ok(ratio_deviation(&cond, &vars[t]))
    })?;
    Ok(MartingaleReport {
        l_route,
        log_route,
        ordinary,
    })
}

/// `X_t = Y_t · A_t` with `Y` an l-martingale and `A` predictable, nondecreasing, `A₀ = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DoobDecomposition {
    pub martingale: AdaptedProcess,
    pub compensator: AdaptedProcess,
}

/// Multiplicative Doob decomposition of an l-submartingale.
///
/// With `ξ_t = ln X_t`, the additive compensator is `A'₀ = 0`,
/// `A'_t = A'_{t−1} + E[ξ_t − ξ_{t−1} | F_{t−1}]`; the outputs are
/// `Y_t = exp(ξ_t − A'_t)` and `A_t = exp(A'_t)`.
pub fn doob_decompose(p: &AdaptedProcess, space: &FiniteSpace) -> Result<DoobDecomposition> {
    let report = classify_l_martingale(p, space, DEFAULT_CLASSIFY_TOL)?;
    if let Some((component, c)) = report.l_route.iter().enumerate().find(|(_, c)| !c.is_submartingale()) {
        return Err(Error::NotSubmartingale {
            component,
            classification: c.as_str().to_string(),
        });
    }
    let m = space.len();
    let n = p.dim();
    let logs: Vec<Vec<Vec<f64>>> = p.variables.iter().map(RandomVariable::log_rows).collect();
    let mut compensator = vec![vec![0.0; n]; m];
    let mut ys = Vec::with_capacity(logs.len());
    let mut as_ = Vec::with_capacity(logs.len());
    for t in 0..logs.len() {
        if t > 0 {
            let increments: Vec<Vec<f64>> = logs[t]
                .iter()
                .zip(&logs[t - 1])
                .map(|(cur, prev)| cur.iter().zip(prev).map(|(a, b)| a - b).collect())
                .collect();
            let drift = conditional_mean(&increments, p.filtration.at(t - 1), space);
            for (acc, d) in compensator.iter_mut().zip(drift) {
                for (a, di) in acc.iter_mut().zip(d) {
                    *a += di;
                }
            }
        }
        let y_logs: Vec<Vec<f64>> = logs[t]
            .iter()
            .zip(&compensator)
            .map(|(x, a)| x.iter().zip(a).map(|(u, v)| u - v).collect())
            .collect();
        ys.push(RandomVariable::from_log_rows(&y_logs)?);
        as_.push(RandomVariable::from_log_rows(&compensator)?);
    }
    Ok(DoobDecomposition {
        martingale: AdaptedProcess::new(ys, p.filtration.clone())?,
        compensator: AdaptedProcess::new(as_, p.filtration.clone())?,
    })
}
